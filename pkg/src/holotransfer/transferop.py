"""Map-weight systems, circle systems and their collocation matrices.

For a system ``L f = sum_i W_i * (f o Phi_i)`` and a rank-``n`` interpolation
projection ``P f = sum_l e_l^*(f) e_l`` the collocation matrix is
``M[k, l] = e_k^*(L e_l)``; its nonzero spectrum coincides with that of
``P L``, ``L P`` and ``P L P``.

All maps and weights are plain callables acting elementwise on numpy arrays
of complex numbers, expressed in domain coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Literal, Sequence

import numpy as np

from holotransfer.errors import ConfigError, NumericalError, ValidationError
from holotransfer.geometry import (
    DEFAULT_SAMPLES,
    EllipticDomain,
    elliptic_radius,
    focal_affine,
    focal_affine_inv,
    image_radius,
)
from holotransfer.polybasis import cheb_functional_matrix, cheb_nodes, cheb_vander, equi_nodes, laurent_vander

ComplexFn = Callable[[np.ndarray], np.ndarray]


def _eval(fn: ComplexFn, points: np.ndarray, what: str) -> np.ndarray:
    with np.errstate(all="ignore"):
        v = np.broadcast_to(np.asarray(fn(points), dtype=complex), points.shape)
    if not np.all(np.isfinite(v)):
        raise NumericalError(f"{what} is not finite at an assembly node")
    return np.array(v)


@dataclass(frozen=True)
class MapWeightSystem:
    """Branches ``(Phi_i, W_i)`` holomorphic on ``E_{foci,R}``.

    When ``r`` is given, assembly checks that every branch maps the nodes and
    the sampled boundary of ``E_{foci,R}`` into ``E_{foci,r}``.
    """

    branches: Sequence[tuple[ComplexFn, ComplexFn]]
    foci: tuple[complex, complex] = (1.0, -1.0)
    R: float = 2.0
    r: float | None = None
    samples: int = DEFAULT_SAMPLES

    def __post_init__(self):
        if not self.branches:
            raise ConfigError("a map-weight system needs at least one branch")
        if self.r is not None and not 1 < self.r < self.R:
            raise ConfigError(f"need 1 < r < R, got r={self.r}, R={self.R}")
        object.__setattr__(self, "foci", (complex(self.foci[0]), complex(self.foci[1])))
        object.__setattr__(self, "branches", tuple(tuple(b) for b in self.branches))

    @property
    def domain(self) -> EllipticDomain:
        return EllipticDomain(self.foci, self.R)

    @property
    def maps(self) -> list[ComplexFn]:
        return [phi for phi, _ in self.branches]

    def node_data(self, n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Standard nodes ``x``, pulled-back images ``(d, n)`` and weights ``(d, n)``."""
        x = cheb_nodes(n).nodes
        pts = focal_affine(self.foci, x).astype(complex)
        images = np.stack([focal_affine_inv(self.foci, _eval(phi, pts, f"map {i}")) for i, (phi, _) in enumerate(self.branches)])
        weights = np.stack([_eval(W, pts, f"weight {i}") for i, (_, W) in enumerate(self.branches)])
        if self.r is not None:
            self.check_containment(images)
        return x, images, weights

    def check_containment(self, std_images: np.ndarray | None = None):
        """Check ``union Phi_i(E_R) in E_r`` at nodes and boundary samples."""
        if self.r is None:
            return
        if std_images is not None:
            worst = float(np.max(elliptic_radius(std_images)))
            if worst > self.r:
                raise ValidationError(f"node image has elliptic radius {worst:.6g} > r = {self.r}")
        worst = image_radius(self.maps, self.domain, self.samples)
        if worst > self.r:
            raise ValidationError(f"boundary image has elliptic radius {worst:.6g} > r = {self.r}")


@dataclass(frozen=True)
class CircleSystem:
    """Inverse branches ``(phi_i, phi_i')`` of a circle map with weight ``w``.

    Realises ``L f = orientation * sum_i (w o phi_i) * phi_i' * (f o phi_i)``.
    ``rho`` (optional) is the radius of an annulus ``1/rho < |z| < rho`` on
    which the branch data is holomorphic and evaluable; it enables the
    contour-based assembly in :func:`assemble_circle`.
    """

    inverse_branches: Sequence[tuple[ComplexFn, ComplexFn]]
    weight: ComplexFn = field(default=lambda z: np.ones_like(z))
    orientation: int = 1
    rho: float | None = None

    def __post_init__(self):
        if not self.inverse_branches:
            raise ConfigError("a circle system needs at least one inverse branch")
        if self.rho is not None and not self.rho > 1:
            raise ConfigError(f"annulus radius must exceed 1, got {self.rho}")
        if self.orientation not in (1, -1):
            raise ConfigError(f"orientation must be +1 or -1, got {self.orientation}")
        object.__setattr__(self, "inverse_branches", tuple(tuple(b) for b in self.inverse_branches))

    def node_data(self, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Preimages ``(K, len(z))`` and effective weights ``orientation * w(phi) * phi'``."""
        pre = np.stack([_eval(phi, z, f"inverse branch {i}") for i, (phi, _) in enumerate(self.inverse_branches)])
        if np.any(pre == 0):
            raise ValidationError("an inverse branch hits 0, where the Laurent basis is undefined")
        dphi = np.stack([_eval(d, z, f"branch derivative {i}") for i, (_, d) in enumerate(self.inverse_branches)])
        w = _eval(self.weight, pre, "weight")
        mod = np.abs(pre)
        if np.min(mod) < 1e-8 or np.max(mod) > 1e8:
            raise ValidationError("inverse branch images must stay away from 0 and infinity")
        for i in range(len(pre)):
            for j in range(i):
                if np.any(np.isclose(pre[i], pre[j], rtol=0, atol=1e-12)):
                    raise ValidationError(f"inverse branches {j} and {i} coincide at a node")
        return pre, self.orientation * w * dphi


@dataclass(frozen=True)
class CollocationMatrix:
    basis: Literal["chebyshev", "laurent"]
    n: int
    entries: np.ndarray
    order: int

    def __post_init__(self):
        if self.entries.shape != (self.n, self.n):
            raise NumericalError(f"collocation matrix has shape {self.entries.shape}, expected {(self.n, self.n)}")
        if not np.all(np.isfinite(self.entries)):
            raise NumericalError("collocation matrix has non-finite entries")


def assemble_cheb(system: MapWeightSystem, n: int, method: str = "factored") -> CollocationMatrix:
    """Chebyshev collocation matrix ``M = A B`` of a map-weight system.

    ``A[k, m] = ((2 - delta_{0k}) / n) T_k(x_m)`` and
    ``B[m, l] = sum_j W_j(x_m) T_l(Phi_j(x_m))`` in standard coordinates.
    ``method="direct"`` evaluates the triple sum entry by entry instead.
    """
    x, images, weights = system.node_data(n)
    if method == "factored":
        B = np.einsum("jm,jml->ml", weights, cheb_vander(images, n))
        M = cheb_functional_matrix(n) @ B
    elif method == "direct":
        M = _assemble_cheb_direct(x, images, weights, n)
    else:
        raise ConfigError(f"unknown assembly method {method!r}")
    return CollocationMatrix("chebyshev", n, M, n)


def _assemble_cheb_direct(x, images, weights, n):
    Tx = cheb_vander(x, n)
    Tphi = cheb_vander(images, n)
    M = np.zeros((n, n), dtype=complex)
    for k in range(n):
        scale = (2.0 - (k == 0)) / n
        for l in range(n):
            total = 0.0
            for m in range(n):
                inner = 0.0
                for j in range(len(images)):
                    inner += weights[j, m] * Tphi[j, m, l]
                total += Tx[m, k] * inner
            M[k, l] = scale * total
    return M


def assemble_circle(system: CircleSystem, n: int, method: str = "auto") -> CollocationMatrix:
    """Equidistant collocation matrix, rows/columns indexed by degrees ``-n..n-1``.

    ``M[l, j] = (1/2n) sum_k (L e_j)(z_k) z_k^{-l}``.

    ``method="nodal"`` evaluates that sum directly. Its entries carry an
    absolute error of about ``eps * max|L e_j|`` even where the exact entry
    is many orders of magnitude smaller, which limits subleading eigenvalues
    to roughly 1e-9 at ``n ~ 50``. ``method="contour"`` (needs
    ``system.rho``) computes the same matrix through the aliasing identity
    ``M[l, j] = sum_m (-1)^m chat_{l+2nm}(L e_j)``, with each Laurent
    coefficient ``chat_k`` taken from a trapezoidal rule on whichever circle
    ``|z| = r`` inside the annulus gives the smallest rounding estimate
    ``eps * max_{|z|=r}|L e_j| * r^{-k}``. ``"auto"`` picks ``"contour"``
    when ``rho`` is set.
    """
    if method == "auto":
        method = "nodal" if system.rho is None else "contour"
    if method == "nodal":
        z = equi_nodes(n).nodes
        M = laurent_vander(z, n).T.conj() @ _circle_columns(system, z, n) / (2 * n)
    elif method == "contour":
        if system.rho is None:
            raise ConfigError("contour assembly needs the annulus radius rho")
        M = _assemble_circle_contour(system, n)
    else:
        raise ConfigError(f"unknown assembly method {method!r}")
    return CollocationMatrix("laurent", 2 * n, M, n)


def _circle_columns(system: CircleSystem, z: np.ndarray, n: int) -> np.ndarray:
    """``V[k, j] = (L e_{j-n})(z_k)``."""
    pre, eff = system.node_data(z)
    return np.einsum("ik,ikj->kj", eff, laurent_vander(pre, n))


CONTOUR_RADII = 41
ALIAS_TERMS = 2


def _assemble_circle_contour(system: CircleSystem, n: int) -> np.ndarray:
    deg = np.arange(-(2 * ALIAS_TERMS + 1) * n, (2 * ALIAS_TERMS + 1) * n)
    points = 1 << int(np.ceil(np.log2(max(256, 16 * n))))
    theta = 2 * np.pi * np.arange(points) / points
    eps = np.finfo(float).eps
    best = np.full((len(deg), 2 * n), np.inf)
    chat = np.zeros((len(deg), 2 * n), dtype=complex)
    for r in system.rho ** np.linspace(-1.0, 1.0, CONTOUR_RADII):
        F = _circle_columns(system, r * np.exp(1j * theta), n)
        coeffs = np.fft.fft(F, axis=0)[deg % points] / points
        log_scale = -deg[:, None] * np.log(r)
        log_est = np.log(eps * np.max(np.abs(F), axis=0))[None, :] + log_scale
        better = log_est < best
        with np.errstate(over="ignore", invalid="ignore"):
            # overflowing candidates have huge estimates and are replaced later
            chat[better] = coeffs[better] * np.exp(log_scale.repeat(2 * n, axis=1)[better])
        best[better] = log_est[better]
    M = np.zeros((2 * n, 2 * n), dtype=complex)
    offset = -deg[0]
    rows = np.arange(-n, n)
    for m in range(-ALIAS_TERMS, ALIAS_TERMS + 1):
        M += (-1) ** m * chat[rows + 2 * n * m + offset]
    return M


def apply_operator(system: MapWeightSystem, f: ComplexFn, points) -> np.ndarray:
    """Pointwise values of ``sum_i W_i(p) f(Phi_i(p))``."""
    points = np.asarray(points, dtype=complex)
    total = np.zeros(points.shape, dtype=complex)
    for i, (phi, W) in enumerate(system.branches):
        total += _eval(W, points, f"weight {i}") * _eval(f, _eval(phi, points, f"map {i}"), "observable")
    return total


def apply_circle_operator(system: CircleSystem, f: ComplexFn, points) -> np.ndarray:
    points = np.asarray(points, dtype=complex)
    pre, eff = system.node_data(points)
    return np.sum(eff * _eval(f, pre, "observable"), axis=0)
