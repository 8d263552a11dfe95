"""Turnkey drivers: correlation decay, circle-map spectra, Lyapunov exponents
of positive random matrix products and stationary-measure integrals of
iterated function systems.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from holotransfer.errors import ConfigError, NumericalError, ValidationError
from holotransfer.geometry import (
    DEFAULT_SAMPLES,
    ContractionReport,
    EllipticDomain,
    contraction_search,
    focal_affine,
)
from holotransfer.polybasis import cheb_nodes
from holotransfer.spectral import (
    ConvergenceRow,
    SpectralData,
    convergence_table,
    eigendecompose,
    eigenfunctional,
)
from holotransfer.transferop import (
    CircleSystem,
    MapWeightSystem,
    assemble_cheb,
    assemble_circle,
)

log = logging.getLogger(__name__)

ComplexFn = Callable[[np.ndarray], np.ndarray]

UNIT_EIGENVALUE_TOL = 1e-10
IMAG_TOL = 1e-10
SEARCH_RANGE = (1.05, 40.0)
SEARCH_POINTS = 500


def spectrum(system: MapWeightSystem | CircleSystem, n: int) -> SpectralData:
    if isinstance(system, CircleSystem):
        return eigendecompose(assemble_circle(system, n))
    return eigendecompose(assemble_cheb(system, n))


def correlation_decay(system: MapWeightSystem, n: int) -> complex:
    """Subleading eigenvalue of the Chebyshev collocation matrix."""
    data = spectrum(system, n)
    if len(data) < 2:
        raise ConfigError("need n >= 2 for a subleading eigenvalue")
    return complex(data.eigenvalues[1])


def eigenvalue_table(
    system: MapWeightSystem | CircleSystem,
    n_list: Sequence[int],
    index: int,
    ratio: float | None = None,
) -> list[ConvergenceRow]:
    if ratio is None and isinstance(system, MapWeightSystem) and system.r is not None:
        ratio = system.r / system.R
    return convergence_table(lambda n: spectrum(system, n).eigenvalues, n_list, index, ratio)


# -- the full-branch interval map with a rational first branch -------------


def interval_map_system(R: float = 16.99, r: float | None = None) -> MapWeightSystem:
    """Twelve-branch map on ``[0, 1]``: ``x/(11+x)`` and ``(x+i)/12``, weights ``Phi_i'``."""
    branches = [(lambda x: x / (11 + x), lambda x: 11 / (11 + x) ** 2)]
    for i in range(1, 12):
        branches.append((lambda x, i=i: (x + i) / 12, lambda x: np.full(np.shape(x), 1 / 12, dtype=complex)))
    return MapWeightSystem(branches, (0, 1), R, r)


# -- Blaschke products -----------------------------------------------------


def blaschke_branches(mu: complex) -> list[tuple[ComplexFn, ComplexFn]]:
    """Inverse branches of ``tau(z) = ((z - mu)/(1 - conj(mu) z))^2``.

    ``phi_+-(z) = (s + mu)/(1 + conj(mu) s)`` with ``s = +-sqrt(z)``, where
    ``sqrt(z) = sqrt|z| exp(i theta/2)`` for ``arg z = theta in [0, 2 pi)``.
    """
    mu = complex(mu)
    cmu = mu.conjugate()

    def root(z, sign):
        z = np.asarray(z, dtype=complex)
        return sign * np.sqrt(np.abs(z)) * np.exp(0.5j * np.mod(np.angle(z), 2 * np.pi))

    def make(sign):
        def phi(z):
            s = root(z, sign)
            return (s + mu) / (1 + cmu * s)

        def dphi(z):
            s = root(z, sign)
            return (1 - abs(mu) ** 2) / (1 + cmu * s) ** 2 / (2 * s)

        return phi, dphi

    return [make(1), make(-1)]


def blaschke_derivative(mu: complex) -> ComplexFn:
    mu = complex(mu)
    cmu = mu.conjugate()

    def taup(z):
        b = (z - mu) / (1 - cmu * z)
        return 2 * b * (1 - abs(mu) ** 2) / (1 - cmu * z) ** 2

    return taup


def blaschke_system(mu: complex, weight: str = "unit") -> CircleSystem:
    """Circle system of the degree-two Blaschke product.

    ``weight`` names the factor multiplying ``f o phi_i``: ``"unit"`` (plain
    preimage sum, leading eigenvalue 2), ``"deriv"`` (``phi_i'``) or
    ``"deriv_squared"`` (``phi_i'^2``).
    """
    mu = complex(mu)
    if not abs(mu) < 1 / 3:
        raise ValidationError(f"|mu| must be below 1/3 for an expanding map, got {abs(mu):.6g}")
    taup = blaschke_derivative(mu)
    weights = {
        "unit": taup,
        "deriv": lambda z: np.ones_like(z),
        "deriv_squared": lambda z: 1 / taup(z),
    }
    if weight not in weights:
        raise ConfigError(f"unknown Blaschke weight {weight!r}")
    # branch data is holomorphic for |mu|^2 < |z| < 1/|mu|^2
    rho = 0.9 / abs(mu) ** 2 if mu != 0 else 100.0
    return CircleSystem(blaschke_branches(mu), weights[weight], 1, min(rho, 100.0))


def blaschke_benchmark(mu: complex, n: int) -> SpectralData:
    return spectrum(blaschke_system(mu), n)


def blaschke_fixed_point_multiplier(mu: complex) -> complex:
    """``tau'(z0)`` at the attracting fixed point ``z0`` of ``tau`` in the disk."""
    taup = blaschke_derivative(mu)
    mu = complex(mu)
    cmu = mu.conjugate()
    # (z - mu)^2 = z (1 - conj(mu) z)^2  ->  cubic in z
    coeffs = [-(cmu**2), 1 + 2 * cmu, -(1 + 2 * mu), mu**2]
    roots = np.roots(coeffs)
    # the circle carries repelling fixed points; keep strictly interior roots
    inside = roots[np.abs(roots) < 1 - 1e-8]
    if len(inside) != 1:
        raise NumericalError("could not isolate the attracting fixed point")
    return complex(taup(inside[0]))


# -- annealed operators: random matrix products and IFS --------------------


def _annealed_functional(system: MapWeightSystem, n: int):
    data = spectrum(system, n)
    lam = complex(data.eigenvalues[0])
    if abs(lam - 1) > UNIT_EIGENVALUE_TOL:
        raise ValidationError(f"leading eigenvalue is {lam}, expected 1")
    if len(data) > 1 and abs(data.eigenvalues[1]) >= 1 - 1e-8:
        raise ValidationError("eigenvalue 1 is not simple or not dominant")
    return eigenfunctional(data, 0)


def _samples_at_nodes(g: ComplexFn, foci, n: int) -> np.ndarray:
    pts = focal_affine(foci, cheb_nodes(n).nodes).astype(complex)
    with np.errstate(all="ignore"):
        v = np.broadcast_to(np.asarray(g(pts), dtype=complex), pts.shape)
    if not np.all(np.isfinite(v)):
        raise NumericalError("observable is not finite at a node")
    return v


def _check_probs(probs, k):
    probs = np.asarray(probs, dtype=float)
    if probs.shape != (k,):
        raise ConfigError(f"expected {k} probabilities, got {probs.shape}")
    if np.any(probs < 0) or abs(probs.sum() - 1) > 1e-12:
        raise ConfigError("probabilities must be nonnegative and sum to 1")
    return probs


def _resolve_R(maps, foci, R, admissible=None) -> tuple[float, ContractionReport | None]:
    if R is not None:
        return float(R), None
    report = contraction_search(maps, foci, np.linspace(*SEARCH_RANGE, SEARCH_POINTS), admissible=admissible)
    return report.R_star, report


@dataclass
class RandomMatrixProblem:
    """Positive invertible 2x2 matrices ``[[a, b], [c, d]]`` drawn with ``probs``.

    ``R=None`` selects the working ellipse by a contraction search restricted
    to ellipses where every ``w_A`` has positive real part.
    """

    matrices: Sequence
    probs: Sequence[float]
    foci: tuple = (0, 1)
    R: float | None = None
    samples: int = DEFAULT_SAMPLES
    report: ContractionReport | None = field(default=None, init=False)

    def __post_init__(self):
        mats = np.asarray(self.matrices, dtype=float)
        if mats.ndim != 3 or mats.shape[1:] != (2, 2) or len(mats) == 0:
            raise ConfigError("matrices must be a nonempty list of 2x2 arrays")
        if np.any(mats <= 0):
            raise ValidationError("all matrix entries must be positive")
        if np.any(np.abs(np.linalg.det(mats)) < 1e-14):
            raise ValidationError("matrices must be invertible")
        self.matrices = mats
        self.probs = _check_probs(self.probs, len(mats))
        self.R, self.report = _resolve_R(self.maps, self.foci, self.R, self._weights_positive)
        if not self._weights_positive(EllipticDomain(self.foci, self.R)):
            raise ValidationError("Re(w_A) <= 0 on the working ellipse")

    def w(self, i: int) -> ComplexFn:
        (a, b), (c, d) = self.matrices[i]
        return lambda z: (a + c - b - d) * z + b + d

    def phi(self, i: int) -> ComplexFn:
        (a, b), (c, d) = self.matrices[i]
        w = self.w(i)
        return lambda z: ((a - b) * z + b) / w(z)

    @property
    def maps(self) -> list[ComplexFn]:
        return [self.phi(i) for i in range(len(self.matrices))]

    def _weights_positive(self, domain: EllipticDomain) -> bool:
        pts = np.concatenate([domain.boundary(self.samples), focal_affine(domain.foci, np.linspace(-1, 1, 65))])
        return all(np.min(self.w(i)(pts).real) > 0 for i in range(len(self.matrices)))

    def annealed_system(self) -> MapWeightSystem:
        branches = [(self.phi(i), lambda z, p=p: np.full(np.shape(z), p, dtype=complex)) for i, p in enumerate(self.probs)]
        return MapWeightSystem(branches, self.foci, self.R)

    def log_weight_observable(self) -> ComplexFn:
        """``M_0 1 = sum_i p_i log w_{A_i}`` (principal branch)."""

        def g(z):
            return sum(p * np.log(self.w(i)(z)) for i, p in enumerate(self.probs))

        return g


def lyapunov_matrices(problem: RandomMatrixProblem, n: int) -> float:
    system = problem.annealed_system()
    pts = focal_affine(problem.foci, cheb_nodes(n).nodes)
    for i in range(len(problem.matrices)):
        if np.min(problem.w(i)(pts).real) <= 0:
            raise ValidationError(f"Re(w_A) <= 0 at a node for matrix {i}")
    h = _annealed_functional(system, n)
    value = h.apply_samples(_samples_at_nodes(problem.log_weight_observable(), problem.foci, n))
    if abs(value.imag) > IMAG_TOL:
        raise NumericalError(f"Lyapunov estimate has imaginary part {value.imag:.3e}")
    return float(value.real)


@dataclass
class IFSProblem:
    """Maps ``Phi_i`` on a focal segment with probabilities ``probs``.

    ``derivatives`` is needed only for the Lyapunov exponent and
    ``observable`` only for :func:`ifs_integral`.
    """

    maps: Sequence[ComplexFn]
    probs: Sequence[float]
    derivatives: Sequence[ComplexFn] | None = None
    observable: ComplexFn | None = None
    foci: tuple = (0, 1)
    R: float | None = None
    report: ContractionReport | None = field(default=None, init=False)

    def __post_init__(self):
        self.maps = list(self.maps)
        if not self.maps:
            raise ConfigError("an IFS needs at least one map")
        self.probs = _check_probs(self.probs, len(self.maps))
        if self.derivatives is not None and len(self.derivatives) != len(self.maps):
            raise ConfigError("one derivative per map is required")
        self.R, self.report = _resolve_R(self.maps, self.foci, self.R)

    def annealed_system(self) -> MapWeightSystem:
        branches = [(phi, lambda z, p=p: np.full(np.shape(z), p, dtype=complex)) for phi, p in zip(self.maps, self.probs)]
        return MapWeightSystem(branches, self.foci, self.R)


def ifs_integral(problem: IFSProblem, n: int, observable: ComplexFn | None = None) -> complex:
    """``h*_n(g)``, the approximate integral of ``g`` against the stationary measure."""
    g = observable or problem.observable
    if g is None:
        raise ConfigError("no observable given")
    h = _annealed_functional(problem.annealed_system(), n)
    return h.apply_samples(_samples_at_nodes(g, problem.foci, n))


def ifs_lyapunov(problem: IFSProblem, n: int) -> float:
    """``-h*_n(sum_i p_i log Phi_i')`` with the principal logarithm."""
    if problem.derivatives is None:
        raise ConfigError("map derivatives are required for the Lyapunov exponent")
    pts = focal_affine(problem.foci, cheb_nodes(n).nodes).astype(complex)
    for i, d in enumerate(problem.derivatives):
        v = np.asarray(d(pts), dtype=complex)
        if np.any(v.real <= 0):
            raise ValidationError(f"derivative of map {i} is not positive on the segment")

    def g(z):
        return sum(p * np.log(d(z)) for d, p in zip(problem.derivatives, problem.probs))

    value = -ifs_integral(problem, n, g)
    if abs(value.imag) > IMAG_TOL:
        raise NumericalError(f"Lyapunov estimate has imaginary part {value.imag:.3e}")
    return float(value.real)


def chaos_game(problem: IFSProblem, observable: ComplexFn, steps: int = 200_000, seed: int = 0, burn_in: int = 100) -> float:
    """Monte Carlo estimate of ``int g d(nu)`` by iterating random maps.

    Independent of the collocation machinery; used as an oracle.
    """
    rng = np.random.default_rng(seed)
    choices = rng.choice(len(problem.maps), size=steps + burn_in, p=problem.probs)
    x = complex(focal_affine(problem.foci, 0.0))
    values = np.empty(steps, dtype=complex)
    for t, i in enumerate(choices):
        x = complex(problem.maps[i](np.asarray(x)))
        if t >= burn_in:
            values[t - burn_in] = x
    return float(np.mean(np.asarray(observable(values)).real))
