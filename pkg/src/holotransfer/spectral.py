"""Eigendata of collocation matrices and convergence diagnostics.

Right eigenvectors ``x`` of ``M`` give eigenfunctions ``sum_l x_l e_l``; left
eigenvectors (``M^T x = lambda x``) give eigenfunctionals
``sum_l x_l e_l^*``.
"""

from __future__ import annotations

import functools
import logging
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.linalg

from holotransfer.errors import ConfigError, NumericalError, ValidationError
from holotransfer.polybasis import (
    ChebCoeffs,
    LaurentCoeffs,
    cheb_functional_matrix,
    cheb_nodes,
    equi_nodes,
    laurent_vander,
)
from holotransfer.transferop import CollocationMatrix

log = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-10
REFINE_TOL = 1e-13
# relative width inside which moduli / real parts count as tied
TIE_TOL = 1e-10


@dataclass(frozen=True)
class SpectralData:
    eigenvalues: np.ndarray
    right_vectors: np.ndarray
    left_vectors: np.ndarray
    residual: float
    basis: str = "chebyshev"
    order: int = 0

    def __len__(self):
        return len(self.eigenvalues)


@dataclass(frozen=True)
class EigenFunctional:
    """Normalised functional ``f -> sum_l weights[l] e_l^*(f)`` with value 1 on constants.

    ``order`` is the node parameter: ``n`` Chebyshev nodes or ``2n`` equidistant nodes.
    """

    basis: str
    weights: np.ndarray
    normalization: complex
    order: int

    @property
    def nodes(self) -> np.ndarray:
        if self.basis == "chebyshev":
            return cheb_nodes(self.order).nodes
        return equi_nodes(self.order).nodes

    def node_weights(self) -> np.ndarray:
        """Weights ``q`` with ``h*(f) = sum_m q_m f(node_m)``."""
        if self.basis == "chebyshev":
            return self.weights @ cheb_functional_matrix(self.order)
        z = equi_nodes(self.order).nodes
        return self.weights @ laurent_vander(z, self.order).T.conj() / (2 * self.order)

    def apply_samples(self, samples) -> complex:
        """Apply to samples taken at the standard-coordinate nodes."""
        samples = np.asarray(samples, dtype=complex)
        if samples.shape != (len(self.weights),):
            raise ConfigError(f"expected {len(self.weights)} node samples, got shape {samples.shape}")
        return complex(self.node_weights() @ samples)

    def __call__(self, f: Callable, to_domain: Callable | None = None) -> complex:
        pts = self.nodes if to_domain is None else to_domain(self.nodes)
        return self.apply_samples(np.broadcast_to(f(np.asarray(pts, dtype=complex)), np.shape(pts)))


def _sort_order(values: np.ndarray) -> list[int]:
    scale = TIE_TOL * max(1.0, float(np.max(np.abs(values), initial=0.0)))

    def cmp(i, j):
        a, b = values[i], values[j]
        for key_a, key_b in ((abs(a), abs(b)), (a.real, b.real), (-a.imag, -b.imag)):
            if abs(key_a - key_b) > scale:
                return -1 if key_a > key_b else 1
        return (i > j) - (i < j)

    return sorted(range(len(values)), key=functools.cmp_to_key(cmp))


def _normalize_columns(V: np.ndarray) -> np.ndarray:
    idx = np.argmax(np.abs(V), axis=0)
    pivots = V[idx, np.arange(V.shape[1])]
    pivots = np.where(pivots == 0, 1.0, pivots)
    return V / pivots


def _residuals(A, lam, V):
    return np.max(np.abs(A @ V - V * lam), axis=0, initial=0.0)


def _refine(A, lam, V, norm, steps=3):
    """Inverse-iteration polish of columns whose residual is above ``REFINE_TOL``.

    LAPACK balances before reducing, which keeps eigenvalues accurate but can
    leave vectors with residuals well above rounding level on the unbalanced
    matrix.
    """
    V = V.copy()
    eye = np.eye(len(A))
    nudge = 64 * np.finfo(float).eps * norm
    for i in np.flatnonzero(_residuals(A, lam, V) > REFINE_TOL * norm):
        v = V[:, i]
        for _ in range(steps):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
                try:
                    y = scipy.linalg.solve(A - (lam[i] + nudge) * eye, v, check_finite=False)
                except (np.linalg.LinAlgError, ValueError):
                    break
            if not np.all(np.isfinite(y)):
                break
            v = _normalize_columns(y[:, None])[:, 0]
            if np.max(np.abs(A @ v - lam[i] * v)) <= REFINE_TOL * norm:
                break
        if np.max(np.abs(A @ v - lam[i] * v)) < np.max(np.abs(A @ V[:, i] - lam[i] * V[:, i])):
            V[:, i] = v
    return V


_SPLIT = 134217729.0  # 2**27 + 1


def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _two_prod(a, b):
    p = a * b
    ah = _SPLIT * a
    ah = ah - (ah - a)
    al = a - ah
    bh = _SPLIT * b
    bh = bh - (bh - b)
    bl = b - bh
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def _compensated_residual(A, lam_hi, lam_lo, V_hi, V_lo):
    """``A V - V diag(lam)`` with hi/lo splits, accumulated in double-double.

    Only 64-bit operations are used (error-free transformations), so the
    result is as accurate as a twice-working-precision evaluation.
    """
    Ar, Ai = A.real, A.imag
    Vr, Vi = V_hi.real, V_hi.imag
    shape = (A.shape[0], V_hi.shape[1])
    sums = [np.zeros(shape), np.zeros(shape)]
    errs = [np.zeros(shape), np.zeros(shape)]

    def add(part, term, err):
        sums[part], e = _two_sum(sums[part], term)
        errs[part] += e + err

    for j in range(A.shape[1]):
        ar, ai = Ar[:, j, None], Ai[:, j, None]
        vr, vi = Vr[None, j, :], Vi[None, j, :]
        for part, (x, y, sign) in ((0, (ar, vr, 1)), (0, (ai, vi, -1)), (1, (ar, vi, 1)), (1, (ai, vr, 1))):
            p, e = _two_prod(x, y)
            add(part, sign * p, sign * e)
    lr, li = lam_hi.real[None, :], lam_hi.imag[None, :]
    for part, (x, y, sign) in ((0, (Vr, lr, -1)), (0, (Vi, li, 1)), (1, (Vr, li, -1)), (1, (Vi, lr, -1))):
        p, e = _two_prod(x, y)
        add(part, sign * p, sign * e)
    tail = A @ V_lo - V_lo * (lam_hi + lam_lo) - V_hi * lam_lo
    return (sums[0] + errs[0]) + 1j * (sums[1] + errs[1]) + tail


def _newton_refine(A, lam, V, iterations=4):
    """Polish simple eigenpairs by Newton's method with compensated residuals.

    Each column is pinned at its largest entry; the bordered correction
    system is solved in double precision while the residual is formed in
    double-double. A column keeps its refinement only if the residual shrinks
    and the eigenvalue moves by less than ``1e-6`` relative.
    """
    n = len(A)
    lam_hi, lam_lo = lam.copy(), np.zeros_like(lam)
    V_hi, V_lo = V.copy(), np.zeros_like(V)
    pivots = np.argmax(np.abs(V), axis=0)
    start = np.max(np.abs(_compensated_residual(A, lam_hi, lam_lo, V_hi, V_lo)), axis=0)
    active = np.abs(lam) > 1e-8 * max(np.max(np.abs(lam), initial=0.0), np.finfo(float).tiny)
    eye = np.eye(n)
    for _ in range(iterations):
        R = _compensated_residual(A, lam_hi, lam_lo, V_hi, V_lo)
        for i in np.flatnonzero(active):
            B = A - lam_hi[i] * eye
            B[:, pivots[i]] = -(V_hi[:, i] + V_lo[:, i])
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
                try:
                    y = scipy.linalg.solve(B, -R[:, i], check_finite=False)
                except (np.linalg.LinAlgError, ValueError):
                    active[i] = False
                    continue
            if not np.all(np.isfinite(y)):
                active[i] = False
                continue
            dlam = y[pivots[i]]
            y[pivots[i]] = 0.0
            lam_hi[i], e = _two_sum_c(lam_hi[i], dlam)
            lam_lo[i] += e
            V_hi[:, i], e = _two_sum_c(V_hi[:, i], y)
            V_lo[:, i] += e
    end = np.max(np.abs(_compensated_residual(A, lam_hi, lam_lo, V_hi, V_lo)), axis=0)
    moved = np.abs(lam_hi + lam_lo - lam)
    keep = (end <= start) & (moved <= 1e-6 * np.maximum(np.abs(lam), np.finfo(float).tiny))
    out_lam = np.where(keep, lam_hi + lam_lo, lam)
    out_V = np.where(keep[None, :], V_hi + V_lo, V)
    return out_lam, out_V


def _two_sum_c(a, b):
    sr, er = _two_sum(np.real(a), np.real(b))
    si, ei = _two_sum(np.imag(a), np.imag(b))
    return sr + 1j * si, er + 1j * ei


def eigendecompose(M: CollocationMatrix | np.ndarray, refine: bool = True) -> SpectralData:
    """Full eigendecomposition, sorted by descending modulus.

    LAPACK eigenvalues are polished by compensated Newton steps unless
    ``refine`` is false.

    Ties (within a relative ``1e-10``) are broken by descending real part and
    then ascending imaginary part, so a conjugate pair lists its member in
    the lower half-plane first.
    """
    if isinstance(M, CollocationMatrix):
        A, basis, order = M.entries, M.basis, M.order
    else:
        A, basis, order = np.asarray(M), "chebyshev", len(M)
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ConfigError(f"need a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise NumericalError("matrix has non-finite entries")
    try:
        lam, vl, vr = scipy.linalg.eig(A, left=True, right=True)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver failed: {exc}") from exc
    # scipy returns vl with vl^H A = lam vl^H, so conj(vl) solves A^T u = lam u
    right = _normalize_columns(vr)
    left = _normalize_columns(vl.conj())
    if refine:
        lam_right, right = _newton_refine(A, lam, right)
        _, left = _newton_refine(A.T, lam, left)
        lam = lam_right
        right, left = _normalize_columns(right), _normalize_columns(left)
    order_idx = _sort_order(lam)
    lam, right, left = lam[order_idx], right[:, order_idx], left[:, order_idx]
    norm = max(np.linalg.norm(A, np.inf), np.finfo(float).tiny)
    right = _refine(A, lam, right, norm)
    left = _refine(A.T, lam, left, norm)
    residual = float(max(_residuals(A, lam, right).max(initial=0.0), _residuals(A.T, lam, left).max(initial=0.0)) / norm)
    if residual > RESIDUAL_TOL:
        raise NumericalError(f"eigensolver residual {residual:.3e} exceeds {RESIDUAL_TOL:g}")
    return SpectralData(lam, right, left, residual, basis, order)


def _check_index(data: SpectralData, index: int) -> int:
    if not -len(data) <= index < len(data):
        raise ConfigError(f"eigenvalue index {index} out of range for {len(data)} eigenvalues")
    return index % len(data)


def eigenfunction(data: SpectralData, index: int, basis: str | None = None) -> ChebCoeffs | LaurentCoeffs:
    """Eigenfunction ``sum_l x_l e_l`` in raw coefficient storage."""
    index = _check_index(data, index)
    basis = basis or data.basis
    x = data.right_vectors[:, index]
    if basis == "chebyshev":
        d = x.astype(complex).copy()
        d[0] *= 2.0
        return ChebCoeffs(d)
    if basis == "laurent":
        return LaurentCoeffs(x * len(x))
    raise ConfigError(f"unknown basis {basis!r}")


def eigenfunctional(data: SpectralData, index: int) -> EigenFunctional:
    index = _check_index(data, index)
    if data.eigenvalues[index] == 0:
        raise ValidationError("eigenfunctionals are only extracted for nonzero eigenvalues")
    x = data.left_vectors[:, index]
    if data.basis == "chebyshev":
        at_one = x[0]
    else:
        at_one = x[len(x) // 2]
    if abs(at_one) <= 1e-14 * np.max(np.abs(x)):
        raise ValidationError("eigenfunctional vanishes on constants; cannot normalise h*(1) = 1")
    return EigenFunctional(data.basis, x / at_one, at_one, data.order)


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    eigenvalue: complex
    difference: float | None
    bound: float | None


def match_eigenvalue(candidates: np.ndarray, target: complex, rel_tol: float = 1e-9) -> int:
    """Index of the candidate nearest ``target``; raises when two distinct candidates tie."""
    dist = np.abs(np.asarray(candidates) - target)
    order = np.argsort(dist, kind="stable")
    best = int(order[0])
    if len(order) > 1:
        second = int(order[1])
        tol = rel_tol * max(abs(target), 1e-300)
        # two candidates that are themselves indistinguishable are no real tie
        if dist[second] - dist[best] <= tol and abs(candidates[best] - candidates[second]) > tol:
            raise NumericalError(
                f"ambiguous eigenvalue match near {target}: {candidates[best]} and {candidates[second]}"
            )
    return best


def convergence_table(
    spectrum_at: Callable[[int], np.ndarray],
    n_list: Sequence[int],
    index: int,
    ratio: float | None = None,
) -> list[ConvergenceRow]:
    """Eigenvalue ``index`` tracked across ``n_list``.

    The eigenvalue is picked by position at the largest ``n`` and followed to
    smaller ``n`` by nearest-neighbour matching. ``ratio`` (``r/R``) adds the
    column ``ratio**n``.
    """
    n_list = [int(n) for n in n_list]
    if not n_list or any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ConfigError("n_list must be nonempty and strictly increasing")
    spectra = {n: np.asarray(spectrum_at(n)) for n in n_list}
    top = spectra[n_list[-1]]
    if not -len(top) <= index < len(top):
        raise ConfigError(f"eigenvalue index {index} out of range at n = {n_list[-1]}")
    picked = {n_list[-1]: complex(top[index])}
    for n_hi, n in zip(n_list[::-1], n_list[-2::-1]):
        cand = spectra[n]
        picked[n] = complex(cand[match_eigenvalue(cand, picked[n_hi])])
    rows = []
    prev = None
    for n in n_list:
        lam = picked[n]
        rows.append(
            ConvergenceRow(
                n,
                lam,
                None if prev is None else abs(lam - prev),
                None if ratio is None else ratio**n,
            )
        )
        prev = lam
    return rows


def decay_slope(ns: Sequence[int], diffs: Sequence[float], floor: float = 0.0) -> float:
    """Least-squares slope of ``log10(max(diff, floor))`` against ``n``."""
    d = np.maximum(np.asarray(diffs, dtype=float), floor)
    if np.any(d <= 0):
        raise NumericalError("zero differences; pass a positive floor")
    return float(np.polyfit(np.asarray(ns, dtype=float), np.log10(d), 1)[0])
