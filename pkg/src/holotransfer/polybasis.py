"""Chebyshev and Fourier-Laurent interpolation bases.

Two families of nodes are used throughout the package:

* Chebyshev nodes ``x_k = cos((2k+1) pi / (2n))``, the zeros of ``T_n``, with
  coefficient functionals ``d_l = (2/n) sum_k f(x_k) T_l(x_k)`` so that the
  interpolant reads ``d_0/2 + sum_{l>=1} d_l T_l``;
* the ``2n`` roots of ``-1``, ``z_k = exp(i (2k+1) pi / (2n))``, with
  ``c_l = sum_k f(z_k) z_k^{-l}`` for ``l = -n..n-1`` and interpolant
  ``(1/2n) sum_l c_l z^l``.

Coefficients are stored raw; the ``1/2`` and ``1/2n`` factors are applied at
evaluation time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from holotransfer.errors import ConfigError, ValidationError

__all__ = [
    "ChebGrid",
    "ChebCoeffs",
    "FourierGrid",
    "LaurentCoeffs",
    "cheb_nodes",
    "cheb_vander",
    "cheb_transform",
    "cheb_functional_matrix",
    "cheb_eval",
    "equi_nodes",
    "laurent_vander",
    "laurent_transform",
    "laurent_transform_direct",
    "laurent_eval",
]


@dataclass(frozen=True)
class ChebGrid:
    n: int
    nodes: np.ndarray


@dataclass(frozen=True)
class ChebCoeffs:
    """Coefficients ``d_0..d_{n-1}`` of ``d_0/2 + sum d_l T_l``."""

    coeffs: np.ndarray

    @property
    def n(self) -> int:
        return len(self.coeffs)

    def __call__(self, x):
        return cheb_eval(self, x)


@dataclass(frozen=True)
class FourierGrid:
    n: int
    nodes: np.ndarray


@dataclass(frozen=True)
class LaurentCoeffs:
    """Coefficients ``c_{-n}..c_{n-1}`` of ``(1/2n) sum c_l z^l``.

    ``coeffs[j]`` holds the coefficient of degree ``j - n``.
    """

    coeffs: np.ndarray

    @property
    def n(self) -> int:
        return len(self.coeffs) // 2

    @property
    def degrees(self) -> np.ndarray:
        return np.arange(-self.n, self.n)

    def __getitem__(self, degree: int) -> complex:
        if not -self.n <= degree < self.n:
            raise IndexError(f"Laurent degree {degree} outside [{-self.n}, {self.n - 1}]")
        return self.coeffs[degree + self.n]

    def __call__(self, z):
        return laurent_eval(self, z)


def _check_size(n) -> int:
    if int(n) != n or n < 1:
        raise ConfigError(f"basis size must be a positive integer, got {n!r}")
    return int(n)


def cheb_nodes(n: int) -> ChebGrid:
    n = _check_size(n)
    k = np.arange(n)
    nodes = np.cos((2 * k + 1) * np.pi / (2 * n))
    # cos rounding leaves ~1e-17 instead of an exact zero at the midpoint
    if n % 2 == 1:
        nodes[n // 2] = 0.0
    return ChebGrid(n, nodes)


def cheb_vander(x, n: int) -> np.ndarray:
    """Matrix ``V[..., l] = T_l(x)`` for ``l < n`` via the three-term recurrence.

    Works for complex ``x``; the last axis of the result indexes the degree.
    """
    x = np.asarray(x)
    dtype = np.result_type(x, float)
    V = np.empty(x.shape + (n,), dtype=dtype)
    V[..., 0] = 1.0
    if n > 1:
        V[..., 1] = x
    for l in range(2, n):
        V[..., l] = 2.0 * x * V[..., l - 1] - V[..., l - 2]
    return V


def cheb_functional_matrix(n: int) -> np.ndarray:
    """Matrix ``A`` with ``A @ samples`` equal to the coefficient functionals.

    ``A[k, m] = ((2 - delta_{0k}) / n) T_k(x_m)``, i.e. row ``k`` is the
    functional returning the coefficient of ``T_k`` in the interpolant.
    """
    n = _check_size(n)
    k = np.arange(n)[:, None]
    m = np.arange(n)[None, :]
    A = np.cos(k * (2 * m + 1) * np.pi / (2 * n)) * (2.0 / n)
    A[0] *= 0.5
    return A


def cheb_transform(values) -> ChebCoeffs:
    """Raw coefficients ``d_l = (2/n) sum_k f(x_k) T_l(x_k)`` of node samples."""
    values = np.asarray(values)
    if values.ndim != 1 or values.size == 0:
        raise ConfigError(f"expected a nonempty vector of samples, got shape {values.shape}")
    n = values.size
    k = np.arange(n)[:, None]
    m = np.arange(n)[None, :]
    T = np.cos(k * (2 * m + 1) * np.pi / (2 * n))
    d = (2.0 / n) * (T @ values.astype(complex))
    return ChebCoeffs(d)


def cheb_eval(coeffs: ChebCoeffs | np.ndarray, x):
    """Evaluate ``d_0/2 + sum_{l>=1} d_l T_l(x)`` by Clenshaw's recurrence."""
    d = np.asarray(coeffs.coeffs if isinstance(coeffs, ChebCoeffs) else coeffs)
    x = np.asarray(x)
    b1 = np.zeros(x.shape, dtype=np.result_type(x, d, float))
    b2 = np.zeros_like(b1)
    for dl in d[:0:-1]:
        b1, b2 = dl + 2.0 * x * b1 - b2, b1
    out = 0.5 * d[0] + x * b1 - b2 if d.size else b1
    return out[()] if out.ndim == 0 else out


def equi_nodes(n: int) -> FourierGrid:
    n = _check_size(n)
    k = np.arange(2 * n)
    return FourierGrid(n, np.exp(1j * np.pi * (2 * k + 1) / (2 * n)))


def laurent_vander(z, n: int) -> np.ndarray:
    """Matrix ``V[..., j] = z^(j - n)`` for ``j = 0..2n-1``."""
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0):
        raise ValidationError("Laurent monomials are undefined at z = 0")
    return z[..., None] ** np.arange(-n, n)


def laurent_transform_direct(values) -> LaurentCoeffs:
    """Reference O(n^2) sum ``c_l = sum_k f(z_k) z_k^{-l}``."""
    values = _laurent_samples(values)
    n = values.size // 2
    z = equi_nodes(n).nodes
    return LaurentCoeffs(laurent_vander(z, n).T.conj() @ values)


def laurent_transform(values) -> LaurentCoeffs:
    """``c_l = sum_k f(z_k) z_k^{-l}`` for ``l = -n..n-1`` via the FFT.

    With ``z_k = exp(i pi (2k+1)/(2n))`` the sum factors as
    ``exp(-i pi l/(2n)) * FFT(f)[l mod 2n]``.
    """
    values = _laurent_samples(values)
    n = values.size // 2
    degrees = np.arange(-n, n)
    F = np.fft.fft(values)
    return LaurentCoeffs(np.exp(-1j * np.pi * degrees / (2 * n)) * F[degrees % (2 * n)])


def _laurent_samples(values) -> np.ndarray:
    values = np.asarray(values, dtype=complex)
    if values.ndim != 1 or values.size == 0 or values.size % 2:
        raise ConfigError(f"expected an even-length nonempty vector of samples, got shape {values.shape}")
    return values


def laurent_eval(coeffs: LaurentCoeffs, z):
    """Evaluate ``(1/2n) sum_{l=-n}^{n-1} c_l z^l`` (Horner in ``z`` after factoring ``z^-n``)."""
    c = np.asarray(coeffs.coeffs)
    n = c.size // 2
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0):
        raise ValidationError("Laurent interpolant cannot be evaluated at z = 0")
    acc = np.zeros(z.shape, dtype=complex)
    for cj in c[::-1]:
        acc = acc * z + cj
    out = acc * z ** (-n) / (2 * n)
    return out[()] if out.ndim == 0 else out
