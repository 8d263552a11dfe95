"""Interpolation projections and their closed-form error/stability bounds."""

from __future__ import annotations

from typing import Callable

import numpy as np

from holotransfer.errors import ConfigError, NumericalError
from holotransfer.geometry import focal_affine
from holotransfer.polybasis import (
    ChebCoeffs,
    LaurentCoeffs,
    cheb_nodes,
    cheb_transform,
    equi_nodes,
    laurent_transform,
)

STANDARD_FOCI = (1.0, -1.0)


def _samples(f: Callable, points: np.ndarray) -> np.ndarray:
    with np.errstate(all="ignore"):
        v = np.broadcast_to(np.asarray(f(points), dtype=complex), points.shape)
    if not np.all(np.isfinite(v)):
        raise NumericalError("function is not finite at an interpolation node")
    return np.array(v)


def project_cheb(f: Callable, foci=STANDARD_FOCI, n: int = 16) -> ChebCoeffs:
    """Chebyshev interpolant of ``f`` at the nodes mapped onto the focal segment.

    The returned coefficients live in standard coordinates: the interpolant in
    domain coordinates is ``w -> cheb_eval(d, focal_affine_inv(foci, w))``.
    """
    grid = cheb_nodes(n)
    return cheb_transform(_samples(f, focal_affine(foci, grid.nodes)))


def project_equi(f: Callable, n: int) -> LaurentCoeffs:
    return laurent_transform(_samples(f, equi_nodes(n).nodes))


def _check_radii(r: float, R: float, n: int):
    if not 1 < r < R:
        raise ConfigError(f"need 1 < r < R, got r={r}, R={R}")
    if n < 1:
        raise ConfigError(f"need n >= 1, got {n}")


def bound_constant(r: float, R: float) -> float:
    """``c_{r,R} = sinh(log R) / (cosh(log R) - cosh(log r))``."""
    lr, lR = np.log(r), np.log(R)
    return float(np.sinh(lR) / (np.cosh(lR) - np.cosh(lr)))


def _cosh_over_sinh(a: float, b: float) -> float:
    # cosh(a)/sinh(b) for b > a >= 0 without overflow at large n
    return float(0.5 * (np.exp(a - b) + np.exp(-a - b)) / (0.5 * (1 - np.exp(-2 * b))))


def embedding_error_bound(r: float, R: float, n: int) -> float:
    """Bound on ``||J - P||`` from ``H^inf`` of the big domain into the small one.

    Valid for both the equidistant projection on annuli and the Chebyshev
    projection on confocal ellipses.
    """
    _check_radii(r, R, n)
    return bound_constant(r, R) * _cosh_over_sinh(n * np.log(r), n * np.log(R))


def projection_norm_bound(r: float, R: float, n: int) -> float:
    _check_radii(r, R, n)
    lR, lr = n * np.log(R), n * np.log(r)
    return bound_constant(r, R) * (_cosh_over_sinh(lR, lR) + _cosh_over_sinh(lr, lR))
