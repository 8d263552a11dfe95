"""Elliptic and annular domains and the confocal contraction search.

An elliptic domain ``E_{gamma,rho}`` is the image of the standard ellipse
``E_rho = sigma(A_rho)`` (foci ``+-1``) under the affine map
``alpha_gamma(z) = (g+ - g-)/2 z + (g+ + g-)/2`` that sends ``1 -> g+`` and
``-1 -> g-``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from holotransfer.errors import ConfigError, NumericalError, ValidationError

log = logging.getLogger(__name__)

DEFAULT_SAMPLES = 1024

Foci = tuple[complex, complex]


@dataclass(frozen=True)
class EllipticDomain:
    foci: Foci
    rho: float

    def __post_init__(self):
        gp, gm = (complex(g) for g in self.foci)
        if gp == gm:
            raise ConfigError("foci of an elliptic domain must be distinct")
        if not self.rho > 1:
            raise ConfigError(f"ellipse parameter must exceed 1, got {self.rho}")
        object.__setattr__(self, "foci", (gp, gm))
        object.__setattr__(self, "rho", float(self.rho))

    @property
    def semi_axes(self) -> tuple[float, float]:
        """Semi-axes of the standard-coordinates ellipse."""
        t = np.log(self.rho)
        return float(np.cosh(t)), float(np.sinh(t))

    def boundary(self, samples: int = DEFAULT_SAMPLES) -> np.ndarray:
        t = np.arange(samples) / samples
        return focal_affine(self.foci, joukowski(self.rho * np.exp(2j * np.pi * t)))


@dataclass(frozen=True)
class AnnularDomain:
    rho: float

    def __post_init__(self):
        if not self.rho > 1:
            raise ConfigError(f"annulus parameter must exceed 1, got {self.rho}")


@dataclass(frozen=True)
class ContractionReport:
    R_star: float
    r_star: float
    ratio: float
    samples_per_boundary: int


def joukowski(z):
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0):
        raise ValidationError("the Joukowski map is undefined at 0")
    out = 0.5 * (z + 1.0 / z)
    return out[()] if out.ndim == 0 else out


def _check_foci(foci) -> tuple[complex, complex]:
    gp, gm = complex(foci[0]), complex(foci[1])
    if gp == gm:
        raise ConfigError("degenerate foci: gamma+ == gamma-")
    return gp, gm


def focal_affine(foci, z):
    """Standard coordinates -> domain coordinates (``[-1, 1] -> [g-, g+]``)."""
    gp, gm = _check_foci(foci)
    return 0.5 * (gp - gm) * np.asarray(z) + 0.5 * (gp + gm)


def focal_affine_inv(foci, w):
    gp, gm = _check_foci(foci)
    return (np.asarray(w) - 0.5 * (gp + gm)) / (0.5 * (gp - gm))


def elliptic_radius(w):
    """Smallest ``rho >= 1`` with ``w`` in the closure of ``E_rho``.

    Either square root of ``w^2 - 1`` works: the two candidates ``w +- s`` have
    reciprocal moduli, so the larger one is the annulus radius.
    """
    w = np.asarray(w, dtype=complex)
    s = np.sqrt(w * w - 1.0)
    out = np.maximum(np.abs(w + s), np.abs(w - s))
    # points of the focal segment sit on the unit circle up to rounding
    out = np.where((w.imag == 0) & (np.abs(w.real) <= 1), 1.0, out)
    return out[()] if out.ndim == 0 else out


def contains(domain: EllipticDomain, point, margin: float = 0.0):
    return elliptic_radius(focal_affine_inv(domain.foci, point)) <= domain.rho - margin


def _map_images(maps: Sequence[Callable], points: np.ndarray) -> np.ndarray:
    images = []
    for i, phi in enumerate(maps):
        with np.errstate(all="ignore"):
            v = np.broadcast_to(np.asarray(phi(points), dtype=complex), points.shape)
        if not np.all(np.isfinite(v)):
            raise NumericalError(f"map {i} is not finite on the sampled boundary")
        images.append(v)
    return np.stack(images)


def image_radius(maps: Sequence[Callable], domain: EllipticDomain, samples: int = DEFAULT_SAMPLES) -> float:
    """Sampled confocal radius of ``union_i maps[i](boundary of domain)``.

    By the maximum principle the sup of the (subharmonic) elliptic radius over
    each image is attained on the image of the boundary curve.
    """
    if samples < 64:
        raise ConfigError("at least 64 boundary samples are required")
    z = domain.boundary(samples)
    images = _map_images(maps, z)
    return float(np.max(elliptic_radius(focal_affine_inv(domain.foci, images))))


def contraction_search(
    maps: Sequence[Callable],
    foci,
    R_grid: Sequence[float],
    samples: int = DEFAULT_SAMPLES,
    admissible: Callable[[EllipticDomain], bool] | None = None,
) -> ContractionReport:
    """Grid search for the confocal pair ``r < R`` minimising ``r / R``.

    Grid points where some map is not finite on the boundary, where
    ``admissible`` rejects the domain, or where ``r >= R`` are skipped.
    """
    R_grid = [float(R) for R in R_grid]
    if not R_grid:
        raise ConfigError("empty R grid")
    best = None
    for R in R_grid:
        domain = EllipticDomain(foci, R)
        if admissible is not None and not admissible(domain):
            continue
        try:
            r = image_radius(maps, domain, samples)
        except NumericalError:
            log.debug("skipping R=%g: map not finite on boundary", R)
            continue
        if r >= R:
            continue
        if best is None or r / R < best[2]:
            best = (R, r, r / R)
    if best is None:
        raise ValidationError("no ellipse in the grid is mapped strictly inside itself")
    return ContractionReport(best[0], max(best[1], 1.0), best[2], samples)


def default_R_grid(lo: float = 1.01, hi: float = 40.0, points: int = 500) -> np.ndarray:
    return np.linspace(lo, hi, points)
