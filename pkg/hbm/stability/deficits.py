"""Planar deficit triple delta, beta, A and the homothety ratio sigma."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from shapely import affinity
from shapely.geometry import Polygon

from hbm.boundary.planar import PlanarBoundary, planar_boundary, polygon_vertices
from hbm.common.errors import InputError
from hbm.config.numerics import POLYGON_SAMPLES
from hbm.geometry.bodies import BodySpec
from hbm.stability.margins import bm_deficit

logger = logging.getLogger(__name__)

Array = NDArray[np.float64]

SYMMETRY_RTOL = 1e-12
SYMMETRY_DIRECTIONS = 64
SEARCH_MAX_STEPS = 80
SEARCH_MIN_STEP = 1e-7


@dataclass(frozen=True)
class DeficitReport:
    delta: float
    beta: float
    asymmetry: float
    sigma: float
    translation: tuple[float, float]
    asymmetry_is_upper_bound: bool

    @property
    def fmp_ratio(self) -> float | None:
        """A^2/delta; no verdict is attached, as the constant relating them is unknown."""
        return self.asymmetry**2 / self.delta if self.delta > 0 else None

    def to_dict(self) -> dict[str, object]:
        return {
            "delta": self.delta,
            "beta": self.beta,
            "A": self.asymmetry,
            "sigma": self.sigma,
            "fmp_ratio": self.fmp_ratio,
            "translation": list(self.translation),
            "A_is_upper_bound": self.asymmetry_is_upper_bound,
        }


def _planar(spec: BodySpec) -> None:
    if spec.dim != 2:  # noqa: PLR2004
        msg = f"deficits are planar; {spec.describe()} has dimension {spec.dim}"
        raise InputError(msg)


def is_symmetric(spec: BodySpec) -> bool:
    phi = 2 * np.pi * (np.arange(SYMMETRY_DIRECTIONS) + 0.5) / SYMMETRY_DIRECTIONS
    directions = np.column_stack([np.cos(phi), np.sin(phi)])
    forward, backward = spec.support(directions), spec.support(-directions)
    tolerance = SYMMETRY_RTOL * np.abs(forward).max()
    return bool(np.all(np.abs(forward - backward) <= tolerance))


def anisotropic_perimeter(boundary: PlanarBoundary, gauge: BodySpec) -> float:
    """P_L(K) = int_{dK} h_L(nu) dx."""
    return boundary.integrate(gauge.support(boundary.normals))


def _polygon(spec: BodySpec, samples: int) -> Polygon:
    polygon = Polygon(polygon_vertices(spec, samples))
    if not polygon.is_valid or polygon.area <= 0:
        msg = f"polygonization of {spec.describe()} with {samples} samples is degenerate"
        raise InputError(msg)
    return polygon


def _symmetric_difference(first: Polygon, second: Polygon) -> float:
    return first.area + second.area - 2 * first.intersection(second).area


def _translation_search(
    first: Polygon,
    second: Polygon,
) -> tuple[float, tuple[float, float]]:
    """Pattern search over translations of ``second`` on a shrinking 3x3 stencil."""

    def objective(offset: tuple[float, float]) -> float:
        return _symmetric_difference(first, affinity.translate(second, *offset))

    center = (first.centroid.x - second.centroid.x, first.centroid.y - second.centroid.y)
    best = objective(center)
    step = math.sqrt(first.area) / 4
    for _ in range(SEARCH_MAX_STEPS):
        if step < SEARCH_MIN_STEP:
            break
        candidates = [
            (center[0] + i * step, center[1] + j * step)
            for i in (-1, 0, 1)
            for j in (-1, 0, 1)
            if i or j
        ]
        values = [objective(candidate) for candidate in candidates]
        index = int(np.argmin(values))
        if values[index] < best:
            best, center = values[index], candidates[index]
        else:
            step /= 2
    return best, center


def deficits(
    first: BodySpec,
    second: BodySpec,
    samples: int = POLYGON_SAMPLES,
) -> DeficitReport:
    """delta, beta, A and sigma of the planar pair K = ``first``, L = ``second``.

    delta and beta come from the boundary quadrature of K and L; A from convex polygon
    clipping of K against the homothet rL with V(rL) = V(K). For non-symmetric pairs
    the translation is searched, and the result only bounds A from above.
    """
    _planar(first)
    _planar(second)
    boundary_k, boundary_l = planar_boundary(first), planar_boundary(second)
    volume_k, volume_l = boundary_k.volume, boundary_l.volume
    perimeter = anisotropic_perimeter(boundary_k, second)

    delta = perimeter / (2 * math.sqrt(volume_l * volume_k)) - 1
    # V(K + L) = V(K) + 2 V(K, L) + V(L) with 2 V(K, L) = P_L(K)
    beta = bm_deficit(volume_k, volume_l, volume_k + perimeter + volume_l, 2)

    ratio = math.sqrt(volume_k / volume_l)
    polygon_k = _polygon(first, samples)
    polygon_l = affinity.scale(_polygon(second, samples), ratio, ratio, origin=(0, 0))
    symmetric = is_symmetric(first) and is_symmetric(second)
    if symmetric:
        difference, offset = _symmetric_difference(polygon_k, polygon_l), (0.0, 0.0)
    else:
        difference, offset = _translation_search(polygon_k, polygon_l)
    asymmetry = max(difference, 0.0) / polygon_k.area

    report = DeficitReport(
        delta=delta,
        beta=beta,
        asymmetry=asymmetry,
        sigma=max(ratio, 1 / ratio),
        translation=offset,
        asymmetry_is_upper_bound=not symmetric,
    )
    logger.debug(
        "Deficits of %s against %s: delta=%.6g beta=%.6g A=%.6g",
        first.describe(),
        second.describe(),
        delta,
        beta,
        asymmetry,
    )
    return report
