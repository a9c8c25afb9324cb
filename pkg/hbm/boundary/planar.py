"""Boundaries of planar bodies with arclength quadrature.

Interior integrals use the cone decomposition from the origin,

    int_K f dx = int_{dK} <x, nu> int_0^1 f(t x) t dt ds,

so one boundary rule plus a Gauss rule in t integrates polynomials exactly on
polygons.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from numpy.polynomial.legendre import leggauss
from numpy.typing import NDArray

from hbm.common.errors import ConvexityError, InputError
from hbm.config.numerics import EDGE_GAUSS_POINTS, WEINGARTEN_SAMPLES
from hbm.geometry.bodies import BodySpec, LinearImage, Lq, PlanarAngleBody, Wulff
from hbm.geometry.fields import sample_field
from hbm.sphere.grids import build_circle_grid

logger = logging.getLogger(__name__)

Array = NDArray[np.float64]


class BoundaryKind(str, Enum):
    POLYGON = "polygon"
    SMOOTH = "smooth"


def gauss_unit(points: int) -> tuple[Array, Array]:
    """Gauss-Legendre nodes and weights on [0, 1]."""
    nodes, weights = leggauss(points)
    return (nodes + 1) / 2, weights / 2


@dataclass(frozen=True, eq=False)
class PlanarBoundary:
    """Quadrature samples on the boundary of a planar body.

    ``weights`` are arclength weights; ``support`` is <x, nu>. Smooth boundaries
    also carry the Weingarten angles ``phi``, the radius of curvature
    ``rho = h'' + h`` and h itself at those angles.
    """

    kind: BoundaryKind
    points: Array
    normals: Array
    weights: Array
    vertices: Array | None = None
    gauss_points: int | None = None
    phi: Array | None = None
    rho: Array | None = None
    h: Array | None = None

    def __post_init__(self) -> None:
        worst = int(np.argmin(self.support))
        if not self.support[worst] > 0:
            msg = (
                f"origin is not interior: <x, nu> = {self.support[worst]:.3e} "
                f"at sample {worst}"
            )
            raise ConvexityError(msg, node=worst)

    @property
    def support(self) -> Array:
        return np.einsum("si,si->s", self.points, self.normals)

    @property
    def tangents(self) -> Array:
        return np.column_stack([-self.normals[:, 1], self.normals[:, 0]])

    @property
    def curvature(self) -> Array | None:
        return None if self.rho is None else 1 / self.rho

    @property
    def length(self) -> float:
        return float(self.weights.sum())

    @property
    def volume(self) -> float:
        return float(self.weights @ self.support) / 2

    def integrate(self, values: Array) -> float:
        return float(self.weights @ values)

    def interior_rule(self, radial_points: int) -> tuple[Array, Array]:
        """Points and weights integrating over the body via the cone decomposition."""
        t, t_weights = gauss_unit(radial_points)
        points = t[:, None, None] * self.points[None, :, :]
        weights = (t * t_weights)[:, None] * (self.support * self.weights)[None, :]
        return points.reshape(-1, 2), weights.reshape(-1)

    def with_gauss_points(self, points: int) -> PlanarBoundary:
        if self.kind is not BoundaryKind.POLYGON or self.vertices is None:
            return self
        if self.gauss_points is not None and self.gauss_points >= points:
            return self
        return polygon_boundary(self.vertices, points)


def polygon_boundary(
    vertices: Array,
    gauss_points: int = EDGE_GAUSS_POINTS,
) -> PlanarBoundary:
    vertices = np.asarray(vertices, dtype=float)
    if vertices.ndim != 2 or vertices.shape[1] != 2 or len(vertices) < 3:  # noqa: PLR2004
        msg = f"polygon needs at least 3 planar vertices, got shape {vertices.shape}"
        raise InputError(msg)
    edges = np.roll(vertices, -1, axis=0) - vertices
    following = np.roll(edges, -1, axis=0)
    turns = edges[:, 0] * following[:, 1] - edges[:, 1] * following[:, 0]
    if np.all(turns < 0):
        vertices = vertices[::-1]
        edges = np.roll(vertices, -1, axis=0) - vertices
    elif not np.all(turns > 0):
        worst = int(np.argmin(np.abs(turns)))
        msg = f"polygon is not strictly convex at vertex {(worst + 1) % len(vertices)}"
        raise ConvexityError(msg, node=(worst + 1) % len(vertices))
    lengths = np.linalg.norm(edges, axis=1)
    tangents = edges / lengths[:, None]
    normals = np.column_stack([tangents[:, 1], -tangents[:, 0]])

    s, s_weights = gauss_unit(gauss_points)
    points = vertices[:, None, :] + s[None, :, None] * edges[:, None, :]
    return PlanarBoundary(
        kind=BoundaryKind.POLYGON,
        points=points.reshape(-1, 2),
        normals=np.repeat(normals, gauss_points, axis=0),
        weights=(lengths[:, None] * s_weights[None, :]).reshape(-1),
        vertices=vertices,
        gauss_points=gauss_points,
    )


def _angular_data(spec: BodySpec, samples: int) -> tuple[Array, Array, Array, Array]:
    grid = build_circle_grid(samples)
    phi = grid.angles
    if isinstance(spec, PlanarAngleBody):
        h, h1, h2 = spec.angular(phi)
        return phi, h, h1, h2 + h
    field = sample_field(spec, grid)
    if field.grad_h is None or field.d2h is None:  # pragma: no cover
        msg = f"{spec.describe()} has no curvature data"
        raise InputError(msg)
    return phi, field.h, field.grad_h[:, 0], field.d2h[:, 0, 0]


def smooth_boundary(spec: BodySpec, samples: int = WEINGARTEN_SAMPLES) -> PlanarBoundary:
    """Weingarten samples x(phi) = h theta + h' theta^perp with ds = (h'' + h) d phi."""
    if spec.dim != 2 or not spec.smooth:  # noqa: PLR2004
        msg = f"{spec.describe()} is not a smooth planar body"
        raise InputError(msg)
    phi, h, h1, rho = _angular_data(spec, samples)
    theta = np.column_stack([np.cos(phi), np.sin(phi)])
    perp = np.column_stack([-np.sin(phi), np.cos(phi)])
    return PlanarBoundary(
        kind=BoundaryKind.SMOOTH,
        points=h[:, None] * theta + h1[:, None] * perp,
        normals=theta,
        weights=rho * (2 * math.pi / samples),
        phi=phi,
        rho=rho,
        h=h,
    )


def polygon_vertices(spec: BodySpec, samples: int = WEINGARTEN_SAMPLES) -> Array:
    """Counter-clockwise vertices: exact for polygonal bodies, inscribed otherwise."""
    if isinstance(spec, Lq) and spec.dim == 2 and spec.is_polygonal:  # noqa: PLR2004
        if math.isinf(spec.q):
            return np.array([[1.0, -1.0], [1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0]])
        return np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])
    if isinstance(spec, LinearImage) and not spec.base.smooth:
        mapped = polygon_vertices(spec.base, samples) @ spec.matrix.T
        return mapped if np.linalg.det(spec.matrix) > 0 else mapped[::-1]
    if isinstance(spec, Wulff):
        shaped = spec if spec.shape is not None else spec.construct()
        if shaped.shape is not None:
            return shaped.shape.vertices
    return smooth_boundary(spec, samples).points


def planar_boundary(spec: BodySpec, samples: int = WEINGARTEN_SAMPLES) -> PlanarBoundary:
    """Polygon boundary for polytopes, Weingarten samples for smooth bodies."""
    if spec.dim != 2:  # noqa: PLR2004
        msg = (
            f"boundary quadrature is planar only; "
            f"{spec.describe()} has dimension {spec.dim}"
        )
        raise InputError(msg)
    if spec.smooth:
        return smooth_boundary(spec, samples)
    return polygon_boundary(polygon_vertices(spec, samples))


def polygonize(spec: BodySpec, samples: int) -> PlanarBoundary:
    """Inscribed polygon through ``samples`` boundary points of a smooth body."""
    boundary = polygon_boundary(polygon_vertices(spec, samples))
    logger.debug("Polygonized %s with %d vertices", spec.describe(), samples)
    return boundary
