"""Aleksandrov bodies A[w] = {x : <x, theta_j> <= w_j for every node}.

A[w] is computed as the polar of conv{theta_j / w_j}: each facet a.y + b = 0 of that
hull (unit outward normal a, offset b < 0) is the polar of the vertex a / (-b).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sparse
from numpy.typing import NDArray
from scipy.sparse.csgraph import connected_components
from scipy.spatial import ConvexHull, QhullError, cKDTree

from hbm.common.errors import InputError, WulffError
from hbm.geometry.fields import SupportField
from hbm.sphere.grids import SphereGrid

logger = logging.getLogger(__name__)

Array = NDArray[np.float64]

COLLINEAR_EPS = 1e-12
DEFAULT_SUPPORT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class WulffShape:
    grid: SphereGrid
    values: Array
    vertices: Array
    volume: float

    @property
    def dim(self) -> int:
        return self.grid.dim

    def support(self, x: Array) -> Array:
        return (np.atleast_2d(x) @ self.vertices.T).max(axis=1)

    @property
    def support_values(self) -> Array:
        return self.support(self.grid.nodes)

    @property
    def field(self) -> SupportField:
        return SupportField.from_values(self.grid, self.support_values)


@dataclass(frozen=True)
class SupportCheck:
    is_support: bool
    gap: float
    worst_node: int


def _merge_close(points: Array) -> Array:
    scale = float(np.abs(points).max())
    pairs = cKDTree(points).query_pairs(COLLINEAR_EPS * scale, output_type="ndarray")
    graph = sparse.coo_matrix(
        (np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])),
        shape=(len(points), len(points)),
    )
    count, labels = connected_components(graph, directed=False)
    merged = np.zeros((count, points.shape[1]))
    np.add.at(merged, labels, points)
    return merged / np.bincount(labels, minlength=count)[:, None]


def _order(vertices: Array) -> Array:
    if vertices.shape[1] == 2:  # noqa: PLR2004
        angles = np.arctan2(vertices[:, 1], vertices[:, 0])
        return vertices[np.argsort(angles, kind="stable")]
    return vertices[np.lexsort(vertices.T[::-1])]


def wulff_body(values: Array, grid: SphereGrid) -> WulffShape:
    """Vertices (counter-clockwise for n=2, lexicographic for n=3) and volume of A[w]."""
    values = np.asarray(values, dtype=float)
    if values.shape != (grid.size,):
        msg = f"expected {grid.size} Wulff values, got shape {values.shape}"
        raise InputError(msg)
    if not np.all(values > 0):
        worst = int(np.argmin(values))
        msg = f"Wulff values must be positive; node {worst} has {values[worst]:.6g}"
        raise InputError(msg)

    try:
        polar = ConvexHull(grid.nodes / values[:, None])
    except QhullError as exc:
        msg = f"degenerate Wulff hull on {grid.descriptor}: {exc}"
        raise WulffError(msg) from exc
    normals, offsets = polar.equations[:, :-1], polar.equations[:, -1]
    if np.any(offsets >= -COLLINEAR_EPS):
        msg = "origin is not interior to the polar hull; A[w] is unbounded"
        raise WulffError(msg)
    vertices = _order(_merge_close(normals / -offsets[:, None]))

    try:
        volume = float(ConvexHull(vertices).volume)
    except QhullError as exc:
        msg = f"degenerate Wulff body on {grid.descriptor}: {exc}"
        raise WulffError(msg) from exc
    logger.debug(
        "Wulff body on %s: %d vertices, volume %.12g",
        grid.descriptor,
        len(vertices),
        volume,
    )
    return WulffShape(grid=grid, values=values, vertices=vertices, volume=volume)


def p_combination(h0: SupportField, h1: SupportField, lam: float, p: float) -> Array:
    """Nodewise ((1-lam) h0^p + lam h1^p)^(1/p); the geometric mean at p = 0."""
    h0.grid.check_same(h1.grid)
    if not 0 <= lam <= 1:
        msg = f"lambda must lie in [0, 1], got {lam}"
        raise InputError(msg)
    if lam == 0:
        return h0.h.copy()
    if lam == 1:
        return h1.h.copy()
    if p == 0:
        return h0.h ** (1 - lam) * h1.h**lam
    return ((1 - lam) * h0.h**p + lam * h1.h**p) ** (1 / p)


def wulff_is_support(
    values: Array,
    grid: SphereGrid,
    tol: float = DEFAULT_SUPPORT_TOL,
) -> tuple[SupportCheck, WulffShape]:
    """Whether w is the support function of A[w], up to ``tol`` relative gap."""
    shape = wulff_body(values, grid)
    gap = (shape.values - shape.support_values) / shape.values
    worst = int(np.argmax(gap))
    check = SupportCheck(
        is_support=bool(gap[worst] <= tol),
        gap=float(max(gap[worst], 0.0)),
        worst_node=worst,
    )
    return check, shape
