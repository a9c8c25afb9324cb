from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numpy.typing import NDArray
from scipy.spatial import cKDTree
from scipy.spatial.transform import Rotation

from hbm.common.errors import GridError

logger = logging.getLogger(__name__)

MAX_LEVEL = 7
MIN_CIRCLE_NODES = 16
AXIS_CLEARANCE = 1e-3
# fixed rotation keeping icosphere vertices off the coordinate axes
MESH_ROTATION = (0.1, 0.2, 0.3)

_GRID_PATTERN = re.compile(r"^s(?P<sphere>[12]):(?P<key>[NL])=(?P<value>\d+)$")


@dataclass(frozen=True, eq=False)
class SphereGrid:
    """Discretization of S^1 (offset periodic grid) or S^2 (rotated icosphere).

    ``resolution`` is N for the circle and the subdivision level L for the icosphere.
    Triangle data is only present for n=3.
    """

    dim: int
    resolution: int
    nodes: NDArray[np.float64]
    weights: NDArray[np.float64]
    antipodal: NDArray[np.intp]
    tangent_frames: NDArray[np.float64]
    triangles: NDArray[np.intp] | None = None
    triangle_areas: NDArray[np.float64] | None = None

    @property
    def size(self) -> int:
        return int(self.nodes.shape[0])

    @property
    def descriptor(self) -> str:
        if self.dim == 2:  # noqa: PLR2004
            return f"s1:N={self.resolution}"
        return f"s2:L={self.resolution}"

    @property
    def spacing(self) -> float:
        """Angular step of the circle grid."""
        if self.dim != 2:  # noqa: PLR2004
            msg = "spacing is only defined on the circle grid"
            raise GridError(msg)
        return 2 * np.pi / self.resolution

    @property
    def angles(self) -> NDArray[np.float64]:
        return 2 * np.pi * (np.arange(self.resolution) + 0.5) / self.resolution

    def matches(self, other: SphereGrid) -> bool:
        return self is other or (
            self.dim == other.dim and self.resolution == other.resolution
        )

    def check_same(self, *others: SphereGrid) -> None:
        for other in others:
            if not self.matches(other):
                msg = f"grid mismatch: {self.descriptor} vs {other.descriptor}"
                raise GridError(msg)

    def min_axis_distance(self) -> float:
        """Smallest angle between a node and a coordinate axis."""
        cosines = np.clip(np.abs(self.nodes).max(axis=1), -1.0, 1.0)
        return float(np.arccos(cosines).min())

    def metadata(self) -> dict[str, object]:
        return {"grid": self.descriptor, "nodes": self.size}


def tangent_frame(theta: NDArray[np.float64]) -> NDArray[np.float64]:
    """Orthonormal tangent basis at each unit vector, shape (m, n, n-1)."""
    theta = np.atleast_2d(theta)
    if theta.shape[1] == 2:  # noqa: PLR2004
        return np.stack([-theta[:, 1], theta[:, 0]], axis=1)[:, :, None]
    helper = np.zeros_like(theta)
    helper[np.arange(theta.shape[0]), np.abs(theta).argmin(axis=1)] = 1.0
    first = np.cross(helper, theta)
    first /= np.linalg.norm(first, axis=1, keepdims=True)
    second = np.cross(theta, first)
    return np.stack([first, second], axis=2)


def build_circle_grid(n_nodes: int) -> SphereGrid:
    if n_nodes % 2 or n_nodes < MIN_CIRCLE_NODES:
        msg = f"circle grid needs an even N >= {MIN_CIRCLE_NODES}, got {n_nodes}"
        raise GridError(msg)
    phi = 2 * np.pi * (np.arange(n_nodes) + 0.5) / n_nodes
    nodes = np.column_stack([np.cos(phi), np.sin(phi)])
    return SphereGrid(
        dim=2,
        resolution=n_nodes,
        nodes=nodes,
        weights=np.full(n_nodes, 2 * np.pi / n_nodes),
        antipodal=(np.arange(n_nodes) + n_nodes // 2) % n_nodes,
        tangent_frames=tangent_frame(nodes),
    )


def _icosahedron() -> tuple[NDArray[np.float64], NDArray[np.intp]]:
    s, c = 2 / np.sqrt(5), 1 / np.sqrt(5)
    upper = [i * 2 * np.pi / 5 - np.pi / 5 for i in range(5)]
    lower = [-i * 2 * np.pi / 5 + 4 * np.pi / 5 for i in range(5)]
    top = [(0.0, 0.0, 1.0)] + [(s * np.cos(a), s * np.sin(a), c) for a in upper]
    bottom = [(0.0, 0.0, -1.0)] + [(s * np.cos(a), s * np.sin(a), -c) for a in lower]
    points = np.array(top + bottom)
    triangles = np.array(
        [(0, i + 1, (i + 1) % 5 + 1) for i in range(5)]
        + [(6, i + 7, (i + 1) % 5 + 7) for i in range(5)]
        + [(i + 1, (i + 1) % 5 + 1, (7 - i) % 5 + 7) for i in range(5)]
        + [(i + 1, (7 - i) % 5 + 7, (8 - i) % 5 + 7) for i in range(5)],
    )
    return points, _orient_outward(points, triangles)


def _orient_outward(
    points: NDArray[np.float64],
    triangles: NDArray[np.intp],
) -> NDArray[np.intp]:
    p0, p1, p2 = (points[triangles[:, i]] for i in range(3))
    flip = np.einsum("ij,ij->i", np.cross(p1 - p0, p2 - p0), p0 + p1 + p2) < 0
    triangles = triangles.copy()
    triangles[flip] = triangles[flip][:, [0, 2, 1]]
    return triangles


def _subdivide(
    points: NDArray[np.float64],
    triangles: NDArray[np.intp],
) -> tuple[NDArray[np.float64], NDArray[np.intp]]:
    edges = np.concatenate(
        [triangles[:, [0, 1]], triangles[:, [1, 2]], triangles[:, [2, 0]]],
    )
    unique_edges, inverse = np.unique(np.sort(edges, axis=1), axis=0, return_inverse=True)
    midpoints = points[unique_edges[:, 0]] + points[unique_edges[:, 1]]
    midpoints /= np.linalg.norm(midpoints, axis=1, keepdims=True)
    offset = points.shape[0]
    n_tri = triangles.shape[0]
    inverse = inverse.reshape(-1)
    ab, bc, ca = (offset + inverse[k * n_tri : (k + 1) * n_tri] for k in range(3))
    a, b, c = triangles[:, 0], triangles[:, 1], triangles[:, 2]
    refined = np.concatenate(
        [
            np.column_stack([a, ab, ca]),
            np.column_stack([b, bc, ab]),
            np.column_stack([c, ca, bc]),
            np.column_stack([ab, bc, ca]),
        ],
    )
    return np.vstack([points, midpoints]), refined


def _antipodal_pairing(nodes: NDArray[np.float64]) -> NDArray[np.intp]:
    distance, index = cKDTree(nodes).query(-nodes)
    index = np.asarray(index, dtype=np.intp)
    if (
        float(np.max(distance)) > 1e-9  # noqa: PLR2004
        or np.any(index[index] != np.arange(nodes.shape[0]))
        or np.any(index == np.arange(nodes.shape[0]))
    ):
        msg = "icosphere antipodal pairing failed after rotation"
        raise GridError(msg)
    return index


def build_icosphere(level: int) -> SphereGrid:
    if not 0 <= level <= MAX_LEVEL:
        msg = f"icosphere level must be in 0..{MAX_LEVEL}, got {level}"
        raise GridError(msg)
    points, triangles = _icosahedron()
    for _ in range(level):
        points, triangles = _subdivide(points, triangles)

    rotation = Rotation.from_euler("xyz", MESH_ROTATION)
    points = rotation.apply(points)

    p0, p1, p2 = (points[triangles[:, i]] for i in range(3))
    areas = 0.5 * np.linalg.norm(np.cross(p1 - p0, p2 - p0), axis=1)
    weights = np.bincount(
        triangles.reshape(-1),
        weights=np.repeat(areas / 3, 3),
        minlength=len(points),
    )

    grid = SphereGrid(
        dim=3,
        resolution=level,
        nodes=points,
        weights=weights,
        antipodal=_antipodal_pairing(points),
        tangent_frames=tangent_frame(points),
        triangles=triangles,
        triangle_areas=areas,
    )
    clearance = grid.min_axis_distance()
    if clearance < AXIS_CLEARANCE:
        msg = (
            f"icosphere L={level} has a vertex {clearance:.2e} rad "
            "from a coordinate axis"
        )
        raise GridError(msg)
    logger.debug(
        "Built icosphere L=%d: %d vertices, %d triangles, weight deficit %.2e, "
        "axis clearance %.2e",
        level,
        grid.size,
        triangles.shape[0],
        1 - weights.sum() / (4 * np.pi),
        clearance,
    )
    return grid


def parse_grid(descriptor: str) -> SphereGrid:
    """Parse ``s1:N=<int>`` or ``s2:L=<int>``."""
    match = _GRID_PATTERN.match(descriptor.strip())
    if match is None:
        msg = f"invalid grid descriptor {descriptor!r}; expected s1:N=<int> or s2:L=<int>"
        raise GridError(msg)
    sphere, key, value = match["sphere"], match["key"], int(match["value"])
    if sphere == "1" and key == "N":
        return build_circle_grid(value)
    if sphere == "2" and key == "L":
        return build_icosphere(value)
    msg = f"grid descriptor {descriptor!r} mixes s{sphere} with {key}"
    raise GridError(msg)


def dump_mesh(grid: SphereGrid, path: Path) -> None:
    """Write "x y z w" vertex lines followed by "i j k" triangle lines."""
    lines = [
        " ".join(repr(float(x)) for x in (*node, weight))
        for node, weight in zip(grid.nodes, grid.weights, strict=True)
    ]
    if grid.triangles is not None:
        lines.extend(" ".join(str(int(i)) for i in tri) for tri in grid.triangles)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
