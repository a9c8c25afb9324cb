from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sparse
from numpy.typing import NDArray

from hbm.common.errors import GridError
from hbm.sphere.grids import SphereGrid

# staggered first difference and midpoint interpolation stencils, offsets -1..2
_STENCILS = {
    2: (np.array([0.0, -1.0, 1.0, 0.0]), np.array([0.0, 0.5, 0.5, 0.0])),
    4: (
        np.array([1.0, -27.0, 27.0, -1.0]) / 24,
        np.array([-1.0, 9.0, 9.0, -1.0]) / 16,
    ),
}


@dataclass(frozen=True)
class CircleDifferences:
    """Node -> midpoint operators on the periodic circle grid.

    ``derivative`` maps node values z_j to z' at phi_{j+1/2}; ``average`` maps node
    values to the same midpoints.
    """

    derivative: sparse.csr_matrix
    average: sparse.csr_matrix
    spacing: float
    order: int


@dataclass(frozen=True)
class TriangleGradients:
    """Per-triangle constant gradients of the piecewise-linear interpolant.

    ``basis`` has shape (t, 3, 3): row i is the ambient gradient of the hat function of
    the triangle's i-th vertex.
    """

    basis: NDArray[np.float64]
    triangles: NDArray[np.intp]
    areas: NDArray[np.float64]

    def apply(self, values: NDArray[np.float64]) -> NDArray[np.float64]:
        return np.einsum("tij,ti->tj", self.basis, values[self.triangles])


def _periodic(n_nodes: int, coefficients: NDArray[np.float64]) -> sparse.csr_matrix:
    rows = np.repeat(np.arange(n_nodes), coefficients.size)
    cols = (np.arange(n_nodes)[:, None] + np.arange(-1, coefficients.size - 1)) % n_nodes
    data = np.tile(coefficients, n_nodes)
    keep = data != 0
    return sparse.csr_matrix(
        (data[keep], (rows[keep], cols.reshape(-1)[keep])),
        shape=(n_nodes, n_nodes),
    )


def circle_differences(grid: SphereGrid, order: int = 2) -> CircleDifferences:
    if grid.dim != 2:  # noqa: PLR2004
        msg = "circle differences need an S^1 grid"
        raise GridError(msg)
    if order not in _STENCILS:
        msg = f"difference order must be one of {sorted(_STENCILS)}, got {order}"
        raise GridError(msg)
    difference, average = _STENCILS[order]
    return CircleDifferences(
        derivative=_periodic(grid.size, difference / grid.spacing),
        average=_periodic(grid.size, average),
        spacing=grid.spacing,
        order=order,
    )


def triangle_gradients(grid: SphereGrid) -> TriangleGradients:
    if grid.triangles is None or grid.triangle_areas is None:
        msg = "triangle gradients need an S^2 mesh"
        raise GridError(msg)
    p = grid.nodes[grid.triangles]
    normal = np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0])
    twice_area = np.linalg.norm(normal, axis=1, keepdims=True)
    normal /= twice_area
    # grad lambda_i = n x (p_{i+2} - p_{i+1}) / (2 area)
    basis = np.stack(
        [np.cross(normal, p[:, (i + 2) % 3] - p[:, (i + 1) % 3]) for i in range(3)],
        axis=1,
    ) / twice_area[:, :, None]
    return TriangleGradients(
        basis=basis,
        triangles=grid.triangles,
        areas=grid.triangle_areas,
    )


def derivative_matrices(
    grid: SphereGrid,
    order: int = 2,
) -> CircleDifferences | TriangleGradients:
    if grid.dim == 2:  # noqa: PLR2004
        return circle_differences(grid, order)
    return triangle_gradients(grid)


def antipodal_permutation(grid: SphereGrid) -> sparse.csr_matrix:
    n = grid.size
    return sparse.csr_matrix((np.ones(n), (np.arange(n), grid.antipodal)), shape=(n, n))


def even_projector(grid: SphereGrid) -> sparse.csr_matrix:
    """P z(theta) = (z(theta) + z(-theta)) / 2."""
    identity = sparse.identity(grid.size, format="csr")
    return ((identity + antipodal_permutation(grid)) * 0.5).tocsr()


def even_quotient(grid: SphereGrid) -> sparse.csr_matrix:
    """Lift from antipodal-pair representatives to all nodes, shape (m, m/2).

    Representatives are the lower index of each pair, in increasing order.
    """
    representatives = np.flatnonzero(np.arange(grid.size) < grid.antipodal)
    column = np.empty(grid.size, dtype=np.intp)
    column[representatives] = np.arange(representatives.size)
    column[grid.antipodal[representatives]] = np.arange(representatives.size)
    return sparse.csr_matrix(
        (np.ones(grid.size), (np.arange(grid.size), column)),
        shape=(grid.size, representatives.size),
    )
