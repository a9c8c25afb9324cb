from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np
import scipy.sparse as sparse
from numpy.typing import NDArray

from hbm.common.errors import ConvexityError, InputError
from hbm.config.numerics import CELL_CORRECTION_LIMIT, CELL_GAUSS_POINTS, FD_STEP
from hbm.geometry.bodies import (
    AXIS_EPS,
    BodySpec,
    MinkowskiSum,
    Sampled,
    Wulff,
    fd_gradient,
    fd_hessian,
    tangent_d2h,
)
from hbm.sphere.grids import SphereGrid

logger = logging.getLogger(__name__)

Array = NDArray[np.float64]

EVEN_RTOL = 1e-9


class DerivativeMethod(str, Enum):
    AUTO = "auto"
    FD = "fd"


class FieldSource(str, Enum):
    ANALYTIC = "analytic"
    FINITE_DIFFERENCE = "finite-difference"
    WULFF = "wulff"


@dataclass(frozen=True, eq=False)
class SupportField:
    """Support function of a body sampled on one grid.

    ``grad_h`` holds tangential components in the grid's tangent frames, shape
    (m, n-1); ``d2h`` the tangent-frame D^2 h, shape (m, n-1, n-1). Fields built
    from Wulff values carry no ``d2h`` and may only fill the last slot of a mixed
    volume.

    On the circle, bodies with an off-grid extension also carry ``surface_cells``
    and ``cone_cells``: dS_K and dV_K integrated over the cell around each node.
    Nodal sampling of det(D^2 h) misses curvature concentrated between nodes.
    """

    grid: SphereGrid
    h: Array
    grad_h: Array | None
    d2h: Array | None
    source: FieldSource
    step: float | None = None
    min_eig: float = float("nan")
    body: BodySpec | None = None
    method: DerivativeMethod = DerivativeMethod.AUTO
    surface_cells: Array | None = None
    cone_cells: Array | None = None

    @property
    def dim(self) -> int:
        return self.grid.dim

    @property
    def has_d2h(self) -> bool:
        return self.d2h is not None

    def require_d2h(self, purpose: str) -> Array:
        if self.d2h is None:
            msg = (
                f"{purpose} needs D2h, but this field was built from "
                f"{self.source.value} values"
            )
            raise InputError(msg)
        return self.d2h

    @property
    def det_d2h(self) -> Array:
        """Surface-area density det(D^2 h) per node.

        On the circle it is the cell average when cell integrals are available.
        """
        d2h = self.require_d2h("det(D2h)")
        if self.dim == 2:  # noqa: PLR2004
            if self.surface_cells is not None:
                return self.surface_cells / self.grid.weights
            return d2h[:, 0, 0]
        return np.linalg.det(d2h)

    @property
    def cone_mass(self) -> Array:
        """dV_K carried by each node, quadrature weight included; sums to the volume."""
        if self.cone_cells is not None:
            return self.cone_cells
        return self.h * self.det_d2h * self.grid.weights / self.dim

    @property
    def ambient_hessian(self) -> Array:
        """Lift of D^2 h back to (m, n, n) ambient matrices annihilating theta."""
        d2h = self.require_d2h("ambient Hessian")
        frames = self.grid.tangent_frames
        return np.einsum("mia,mab,mjb->mij", frames, d2h, frames)

    def centroid_data(self) -> tuple[Array, Array, Array]:
        """Normalised triangle centroids with h and the ambient Hessian there (n=3).

        Bodies with an off-grid extension are evaluated directly; sampled data is
        averaged over the triangle's vertices.
        """
        triangles = self.grid.triangles
        if triangles is None:
            msg = "centroid data needs an S^2 mesh"
            raise InputError(msg)
        centroids = self.grid.nodes[triangles].mean(axis=1)
        centroids /= np.linalg.norm(centroids, axis=1, keepdims=True)
        if self.body is not None and not isinstance(self.body, Sampled | Wulff):
            try:
                h, _, hessian = _evaluate(self.body, centroids, self.method)
            except InputError:
                logger.debug(
                    "No off-grid extension for %s; averaging vertex data",
                    self.body,
                )
            else:
                return centroids, h, hessian
        return (
            centroids,
            self.h[triangles].mean(axis=1),
            self.ambient_hessian[triangles].mean(axis=1),
        )

    def __add__(self, other: SupportField) -> SupportField:
        """Field of the Minkowski sum."""
        self.grid.check_same(other.grid)
        if (
            self.d2h is None
            or other.d2h is None
            or self.grad_h is None
            or other.grad_h is None
        ):
            msg = "Minkowski sums need fields with derivatives"
            raise InputError(msg)
        body = None
        if self.body is not None and other.body is not None:
            body = MinkowskiSum(self.body, other.body)
        d2h = self.d2h + other.d2h
        surface_cells = cone_cells = None
        with_cells = self.surface_cells is not None and other.surface_cells is not None
        if with_cells and body is not None:
            surface_cells, cone_cells = circle_cells(body, self.grid, self.method)
        return SupportField(
            grid=self.grid,
            h=self.h + other.h,
            grad_h=self.grad_h + other.grad_h,
            d2h=d2h,
            source=max(self.source, other.source, key=_source_rank),
            step=self.step or other.step,
            min_eig=_min_eigenvalue(d2h),
            body=body,
            method=self.method,
            surface_cells=surface_cells,
            cone_cells=cone_cells,
        )

    @classmethod
    def from_values(
        cls,
        grid: SphereGrid,
        values: Array,
        source: FieldSource = FieldSource.WULFF,
    ) -> SupportField:
        values = np.asarray(values, dtype=float)
        if values.shape != (grid.size,):
            msg = f"expected {grid.size} node values, got shape {values.shape}"
            raise InputError(msg)
        _check_positive(values, "values")
        return cls(grid=grid, h=values, grad_h=None, d2h=None, source=source)

    def metadata(self) -> dict[str, object]:
        return {
            "body": None if self.body is None else self.body.describe(),
            "source": self.source.value,
            "step": self.step,
            "min_eig": self.min_eig,
            **self.grid.metadata(),
        }


def _source_rank(source: FieldSource) -> int:
    ranks = [FieldSource.ANALYTIC, FieldSource.FINITE_DIFFERENCE, FieldSource.WULFF]
    return ranks.index(source)


def _evaluate(
    body: BodySpec,
    x: Array,
    method: DerivativeMethod,
) -> tuple[Array, Array, Array]:
    h = body.support(x)
    if method is DerivativeMethod.FD:
        gradient = fd_gradient(body.support, x)
        hessian = fd_hessian(lambda y: fd_gradient(body.support, y), x)
    else:
        gradient = body.gradient(x)
        hessian = body.hessian(x)
    return h, gradient, hessian


def _min_eigenvalue(d2h: Array) -> float:
    return float(np.linalg.eigvalsh(d2h).min())


def _check_positive(h: Array, name: str) -> None:
    worst = int(np.argmin(h))
    if not h[worst] > 0:
        msg = f"{name} must be positive; node {worst} has {h[worst]:.6g}"
        raise ConvexityError(msg, node=worst)


def _check_even(grid: SphereGrid, h: Array) -> None:
    gap = np.abs(h - h[grid.antipodal])
    worst = int(np.argmax(gap))
    if gap[worst] > EVEN_RTOL * np.abs(h).max():
        msg = (
            f"support values are not origin-symmetric: node {worst} and its antipode "
            f"differ by {gap[worst]:.3e}"
        )
        raise InputError(msg)


def _check_convex(d2h: Array) -> float:
    smallest = np.linalg.eigvalsh(d2h)[:, 0]
    worst = int(np.argmin(smallest))
    if not smallest[worst] > 0:
        msg = (
            f"D2h is not positive definite at node {worst} "
            f"(smallest eigenvalue {smallest[worst]:.6g})"
        )
        raise ConvexityError(msg, node=worst)
    return float(smallest[worst])


def _angular_data(
    body: BodySpec,
    phi: Array,
    method: DerivativeMethod,
) -> tuple[Array, Array]:
    """h and h' at the angles ``phi``."""
    points = np.column_stack([np.cos(phi), np.sin(phi)])
    points[np.abs(points) < AXIS_EPS] = 0.0
    h = body.support(points)
    if method is DerivativeMethod.FD:
        gradient = fd_gradient(body.support, points)
    else:
        gradient = body.gradient(points)
    return h, gradient[:, 1] * points[:, 0] - gradient[:, 0] * points[:, 1]


def _sharpen(cells: Array) -> Array:
    """Node-centred values from cell integrals.

    The result is 4th order where the integrals are resolved.

    Cells whose correction exceeds CELL_CORRECTION_LIMIT keep their exact integral.
    """
    correction = (np.roll(cells, -1) - 2 * cells + np.roll(cells, 1)) / 24
    resolved = np.abs(correction) <= CELL_CORRECTION_LIMIT * np.abs(cells)
    return np.where(resolved, cells - correction, cells)


def circle_cells(
    body: BodySpec,
    grid: SphereGrid,
    method: DerivativeMethod = DerivativeMethod.AUTO,
) -> tuple[Array, Array]:
    """dS_K and dV_K over the cell [phi_j - step/2, phi_j + step/2] of every node.

    Both follow from h and h' alone:

        int (h'' + h) = [h'] + int h,
        int h (h'' + h) / 2 = ([h h'] + int (h^2 - h'^2)) / 2.
    """
    step = grid.spacing
    edges = step * np.arange(grid.resolution + 1)
    h_edge, dh_edge = _angular_data(body, edges, method)
    abscissae, gauss_weights = np.polynomial.legendre.leggauss(CELL_GAUSS_POINTS)
    phi = grid.angles[:, None] + 0.5 * step * abscissae[None, :]
    h, dh = (
        values.reshape(phi.shape)
        for values in _angular_data(body, phi.reshape(-1), method)
    )
    scale = 0.5 * step * gauss_weights
    surface = np.diff(dh_edge) + h @ scale
    cone = 0.5 * (np.diff(h_edge * dh_edge) + (h**2 - dh**2) @ scale)
    return _sharpen(surface), _sharpen(cone)


def _circle_derivatives(grid: SphereGrid, h: Array) -> tuple[Array, Array]:
    """Periodic 4th-order central differences for h' and h''."""
    step = grid.spacing
    p1, m1 = np.roll(h, -1), np.roll(h, 1)
    p2, m2 = np.roll(h, -2), np.roll(h, 2)
    first = (-p2 + 8 * p1 - 8 * m1 + m2) / (12 * step)
    second = (-p2 + 16 * p1 - 30 * h + 16 * m1 - m2) / (12 * step**2)
    return first, second


def _sphere_derivatives(grid: SphereGrid, h: Array) -> tuple[Array, Array]:
    """Quadratic least-squares fit of the 1-homogeneous extension on each 2-ring.

    Neighbours are projected to the tangent plane at the node, where the extension
    takes the value h_j / <theta_j, theta_i>; the fitted Hessian is D^2 h.
    """
    triangles = grid.triangles
    if triangles is None:
        msg = "sampled S^2 support needs a triangulated grid"
        raise InputError(msg)
    m = grid.size
    edges = np.concatenate(
        [triangles[:, [0, 1]], triangles[:, [1, 2]], triangles[:, [2, 0]]],
    )
    adjacency = sparse.csr_matrix(
        (np.ones(len(edges)), (edges[:, 0], edges[:, 1])),
        shape=(m, m),
    )
    adjacency = adjacency + adjacency.T + sparse.identity(m, format="csr")
    ring = (adjacency @ adjacency).tocsr()

    gradient = np.empty((m, 2))
    d2h = np.empty((m, 2, 2))
    for i in range(m):
        neighbours = ring.indices[ring.indptr[i] : ring.indptr[i + 1]]
        theta = grid.nodes[neighbours]
        cosines = theta @ grid.nodes[i]
        u = (theta / cosines[:, None]) @ grid.tangent_frames[i]
        design = np.column_stack(
            [
                np.ones(len(neighbours)),
                u[:, 0],
                u[:, 1],
                0.5 * u[:, 0] ** 2,
                u[:, 0] * u[:, 1],
                0.5 * u[:, 1] ** 2,
            ],
        )
        coefficients = np.linalg.lstsq(design, h[neighbours] / cosines, rcond=None)[0]
        gradient[i] = coefficients[1:3]
        d2h[i] = [[coefficients[3], coefficients[4]], [coefficients[4], coefficients[5]]]
    return gradient, d2h


def _sample_values(spec: Sampled, grid: SphereGrid) -> SupportField:
    spec.grid.check_same(grid)
    h = spec.values
    _check_positive(h, "h")
    _check_even(grid, h)
    if grid.dim == 2:  # noqa: PLR2004
        first, second = _circle_derivatives(grid, h)
        gradient, d2h = first[:, None], (second + h)[:, None, None]
        step = grid.spacing
    else:
        gradient, d2h = _sphere_derivatives(grid, h)
        step = None
    return SupportField(
        grid=grid,
        h=h,
        grad_h=gradient,
        d2h=d2h,
        source=FieldSource.FINITE_DIFFERENCE,
        step=step,
        min_eig=_check_convex(d2h),
        body=spec,
    )


def sample_field(
    spec: BodySpec,
    grid: SphereGrid,
    method: DerivativeMethod | str = DerivativeMethod.AUTO,
) -> SupportField:
    """Evaluate h, its tangential gradient and D^2 h at every node and validate them."""
    method = DerivativeMethod(method)
    if spec.dim != grid.dim:
        msg = (
            f"{spec.describe()} has dimension {spec.dim}, "
            f"grid {grid.descriptor} has {grid.dim}"
        )
        raise InputError(msg)
    if isinstance(spec, Wulff):
        shaped = spec if spec.shape is not None else spec.construct()
        return SupportField.from_values(grid, shaped.support(grid.nodes))
    if isinstance(spec, Sampled):
        field = _sample_values(spec, grid)
    else:
        if not spec.smooth:
            msg = (
                f"{spec.describe()} is not in K^2_+; "
                "it cannot be sampled as a support field"
            )
            raise InputError(msg)
        h, gradient, hessian = _evaluate(spec, grid.nodes, method)
        _check_positive(h, "h")
        _check_even(grid, h)
        frames = grid.tangent_frames
        d2h = tangent_d2h(hessian, frames)
        finite_difference = (
            method is DerivativeMethod.FD or spec.hessian_source == "finite-difference"
        )
        source = FieldSource.ANALYTIC
        if finite_difference:
            source = FieldSource.FINITE_DIFFERENCE
        surface_cells = cone_cells = None
        if grid.dim == 2:  # noqa: PLR2004
            surface_cells, cone_cells = circle_cells(spec, grid, method)
        field = SupportField(
            grid=grid,
            h=h,
            grad_h=np.einsum("mia,mi->ma", frames, gradient),
            d2h=d2h,
            source=source,
            step=FD_STEP if finite_difference else None,
            min_eig=_check_convex(d2h),
            body=spec,
            method=method,
            surface_cells=surface_cells,
            cone_cells=cone_cells,
        )
    logger.debug(
        "Sampled %s on %s (%s): min eig %.3e",
        spec.describe(),
        grid.descriptor,
        field.source.value,
        field.min_eig,
    )
    return field


def check_field(field: SupportField) -> None:
    """Re-run the positivity, evenness and convexity checks on an existing field."""
    _check_positive(field.h, "h")
    _check_even(field.grid, field.h)
    if field.d2h is not None:
        _check_convex(field.d2h)
