"""Quadratic forms of the Hilbert-Brunn-Minkowski operator.

The stiffness matrix realises the Dirichlet form of -L_K against the cone measure,

    z^t A z = (1/(n-1)) int h (D^2 h)^{-1} grad z . grad z dV_K,

and the diagonal mass realises int z^2 dV_K with dV_K = (1/n) h det(D^2 h) d theta.
For n=2 the form is (1/2) int h^2 z'^2 d phi, assembled with staggered midpoint
differences, and the mass of each node is dV_K integrated over its cell. For n=3 it
is (1/6) int h^2 <adj(D^2 h) grad z, grad z> d theta, assembled with P1 elements and
D^2 h taken at triangle centroids.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sparse
from numpy.typing import NDArray

from hbm.config.numerics import S1_STENCIL_ORDER
from hbm.geometry.fields import SupportField
from hbm.minkowski.measures import check_conditioning
from hbm.sphere.grids import SphereGrid
from hbm.sphere.operators import circle_differences, triangle_gradients

logger = logging.getLogger(__name__)

Array = NDArray[np.float64]


@dataclass(frozen=True, eq=False)
class OperatorForms:
    stiffness: sparse.csr_matrix
    mass: Array
    field: SupportField
    stencil_order: int | None = None

    @property
    def grid(self) -> SphereGrid:
        return self.field.grid

    @property
    def dim(self) -> int:
        return self.field.dim

    @property
    def volume(self) -> float:
        return float(self.mass.sum())

    @property
    def mass_matrix(self) -> sparse.csr_matrix:
        return sparse.diags(self.mass, format="csr")

    def energy(self, z: Array) -> float:
        return float(z @ (self.stiffness @ z))

    def norm2(self, z: Array) -> float:
        return float(self.mass @ (z * z))

    def mean(self, z: Array) -> float:
        """int z dV_K."""
        return float(self.mass @ z)

    def rayleigh(self, z: Array) -> float:
        return self.energy(z) / self.norm2(z)

    def metadata(self) -> dict[str, object]:
        return {**self.field.metadata(), "stencil_order": self.stencil_order}


def _circle_stiffness(field: SupportField, order: int) -> sparse.csr_matrix:
    differences = circle_differences(field.grid, order)
    h2_mid = differences.average @ (field.h**2)
    weights = sparse.diags(0.5 * h2_mid * differences.spacing)
    return (differences.derivative.T @ weights @ differences.derivative).tocsr()


def _sphere_stiffness(field: SupportField) -> sparse.csr_matrix:
    grid = field.grid
    gradients = triangle_gradients(grid)
    centroids, h, hessian = field.centroid_data()
    projector = np.eye(3) - np.einsum("ti,tj->tij", centroids, centroids)
    trace = np.trace(hessian, axis1=1, axis2=2)
    # ambient cofactor of D^2 h on the tangent plane
    coefficient = (h**2 / 6)[:, None, None] * (trace[:, None, None] * projector - hessian)
    local = gradients.areas[:, None, None] * np.einsum(
        "tia,tab,tjb->tij",
        gradients.basis,
        coefficient,
        gradients.basis,
    )
    triangles = gradients.triangles
    rows = np.broadcast_to(triangles[:, :, None], local.shape)
    cols = np.broadcast_to(triangles[:, None, :], local.shape)
    return sparse.coo_matrix(
        (local.reshape(-1), (rows.reshape(-1), cols.reshape(-1))),
        shape=(grid.size, grid.size),
    ).tocsr()


def assemble(field: SupportField, order: int = S1_STENCIL_ORDER) -> OperatorForms:
    d2h = field.require_d2h("operator assembly")
    check_conditioning(d2h)
    mass = field.cone_mass
    stencil_order: int | None = None
    if field.dim == 2:  # noqa: PLR2004
        stiffness = _circle_stiffness(field, order)
        stencil_order = order
    else:
        stiffness = _sphere_stiffness(field)
    stiffness = ((stiffness + stiffness.T) * 0.5).tocsr()
    logger.debug(
        "Assembled forms on %s: nnz %d, volume %.12g",
        field.grid.descriptor,
        stiffness.nnz,
        mass.sum(),
    )
    return OperatorForms(
        stiffness=stiffness,
        mass=mass,
        field=field,
        stencil_order=stencil_order,
    )
