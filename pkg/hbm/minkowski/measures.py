from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from numpy.typing import NDArray

from hbm.common.errors import ConditioningError
from hbm.config.numerics import CONDITION_GUARD
from hbm.geometry.fields import SupportField
from hbm.sphere.grids import SphereGrid

Array = NDArray[np.float64]


class MeasureKind(str, Enum):
    SURFACE_AREA = "surface_area"
    CONE = "cone"
    LP_SURFACE = "lp_surface"


@dataclass(frozen=True, eq=False)
class MeasureField:
    grid: SphereGrid
    density: Array
    kind: MeasureKind
    p: float | None = None

    @property
    def total(self) -> float:
        return float(self.grid.weights @ self.density)

    def integrate(self, values: Array) -> float:
        return float(self.grid.weights @ (self.density * values))


def surface_density(field: SupportField) -> MeasureField:
    """dS_K = det(D^2 h) d theta."""
    return MeasureField(field.grid, field.det_d2h, MeasureKind.SURFACE_AREA)


def cone_density(field: SupportField) -> MeasureField:
    """dV_K = (1/n) h dS_K; its total mass is the volume."""
    density = field.cone_mass / field.grid.weights
    return MeasureField(field.grid, density, MeasureKind.CONE)


def lp_surface_density(field: SupportField, p: float) -> MeasureField:
    """dS_{K,p} = h^(1-p) dS_K."""
    density = field.h ** (1 - p) * field.det_d2h
    return MeasureField(field.grid, density, MeasureKind.LP_SURFACE, p=p)


def check_conditioning(d2h: Array, guard: float = CONDITION_GUARD) -> None:
    eigenvalues = np.linalg.eigvalsh(d2h)
    ratio = eigenvalues[:, 0] / eigenvalues[:, -1]
    worst = int(np.argmin(ratio))
    if not ratio[worst] >= guard:
        msg = (
            f"D2h is ill-conditioned at node {worst}: eigenvalue ratio "
            f"{ratio[worst]:.3e} < {guard:.1e}"
        )
        raise ConditioningError(msg)


def inverse_d2h(d2h: Array, guard: float = CONDITION_GUARD) -> Array:
    """Closed-form inverse of (m, 1, 1) or (m, 2, 2) tangent matrices."""
    check_conditioning(d2h, guard)
    if d2h.shape[1] == 1:
        return 1 / d2h
    det = d2h[:, 0, 0] * d2h[:, 1, 1] - d2h[:, 0, 1] * d2h[:, 1, 0]
    adjugate = np.empty_like(d2h)
    adjugate[:, 0, 0] = d2h[:, 1, 1]
    adjugate[:, 1, 1] = d2h[:, 0, 0]
    adjugate[:, 0, 1] = -d2h[:, 0, 1]
    adjugate[:, 1, 0] = -d2h[:, 1, 0]
    return adjugate / det[:, None, None]
