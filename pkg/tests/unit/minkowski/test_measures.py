from __future__ import annotations

import numpy as np
import pytest

from hbm.common.errors import ConditioningError
from hbm.geometry.fields import SupportField
from hbm.minkowski.measures import (
    MeasureKind,
    check_conditioning,
    cone_density,
    inverse_d2h,
    lp_surface_density,
    surface_density,
)

ELLIPSE_PERIMETER = 9.688448220547675


def test_measure_totals(ellipse_field: SupportField) -> None:
    perimeter = surface_density(ellipse_field).total

    assert perimeter == pytest.approx(ELLIPSE_PERIMETER, abs=1e-9)
    assert cone_density(ellipse_field).total == pytest.approx(2 * np.pi, abs=1e-10)
    assert cone_density(ellipse_field).kind is MeasureKind.CONE


def test_lp_surface_density_interpolates(ellipse_field: SupportField) -> None:
    cone = cone_density(ellipse_field).density
    surface = surface_density(ellipse_field).density

    assert np.allclose(lp_surface_density(ellipse_field, 0.0).density, 2 * cone)
    assert np.allclose(lp_surface_density(ellipse_field, 1.0).density, surface)
    assert lp_surface_density(ellipse_field, -2.0).p == -2.0


def test_integrate_against_the_cone_measure(disk_field: SupportField) -> None:
    measure = cone_density(disk_field)
    values = np.cos(2 * np.arange(disk_field.grid.size))

    assert measure.integrate(values) == pytest.approx(
        float(disk_field.grid.weights @ values) / 2,
    )


def test_inverse_d2h() -> None:
    matrices = np.array([[[2.0, 1.0], [1.0, 3.0]], [[1.0, 0.0], [0.0, 4.0]]])

    assert np.allclose(inverse_d2h(matrices), np.linalg.inv(matrices))
    assert np.allclose(inverse_d2h(np.array([[[4.0]]])), [[[0.25]]])


def test_conditioning_guard() -> None:
    with pytest.raises(ConditioningError) as info:
        check_conditioning(np.array([[[1.0, 0.0], [0.0, 1e-12]]]))
    assert info.value.guard == "conditioning"
    with pytest.raises(ConditioningError):
        inverse_d2h(np.array([[[1.0, 0.0], [0.0, -1.0]]]))
