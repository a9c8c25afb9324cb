from __future__ import annotations

import math

import numpy as np
import pytest

from hbm.boundary.pbm_form import pbm_boundary_form_margin
from hbm.boundary.planar import PlanarBoundary, polygon_boundary, smooth_boundary
from hbm.common.errors import InputError
from hbm.geometry.bodies import Ball, Ellipsoid, Trigonometric


@pytest.fixture(scope="module")
def disk_boundary() -> PlanarBoundary:
    return smooth_boundary(Ball(dim=2))


def test_disk_mode_two_is_critical_at_minus_two(disk_boundary: PlanarBoundary) -> None:
    psi = np.cos(2 * disk_boundary.phi)

    critical = pbm_boundary_form_margin(disk_boundary, psi, -2.0)
    logarithmic = pbm_boundary_form_margin(disk_boundary, psi, 0.0)

    assert critical == pytest.approx(0.0, abs=2e-3)
    assert logarithmic == pytest.approx(2 * math.pi, abs=1e-9)
    assert pbm_boundary_form_margin(disk_boundary, psi, -3.0) < 0


@pytest.mark.parametrize("body", [Ball(dim=2), Ellipsoid(semi_axes=(2.0, 1.0))])
def test_support_traces_are_invisible(body: object) -> None:
    boundary = smooth_boundary(body)  # type: ignore[arg-type]

    margin = pbm_boundary_form_margin(boundary, 3.0 * boundary.h, 0.0)
    assert margin == pytest.approx(0.0, abs=1e-10)


def test_adding_the_support_trace_does_not_change_the_margin() -> None:
    boundary = smooth_boundary(Trigonometric(a=1.3, b=1.0, modes=((4, 0.02, 0.0),)))
    psi = np.cos(2 * boundary.phi) + 0.5 * np.sin(4 * boundary.phi)

    base = pbm_boundary_form_margin(boundary, psi, 0.0)
    shifted = pbm_boundary_form_margin(boundary, psi + 0.7 * boundary.h, 0.0)

    assert shifted == pytest.approx(base, abs=1e-9)


def test_boundary_form_validation(disk_boundary: PlanarBoundary) -> None:
    corners = np.array([[1.0, -1.0], [1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0]])
    square = polygon_boundary(corners)

    with pytest.raises(InputError, match="smooth"):
        pbm_boundary_form_margin(square, np.ones(len(square.weights)), 0.0)
    with pytest.raises(InputError, match="shape"):
        pbm_boundary_form_margin(disk_boundary, np.ones(3), 0.0)
    with pytest.raises(InputError, match="even"):
        pbm_boundary_form_margin(disk_boundary, np.cos(disk_boundary.phi), 0.0)
