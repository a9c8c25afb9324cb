from __future__ import annotations

import math

import numpy as np
import pytest

from hbm.boundary import estimates
from hbm.boundary.closed_forms import (
    POINCARE_CONSTANTS,
    bh_ball,
    bh_to_gap_bound,
    dk_upper_bound,
)
from hbm.boundary.estimates import BoundDirection, bh_planar_estimate, boundary_estimate
from hbm.boundary.harmonic import EvenPolynomialBasis, HarmonicBasis, Parity, Polynomial2D
from hbm.boundary.planar import (
    PlanarBoundary,
    planar_boundary,
    polygon_boundary,
    polygonize,
)
from hbm.common.errors import ConditioningError, InputError
from hbm.geometry.bodies import Ball, Ellipsoid, Trigonometric

SQUARE = np.array([[1.0, -1.0], [1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0]])
RECTANGLE = np.array([[1.0, -2.0], [1.0, 2.0], [-1.0, 2.0], [-1.0, -2.0]])


@pytest.fixture(scope="module")
def square() -> PlanarBoundary:
    return polygon_boundary(SQUARE)


def test_disk_estimate_approaches_the_ball_value() -> None:
    report = bh_planar_estimate(polygonize(Ball(dim=2), 720), HarmonicBasis(8))

    assert report.value == pytest.approx(bh_ball(2), abs=1e-3)
    assert report.direction is BoundDirection.LOWER
    assert report.parity == "even"
    assert report.degree == 8


def test_disk_estimates_increase_with_degree() -> None:
    boundary = polygonize(Ball(dim=2), 720)
    values = [
        bh_planar_estimate(boundary, HarmonicBasis(degree)).value
        for degree in (2, 4, 6, 8)
    ]

    pairs = zip(values, values[1:], strict=False)
    assert all(later >= earlier - 1e-12 for earlier, later in pairs)
    assert all(1 / value >= 2 - 1e-2 for value in values)


def test_square_estimate_is_one(square: PlanarBoundary) -> None:
    report = bh_planar_estimate(square, HarmonicBasis(2))

    assert report.value == pytest.approx(1.0, abs=1e-9)
    # the witness is (x^2 - y^2) / 2 up to scale: Re z^2 dominates Im z^2
    assert report.witness is not None
    assert abs(report.witness[1]) < 1e-9


@pytest.mark.parametrize("degree", [4, 6, 8])
def test_square_estimate_stays_bounded(square: PlanarBoundary, degree: int) -> None:
    assert bh_planar_estimate(square, HarmonicBasis(degree)).value <= 1 + 1e-9


def test_unconditional_filter_is_bounded_on_unconditional_bodies() -> None:
    boundary = planar_boundary(Ellipsoid(semi_axes=(1.5, 1.0)))

    report = bh_planar_estimate(boundary, HarmonicBasis(6, Parity.UNCONDITIONAL))

    assert report.value <= 1 + 1e-9
    assert report.parity == "unconditional"


def test_rectangle_estimate() -> None:
    report = bh_planar_estimate(polygon_boundary(RECTANGLE), HarmonicBasis(2))

    assert report.value >= (4 + 1 / 4) / 6 - 1e-9


def test_full_polynomial_basis_dominates_harmonic_one(square: PlanarBoundary) -> None:
    harmonic = boundary_estimate(square, HarmonicBasis(4), "b")
    polynomial = boundary_estimate(square, EvenPolynomialBasis(4), "b")

    assert polynomial.value >= harmonic.value - 1e-12
    assert polynomial.parity == "even"
    assert polynomial.quantity == "b"


def test_d_estimate_dominates_b_estimate(square: PlanarBoundary) -> None:
    b_value = boundary_estimate(square, EvenPolynomialBasis(4), "b").value
    d_value = boundary_estimate(square, EvenPolynomialBasis(4), "d").value

    assert d_value >= b_value - 1e-12
    upper = dk_upper_bound(1.0, math.sqrt(2), POINCARE_CONSTANTS["cube"], 2)
    assert d_value <= upper + 1e-9


def test_unknown_quantity(square: PlanarBoundary) -> None:
    with pytest.raises(InputError):
        boundary_estimate(square, HarmonicBasis(2), "c")


class _DuplicatedBasis(EvenPolynomialBasis):
    def members(self) -> list[Polynomial2D]:
        return super().members() * 2


def test_singular_interior_form(square: PlanarBoundary) -> None:
    with pytest.raises(ConditioningError):
        boundary_estimate(square, _DuplicatedBasis(2))


@pytest.mark.parametrize(
    "body",
    [
        Ball(dim=2),
        Ellipsoid(semi_axes=(2.0, 1.0)),
        Trigonometric(a=1.0, b=1.2, modes=((4, 0.02, 0.0),)),
    ],
)
def test_norm_quotient_is_one_on_every_body(body: object) -> None:
    boundary = planar_boundary(body)  # type: ignore[arg-type]
    report = estimates.test_function_quotient(boundary, "half_norm_sq")

    assert report.value == pytest.approx(1.0, abs=1e-10)
    assert report.quantity == "b"


def test_square_quadrature_matches_the_cube_formula(square: PlanarBoundary) -> None:
    planar = estimates.test_function_quotient(square, "half_x1_sq")
    closed = estimates.test_function_quotient(2, "half_x1_sq")

    assert closed.value == pytest.approx(4 / 3)
    assert planar.value == pytest.approx(closed.value, abs=1e-12)
    assert planar.quantity == "d"


def test_cube_quotients() -> None:
    assert estimates.test_function_quotient(10, "half_x1_sq").value == pytest.approx(4.0)
    assert estimates.test_function_quotient(3, "half_norm_sq").value == 1.0
    assert estimates.test_function_quotient(2, "half_x1_sq").value <= dk_upper_bound(
        1.0,
        math.sqrt(2),
        POINCARE_CONSTANTS["cube"],
        2,
    )


def test_quotient_validation(square: PlanarBoundary) -> None:
    with pytest.raises(InputError):
        estimates.test_function_quotient(square, "x1_cubed")
    with pytest.raises(InputError):
        estimates.test_function_quotient(1, "half_norm_sq")


def test_gap_bound_from_the_ball_value_is_below_the_spectrum() -> None:
    assert bh_to_gap_bound(bh_ball(2), 2) <= 4.0


def test_report_serialises() -> None:
    report = estimates.test_function_quotient(2, "half_x1_sq").to_dict()

    assert report["direction"] == "lower"
    assert report["inputs"] == {"body": "cube", "n": 2, "u": "half_x1_sq"}
