from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hbm.common.errors import InputError
from hbm.common.rng import make_generator
from hbm.geometry.bodies import Ball, Ellipsoid, Lq, Trigonometric
from hbm.geometry.fields import SupportField
from hbm.spectrum.forms import assemble
from hbm.spectrum.gap import (
    equivariance_check,
    lambda_1e,
    p_star,
    random_transform,
    second_p_minkowski_margin,
    spectrum_table,
)
from hbm.sphere.grids import SphereGrid, build_circle_grid, build_icosphere


def test_disk_gap(circle: SphereGrid) -> None:
    assert lambda_1e(Ball(dim=2), circle) == pytest.approx(4.0, abs=1e-6)
    assert p_star(Ball(dim=2, radius=3.0), circle) == pytest.approx(-2.0, abs=1e-5)


def test_gap_is_invariant_under_linear_maps(circle: SphereGrid) -> None:
    gap = lambda_1e(Ellipsoid(semi_axes=(2.0, 1.0)), circle)
    assert gap == pytest.approx(4.0, abs=1e-6)


def test_non_elliptic_bodies_have_smaller_gap(circle: SphereGrid) -> None:
    body = Trigonometric(a=1.0, b=1.0, modes=((4, 0.04, 0.0),))

    assert lambda_1e(body, circle) < 4.0
    assert p_star(body, circle) > -2.0


def test_smooth_lq_balls_sit_above_the_ellipsoids(circle: SphereGrid) -> None:
    values = [p_star(Lq(dim=2, q=q), circle) for q in (3.0, 4.0)]

    assert all(-2.0 < value < 1.0 for value in values)


def test_spectrum_table_even(circle: SphereGrid) -> None:
    report = spectrum_table(Ball(dim=2), circle, 3, even=True)

    assert report.even_restricted
    assert report.eigenvalues == pytest.approx([0.0, 4.0, 4.0], abs=1e-6)


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**64 - 1))
def test_equivariance_under_random_maps(seed: int, coarse_circle: SphereGrid) -> None:
    matrix = random_transform(make_generator(seed), 2, max_condition=2.0)

    report = equivariance_check(Ellipsoid(semi_axes=(1.5, 1.0)), matrix, coarse_circle, 6)

    assert report.discrepancy < 1e-2
    assert report.eigenvalues.shape == (6,)


def test_equivariance_on_a_fine_grid(circle: SphereGrid) -> None:
    matrix = np.array([[2.0, 0.5], [0.0, 1.0]])

    report = equivariance_check(Ball(dim=2), matrix, circle, 6)

    assert report.discrepancy < 1e-5
    assert set(report.to_dict()) == {"discrepancy", "eigenvalues", "image_eigenvalues"}


@pytest.mark.parametrize("dim", [2, 3])
def test_random_transform(dim: int) -> None:
    matrix = random_transform(make_generator(7), dim, max_condition=4.0)
    singular = np.linalg.svd(matrix, compute_uv=False)

    assert matrix.shape == (dim, dim)
    assert singular.min() == pytest.approx(1.0)
    assert singular.max() <= 4.0 + 1e-12
    again = random_transform(make_generator(7), dim, max_condition=4.0)
    assert np.array_equal(matrix, again)


def test_random_transform_rejects_small_condition() -> None:
    with pytest.raises(InputError):
        random_transform(make_generator(0), 2, max_condition=0.5)


def test_second_minkowski_margin_vanishes_at_p_star(disk_field: SupportField) -> None:
    forms = assemble(disk_field)
    z = np.cos(2 * disk_field.grid.angles)

    critical = second_p_minkowski_margin(disk_field, z, -2.0, forms)
    logarithmic = second_p_minkowski_margin(disk_field, z, 0.0, forms)

    assert critical == pytest.approx(0.0, abs=1e-6)
    assert logarithmic == pytest.approx(np.pi / 2, abs=1e-6)
    assert second_p_minkowski_margin(disk_field, z, -3.0, forms) < 0


def test_second_minkowski_margin_ignores_odd_parts(disk_field: SupportField) -> None:
    z = np.cos(disk_field.grid.angles)

    assert second_p_minkowski_margin(disk_field, z, 0.0) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(InputError):
        second_p_minkowski_margin(disk_field, z, 2.0)


def test_lq_gap_falls_towards_the_square(circle: SphereGrid) -> None:
    values = [lambda_1e(Lq(dim=2, q=q), circle) for q in (3.0, 6.0, 10.0, 20.0)]

    assert all(value >= 2.0 - 1e-3 for value in values)
    assert all(later < earlier for earlier, later in itertools.pairwise(values))
    assert 2.0 <= values[2] <= 2.5
    assert values[3] <= 2.1


def test_disk_gap_converges_under_refinement() -> None:
    errors = [
        abs(lambda_1e(Ball(dim=2), build_circle_grid(size)) - 4.0) for size in (256, 512)
    ]

    assert errors[1] * 3 <= errors[0]


@pytest.mark.parametrize("seed", range(5))
def test_equivariance_at_acceptance_resolution(seed: int, circle: SphereGrid) -> None:
    matrix = random_transform(make_generator(seed), 2, max_condition=4.0)

    report = equivariance_check(Ellipsoid(semi_axes=(1.5, 1.0)), matrix, circle, 6)

    assert report.discrepancy <= 2e-3


@pytest.mark.parametrize("seed", range(5))
def test_equivariance_in_space(seed: int) -> None:
    matrix = random_transform(make_generator(seed), 3, max_condition=4.0)

    report = equivariance_check(Ball(dim=3), matrix, build_icosphere(4), 6)

    assert report.discrepancy <= 5e-2
