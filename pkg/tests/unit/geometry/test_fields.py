from __future__ import annotations

import numpy as np
import pytest

from hbm.common.errors import ConvexityError, InputError
from hbm.geometry.bodies import Ball, BodySpec, Ellipsoid, Lq, Sampled
from hbm.geometry.fields import (
    DerivativeMethod,
    FieldSource,
    SupportField,
    check_field,
    sample_field,
)
from hbm.sphere.grids import SphereGrid, build_icosphere


def test_disk_field(disk_field: SupportField) -> None:
    assert disk_field.source is FieldSource.ANALYTIC
    assert np.allclose(disk_field.h, 1.0)
    assert np.allclose(disk_field.grad_h, 0.0)
    assert np.allclose(disk_field.det_d2h, 1.0)
    assert disk_field.min_eig == pytest.approx(1.0)


def test_ellipse_field_matches_curvature_radius(
    ellipse_field: SupportField,
    circle: SphereGrid,
) -> None:
    h = np.sqrt(4 * np.cos(circle.angles) ** 2 + np.sin(circle.angles) ** 2)

    assert np.allclose(ellipse_field.h, h)
    assert np.allclose(ellipse_field.det_d2h, 4 / h**3)


def test_ambient_hessian_annihilates_the_normal(
    ellipse_field: SupportField,
    circle: SphereGrid,
) -> None:
    hessian = ellipse_field.ambient_hessian

    assert hessian.shape == (circle.size, 2, 2)
    assert np.allclose(np.einsum("mij,mj->mi", hessian, circle.nodes), 0.0)


def test_finite_differences_agree_with_analytic(
    ellipse: BodySpec,
    circle: SphereGrid,
) -> None:
    analytic = sample_field(ellipse, circle)
    fd = sample_field(ellipse, circle, method="fd")

    assert fd.source is FieldSource.FINITE_DIFFERENCE
    assert fd.method is DerivativeMethod.FD
    assert np.allclose(fd.grad_h, analytic.grad_h, atol=1e-7)
    assert np.allclose(fd.d2h, analytic.d2h, atol=1e-5)


def test_sampled_circle_values_use_periodic_differences(
    ellipse_field: SupportField,
    circle: SphereGrid,
) -> None:
    sampled = sample_field(Sampled(grid=circle, values=ellipse_field.h), circle)

    assert sampled.source is FieldSource.FINITE_DIFFERENCE
    assert sampled.step == pytest.approx(circle.spacing)
    assert np.allclose(sampled.d2h, ellipse_field.d2h, atol=1e-5)


def test_sampled_sphere_values_use_local_fits() -> None:
    grid = build_icosphere(3)
    sampled = sample_field(Sampled(grid=grid, values=np.ones(grid.size)), grid)

    assert np.abs(sampled.grad_h).max() < 1e-2
    assert np.allclose(sampled.d2h, np.eye(2), atol=0.1)


def test_sphere_field(icosphere: SphereGrid) -> None:
    field = sample_field(Ellipsoid(semi_axes=(1.0, 2.0, 3.0)), icosphere)

    assert field.d2h.shape == (icosphere.size, 2, 2)
    assert field.min_eig > 0
    assert np.allclose(field.d2h, np.swapaxes(field.d2h, 1, 2))


def test_centroid_data_uses_the_body(icosphere: SphereGrid) -> None:
    field = sample_field(Ball(dim=3, radius=2.0), icosphere)

    centroids, h, hessian = field.centroid_data()

    assert np.allclose(np.linalg.norm(centroids, axis=1), 1.0)
    assert np.allclose(h, 2.0)
    assert np.allclose(np.einsum("mij,mj->mi", hessian, centroids), 0.0)


def test_minkowski_sum_field(
    disk_field: SupportField,
    ellipse_field: SupportField,
) -> None:
    total = disk_field + ellipse_field

    assert np.allclose(total.h, disk_field.h + ellipse_field.h)
    assert np.allclose(total.det_d2h, disk_field.det_d2h + ellipse_field.det_d2h)
    assert total.body is not None
    assert total.body.kind == "sum"


def test_value_fields_have_no_second_derivatives(circle: SphereGrid) -> None:
    field = SupportField.from_values(circle, np.ones(circle.size))

    assert not field.has_d2h
    with pytest.raises(InputError, match="D2h"):
        _ = field.det_d2h
    with pytest.raises(InputError):
        field + field


def test_polytopes_are_rejected(circle: SphereGrid) -> None:
    with pytest.raises(InputError, match="K\\^2_\\+"):
        sample_field(Lq(dim=2, q=1.0), circle)


def test_dimension_mismatch(circle: SphereGrid) -> None:
    with pytest.raises(InputError, match="dimension"):
        sample_field(Ball(dim=3), circle)


def test_non_even_values_are_rejected(circle: SphereGrid) -> None:
    values = 2 + np.cos(circle.angles)

    with pytest.raises(InputError, match="origin-symmetric"):
        sample_field(Sampled(grid=circle, values=values), circle)


def test_non_convex_values_are_rejected(circle: SphereGrid) -> None:
    values = 1 + 0.5 * np.cos(2 * circle.angles)

    with pytest.raises(ConvexityError) as info:
        sample_field(Sampled(grid=circle, values=values), circle)
    assert info.value.node is not None


def test_negative_values_are_rejected(circle: SphereGrid) -> None:
    with pytest.raises(ConvexityError):
        SupportField.from_values(circle, -np.ones(circle.size))


def test_check_field_passes_valid_fields(disk_field: SupportField) -> None:
    check_field(disk_field)
    assert disk_field.metadata()["grid"] == "s1:N=512"
