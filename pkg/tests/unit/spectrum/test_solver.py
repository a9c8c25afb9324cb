from __future__ import annotations

import numpy as np
import pytest

from hbm.common.errors import InputError
from hbm.common.rng import make_generator
from hbm.geometry.bodies import Ball, Ellipsoid, LinearImage
from hbm.geometry.fields import SupportField, sample_field
from hbm.spectrum.forms import assemble
from hbm.spectrum.gap import random_transform
from hbm.spectrum.solver import distinct_values, solve_spectrum
from hbm.sphere.grids import SphereGrid, build_icosphere


def test_disk_forms(disk_field: SupportField) -> None:
    forms = assemble(disk_field)
    z = np.cos(3 * disk_field.grid.angles)

    assert forms.volume == pytest.approx(np.pi)
    assert forms.norm2(z) == pytest.approx(np.pi / 2)
    assert forms.rayleigh(z) == pytest.approx(9.0, rel=1e-6)
    assert forms.mean(np.ones(disk_field.grid.size)) == pytest.approx(np.pi)
    assert forms.energy(np.ones(disk_field.grid.size)) == pytest.approx(0.0, abs=1e-12)
    assert forms.metadata()["stencil_order"] == 4


def test_second_order_stencil_is_less_accurate(disk_field: SupportField) -> None:
    z = np.cos(3 * disk_field.grid.angles)

    coarse = abs(assemble(disk_field, order=2).rayleigh(z) - 9)
    fine = abs(assemble(disk_field, order=4).rayleigh(z) - 9)

    assert fine < coarse < 1e-2


def test_disk_full_spectrum(disk_field: SupportField) -> None:
    report = solve_spectrum(assemble(disk_field), 7)

    assert report.solver == "dense"
    assert np.allclose(report.eigenvalues, [0, 1, 1, 4, 4, 9, 9], atol=1e-6)
    assert report.one_cluster_size == 2
    assert report.lambda_above_one == pytest.approx(4.0, abs=1e-6)
    assert report.lambda_1e is None
    assert report.p_star is None


def test_disk_even_spectrum(disk_field: SupportField) -> None:
    report = solve_spectrum(assemble(disk_field), 5, even_only=True, deflate=True)

    assert report.lambda0 == pytest.approx(0.0, abs=1e-10)
    assert report.lambda_1e == pytest.approx(4.0, abs=1e-6)
    assert report.p_star == pytest.approx(-2.0, abs=1e-5)
    assert report.distinct == pytest.approx([0.0, 4.0, 16.0], abs=1e-5)
    assert report.eigenvectors.shape == (disk_field.grid.size, 5)


def test_eigenvectors_are_mass_normalised_and_even(ellipse_field: SupportField) -> None:
    forms = assemble(ellipse_field)
    report = solve_spectrum(forms, 4, even_only=True, deflate=True)
    vectors = report.eigenvectors
    grid = ellipse_field.grid

    gram = vectors.T @ (forms.mass[:, None] * vectors)
    assert np.allclose(gram, np.eye(4), atol=1e-8)
    assert np.allclose(vectors[grid.antipodal], vectors)


def test_shift_invert_matches_dense(
    ellipse_field: SupportField,
    monkeypatch: pytest.MonkeyPatch,
) -> None:
    forms = assemble(ellipse_field)
    dense = solve_spectrum(forms, 6, even_only=True, deflate=True)

    monkeypatch.setattr("hbm.spectrum.solver.DENSE_MAX_NODES", 0)
    iterative = solve_spectrum(forms, 6, even_only=True, deflate=True)

    assert iterative.solver == "shift-invert"
    assert iterative.iterations is not None
    assert np.allclose(iterative.eigenvalues, dense.eigenvalues, rtol=1e-8, atol=1e-9)


def test_ellipse_has_translation_cluster(ellipse_field: SupportField) -> None:
    report = solve_spectrum(assemble(ellipse_field), 4)

    assert report.lambda0 == pytest.approx(0.0, abs=1e-9)
    assert report.eigenvalues[1:3] == pytest.approx([1.0, 1.0], abs=1e-6)
    assert report.one_cluster_size == 2
    assert report.lambda_above_one > 1


@pytest.mark.parametrize("k", [0, 600])
def test_eigenpair_count_is_validated(disk_field: SupportField, k: int) -> None:
    with pytest.raises(InputError):
        solve_spectrum(assemble(disk_field), k)


def test_report_serialises_without_vectors(disk_field: SupportField) -> None:
    payload = solve_spectrum(assemble(disk_field), 3).to_dict()

    assert "eigenvectors" not in payload
    assert payload["grid"] == "s1:N=512"
    assert payload["solver"] == "dense"


def test_distinct_values_groups_multiplicities() -> None:
    values = np.array([4.0, 0.0, 4.0 + 1e-7, 16.0])

    assert distinct_values(values) == pytest.approx([0.0, 4.0, 16.0])


@pytest.fixture(scope="module")
def fine_icosphere() -> SphereGrid:
    return build_icosphere(5)


def test_ball_spectrum_in_space(fine_icosphere: SphereGrid) -> None:
    forms = assemble(sample_field(Ball(dim=3), fine_icosphere))

    full = solve_spectrum(forms, 5)
    even = solve_spectrum(forms, 3, even_only=True, deflate=True)

    assert np.abs(full.eigenvalues[1:4] - 1).max() <= 1e-2
    assert full.one_cluster_size == 3
    assert full.eigenvalues[4] > 1.5
    assert even.lambda_1e == pytest.approx(3.0, abs=2e-2)
    assert even.p_star == pytest.approx(-3.0, abs=6e-2)


@pytest.mark.parametrize("seed", range(3))
def test_linear_modes_have_rayleigh_quotient_one(seed: int, circle: SphereGrid) -> None:
    matrix = random_transform(make_generator(seed), 2, max_condition=2.0)
    field = sample_field(LinearImage(Ellipsoid(semi_axes=(1.5, 1.0)), matrix), circle)
    forms = assemble(field)

    for v in np.eye(2):
        assert forms.rayleigh(circle.nodes @ v / field.h) == pytest.approx(1.0, abs=1e-6)


def test_linear_modes_in_space(fine_icosphere: SphereGrid) -> None:
    field = sample_field(Ellipsoid(semi_axes=(1.2, 1.0, 0.9)), fine_icosphere)
    forms = assemble(field)

    for v in np.eye(3):
        quotient = forms.rayleigh(fine_icosphere.nodes @ v / field.h)
        assert quotient == pytest.approx(1.0, abs=1e-2)
