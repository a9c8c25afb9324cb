from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy.spatial.transform import Rotation

from hbm.common.errors import InputError
from hbm.geometry.bodies import BodySpec, LinearImage
from hbm.geometry.fields import SupportField, sample_field
from hbm.spectrum.forms import OperatorForms, assemble
from hbm.spectrum.solver import SpectralReport, solve_spectrum
from hbm.sphere.grids import SphereGrid
from hbm.sphere.operators import even_projector

logger = logging.getLogger(__name__)

Array = NDArray[np.float64]


def spectrum_table(
    spec: BodySpec,
    grid: SphereGrid,
    k: int,
    *,
    even: bool = False,
) -> SpectralReport:
    forms = assemble(sample_field(spec, grid))
    return solve_spectrum(forms, k, even_only=even, deflate=even)


def lambda_1e(spec: BodySpec, grid: SphereGrid) -> float:
    report = spectrum_table(spec, grid, 2, even=True)
    value = report.lambda_1e
    if value is None:  # pragma: no cover
        msg = "even spectrum has no eigenvalue past the constant mode"
        raise InputError(msg)
    logger.info("lambda_1e(%s) = %.12g on %s", spec.describe(), value, grid.descriptor)
    return value


def p_star(spec: BodySpec, grid: SphereGrid) -> float:
    """n - (n-1) lambda_1e: the smallest p for which local p-BM holds at K."""
    return spec.dim - (spec.dim - 1) * lambda_1e(spec, grid)


@dataclass(frozen=True)
class EquivarianceReport:
    discrepancy: float
    eigenvalues: Array
    image_eigenvalues: Array

    def to_dict(self) -> dict[str, object]:
        return {
            "discrepancy": self.discrepancy,
            "eigenvalues": self.eigenvalues,
            "image_eigenvalues": self.image_eigenvalues,
        }


def equivariance_check(
    spec: BodySpec,
    matrix: Array,
    grid: SphereGrid,
    k: int,
) -> EquivarianceReport:
    """Compare the first k eigenvalues of K and T(K) on the same grid."""
    image = LinearImage(spec, np.asarray(matrix, dtype=float))
    values = spectrum_table(spec, grid, k).eigenvalues
    image_values = spectrum_table(image, grid, k).eigenvalues
    discrepancy = np.abs(values - image_values) / np.maximum(1.0, np.abs(values))
    return EquivarianceReport(
        discrepancy=float(discrepancy.max()),
        eigenvalues=values,
        image_eigenvalues=image_values,
    )


def second_p_minkowski_margin(
    field: SupportField,
    z: Array,
    p: float,
    forms: OperatorForms | None = None,
) -> float:
    """V(zh;1)^2/V(K) - (n-1)/(n-p) V(zh;2) - (1-p)/(n-p) V(z^2 h;1).

    Only the even part of z enters.

    All three volumes are evaluated in z-form against the assembled operator, so the
    margin of a mean-zero z is exactly ((n-1) R(z) - (n-p)) / (n-p) int z^2 dV_K.
    """
    n = field.dim
    if p >= n:
        msg = f"the second L^p Minkowski inequality needs p < n, got p={p}"
        raise InputError(msg)
    forms = forms if forms is not None else assemble(field)
    z = even_projector(field.grid) @ np.asarray(z, dtype=float)
    first = forms.mean(z)
    square = forms.norm2(z)
    second = square - forms.energy(z)
    return (
        first**2 / forms.volume
        - (n - 1) / (n - p) * second
        - (1 - p) / (n - p) * square
    )


def random_transform(
    generator: np.random.Generator,
    dim: int,
    max_condition: float = 4.0,
) -> Array:
    """Random invertible T = Q_1 diag(s) Q_2.

    The singular values lie in [1, max_condition].
    """
    if max_condition < 1:
        msg = f"condition number must be >= 1, got {max_condition}"
        raise InputError(msg)
    singular = np.sort(generator.uniform(1.0, max_condition, size=dim))
    singular[0] = 1.0
    if dim == 2:  # noqa: PLR2004
        angles = generator.uniform(0.0, 2 * np.pi, size=2)
        first, second = (
            np.array([[np.cos(a), -np.sin(a)], [np.sin(a), np.cos(a)]]) for a in angles
        )
    else:
        first, second = (
            Rotation.random(random_state=generator).as_matrix() for _ in range(2)
        )
    return first @ np.diag(singular) @ second
