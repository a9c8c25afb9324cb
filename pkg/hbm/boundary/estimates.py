"""Rayleigh-quotient estimates of the boundary Poincare constants of planar bodies.

For a finite basis {u_i} the boundary form

    B_ij = int_{dK} <g_i, g_j> / <x, nu> dx,   g = u_nu  (B_H, B)  or  grad u  (D)

and the interior form A_ij = int_K <Hess u_i, Hess u_j>_F dx give the largest
generalized eigenvalue of (B, A): a lower estimate of the constant over the
span of the basis.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import scipy.linalg
from numpy.typing import NDArray

from hbm.boundary.harmonic import (
    EvenPolynomialBasis,
    HarmonicBasis,
    Polynomial2D,
    monomial,
)
from hbm.boundary.planar import PlanarBoundary
from hbm.common.errors import ConditioningError, InputError
from hbm.config.numerics import CONDITION_GUARD, EDGE_GAUSS_POINTS

logger = logging.getLogger(__name__)

Array = NDArray[np.float64]


class BoundDirection(str, Enum):
    LOWER = "lower"
    UPPER = "upper"
    EXACT = "exact"


class Quantity(str, Enum):
    BH = "bh"
    B = "b"
    D = "d"


TEST_FUNCTIONS = ("half_norm_sq", "half_x1_sq")


@dataclass(frozen=True)
class BoundReport:
    quantity: str
    direction: BoundDirection
    value: float
    inputs: dict[str, object] = field(default_factory=dict)
    witness: list[float] | None = None
    degree: int | None = None
    parity: str | None = None

    def to_dict(self) -> dict[str, object]:
        return {
            "quantity": self.quantity,
            "direction": self.direction.value,
            "value": self.value,
            "inputs": self.inputs,
            "witness": self.witness,
            "degree": self.degree,
            "parity": self.parity,
        }


def _boundary_values(
    members: list[Polynomial2D],
    boundary: PlanarBoundary,
    quantity: Quantity,
) -> Array:
    """Stacked g_i at the boundary samples, shape (members, samples, components)."""
    gradients = np.stack([member.gradient(boundary.points) for member in members])
    if quantity is Quantity.D:
        return gradients
    return np.einsum("msi,si->ms", gradients, boundary.normals)[:, :, None]


def _forms(
    members: list[Polynomial2D],
    boundary: PlanarBoundary,
    quantity: Quantity,
    degree: int,
) -> tuple[Array, Array]:
    values = _boundary_values(members, boundary, quantity)
    boundary_form = np.einsum(
        "isc,jsc,s->ij",
        values,
        values,
        boundary.weights / boundary.support,
    )

    points, weights = boundary.interior_rule(degree + 1)
    hessians = np.stack([member.hessian(points) for member in members])
    interior_form = np.einsum("ipab,jpab,p->ij", hessians, hessians, weights)
    return boundary_form, interior_form


def _largest_pair(boundary_form: Array, interior_form: Array) -> tuple[float, Array]:
    diagonal = np.diag(interior_form)
    if np.any(diagonal <= 0):
        msg = (
            "interior form has a vanishing diagonal: "
            "a basis member has zero Hessian on this body"
        )
        raise ConditioningError(msg)
    scale = 1 / np.sqrt(diagonal)
    a = interior_form * np.outer(scale, scale)
    b = boundary_form * np.outer(scale, scale)
    spectrum = np.linalg.eigvalsh(a)
    if spectrum[0] < CONDITION_GUARD * spectrum[-1]:
        ratio = spectrum[0] / spectrum[-1]
        msg = f"interior form is singular on this basis (eigenvalue ratio {ratio:.3e})"
        raise ConditioningError(msg)
    try:
        values, vectors = scipy.linalg.eigh(b, a)
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        msg = f"generalized eigenproblem failed: {exc}"
        raise ConditioningError(msg) from exc
    witness = scale * vectors[:, -1]
    pivot = int(np.argmax(np.abs(witness)))
    return float(values[-1]), witness / witness[pivot]


def boundary_estimate(
    boundary: PlanarBoundary,
    basis: HarmonicBasis | EvenPolynomialBasis,
    quantity: Quantity | str = Quantity.BH,
) -> BoundReport:
    """Lower estimate of B_H, B or D over the span of ``basis``."""
    try:
        quantity = Quantity(quantity)
    except ValueError as exc:
        msg = f"unknown boundary quantity {quantity!r}; expected one of bh, b, d"
        raise InputError(msg) from exc
    members = basis.members()
    degree = max(member.degree for member in members)
    boundary = boundary.with_gauss_points(max(EDGE_GAUSS_POINTS, degree))
    boundary_form, interior_form = _forms(members, boundary, quantity, degree)
    value, witness = _largest_pair(boundary_form, interior_form)
    logger.debug(
        "%s estimate %.12g from %d members of degree <= %d on a %s boundary",
        quantity.value,
        value,
        len(members),
        degree,
        boundary.kind.value,
    )
    return BoundReport(
        quantity=quantity.value,
        direction=BoundDirection.LOWER,
        value=value,
        inputs={"boundary": boundary.kind.value, "samples": len(boundary.weights)},
        witness=witness.tolist(),
        degree=degree,
        parity=basis.parity.value if isinstance(basis, HarmonicBasis) else "even",
    )


def bh_planar_estimate(boundary: PlanarBoundary, basis: HarmonicBasis) -> BoundReport:
    """Lower estimate of B_H.

    It estimates B_uncond instead when ``basis`` uses the unconditional filter.
    """
    return boundary_estimate(boundary, basis, Quantity.BH)


def _cube_quotient(n: int, name: str) -> float:
    if n < 2:  # noqa: PLR2004
        msg = f"dimension must be >= 2, got {n}"
        raise InputError(msg)
    if name == "half_norm_sq":
        return 1.0
    return 1 + (n - 1) / 3


def _planar_quotient(boundary: PlanarBoundary, name: str) -> float:
    if name == "half_norm_sq":
        u = Polynomial2D(np.array([[0.0, 0.0, 0.5], [0.0, 0.0, 0.0], [0.5, 0.0, 0.0]]))
        quantity = Quantity.B
    else:
        u = monomial(2, 0, 0.5)
        quantity = Quantity.D
    boundary = boundary.with_gauss_points(max(EDGE_GAUSS_POINTS, 2))
    boundary_form, interior_form = _forms([u], boundary, quantity, 2)
    return float(boundary_form[0, 0] / interior_form[0, 0])


def test_function_quotient(target: PlanarBoundary | int, u: str) -> BoundReport:
    """Lower bound on B (u = |x|^2/2) or D (u = x_1^2/2) from a single test function.

    An integer target is the dimension of the cube [-1, 1]^n, evaluated in closed form.
    """
    if u not in TEST_FUNCTIONS:
        msg = f"unknown test function {u!r}; expected one of {', '.join(TEST_FUNCTIONS)}"
        raise InputError(msg)
    quantity = Quantity.B if u == "half_norm_sq" else Quantity.D
    if isinstance(target, int):
        value = _cube_quotient(target, u)
        inputs: dict[str, object] = {"body": "cube", "n": target, "u": u}
    else:
        value = _planar_quotient(target, u)
        inputs = {"boundary": target.kind.value, "samples": len(target.weights), "u": u}
    return BoundReport(
        quantity=quantity.value,
        direction=BoundDirection.LOWER,
        value=value,
        inputs=inputs,
    )
