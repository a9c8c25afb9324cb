from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from enum import Enum

import numpy as np
from numpy.typing import NDArray

from hbm.common.errors import InputError
from hbm.geometry.fields import SupportField
from hbm.minkowski.measures import inverse_d2h
from hbm.spectrum.forms import OperatorForms, assemble
from hbm.sphere.operators import triangle_gradients

logger = logging.getLogger(__name__)

Array = NDArray[np.float64]


class SecondVolumeMethod(str, Enum):
    # z-form through the assembled operator: V(zh;1) - int (-L_K z) z dV_K
    FORM = "form"
    # integrated-by-parts integral with its own derivative of w
    DIRECT = "direct"


def mixed_discriminant(*matrices: Array) -> Array:
    """D_m of m symmetric m x m matrices (m = 1 or 2), vectorised over leading axes."""
    arrays = [np.asarray(matrix, dtype=float) for matrix in matrices]
    shapes = {array.shape for array in arrays}
    if len(shapes) != 1:
        msg = f"mixed discriminant needs matrices of one shape, got {sorted(shapes)}"
        raise InputError(msg)
    shape = arrays[0].shape
    square = len(shape) >= 2 and shape[-1] == shape[-2]  # noqa: PLR2004
    if not square or shape[-1] != len(arrays) or shape[-1] > 2:  # noqa: PLR2004
        msg = (
            "mixed discriminant D_m takes m matrices of size m <= 2, "
            f"got {len(arrays)} of shape {shape}"
        )
        raise InputError(msg)
    if len(arrays) == 1:
        return arrays[0][..., 0, 0]
    a, b = arrays
    trace_a = np.trace(a, axis1=-2, axis2=-1)
    trace_b = np.trace(b, axis1=-2, axis2=-1)
    trace_ab = np.einsum("...ij,...ji->...", a, b)
    return (trace_a * trace_b - trace_ab) / 2


def _mixed_surface(fields: Sequence[SupportField]) -> Array:
    """Density of S(h_1, ..., h_{n-1}) per node."""
    return mixed_discriminant(*(field.require_d2h("mixed volume") for field in fields))


def mixed_volume(fields: Sequence[SupportField]) -> float:
    """V(h_1, ..., h_n) = (1/n) int h_n S(h_1, ..., h_{n-1}) d theta.

    In the plane this is integrated by parts, so only h and h' are sampled.
    A field without D^2 h (a Wulff field) is moved to the last slot.
    """
    if not fields:
        msg = "mixed volume needs n fields"
        raise InputError(msg)
    n = fields[0].dim
    if len(fields) != n:
        msg = f"mixed volume in dimension {n} takes {n} fields, got {len(fields)}"
        raise InputError(msg)
    fields[0].grid.check_same(*(field.grid for field in fields[1:]))
    without = [field for field in fields if not field.has_d2h]
    if len(without) > 1:
        msg = "at most one mixed-volume argument may lack D2h"
        raise InputError(msg)
    ordered = [field for field in fields if field.has_d2h] + without
    weights = fields[0].grid.weights
    if n == 2:  # noqa: PLR2004
        first, second = fields
        if not without and first.grad_h is not None and second.grad_h is not None:
            # (1/2) int (h_1 h_2 - h_1' h_2') d phi
            product = first.h * second.h - first.grad_h[:, 0] * second.grad_h[:, 0]
            return float(weights @ product) / 2
        return float(weights @ (ordered[-1].h * ordered[0].det_d2h)) / 2
    if without:
        return float(weights @ (ordered[-1].h * _mixed_surface(ordered[:-1]))) / n
    # average over the field taking the h slot
    total = 0.0
    for last in range(n):
        rest = [field for i, field in enumerate(fields) if i != last]
        total += float(weights @ (fields[last].h * _mixed_surface(rest)))
    return total / n**2


def volume(field: SupportField) -> float:
    return mixed_volume([field] * field.dim)


def perimeter_aniso(field: SupportField, gauge: SupportField) -> float:
    """P_L(K) = int h_L dS_K = n V(K, ..., K, L) with K = ``field`` and L = ``gauge``."""
    field.grid.check_same(gauge.grid)
    return field.dim * mixed_volume([field] * (field.dim - 1) + [gauge])


def circle_derivative(values: Array) -> Array:
    """Spectral d/d phi of node values on the circle grid."""
    size = values.shape[0]
    frequencies = np.fft.rfftfreq(size, d=1 / size)
    frequencies[-1] = 0.0
    return np.fft.irfft(1j * frequencies * np.fft.rfft(values), n=size)


def _direct_second_volume(w: Array, field: SupportField) -> float:
    grid = field.grid
    d2h = field.require_d2h("V(w;2)")
    n = field.dim
    if n == 2:  # noqa: PLR2004
        return float(grid.weights @ (w**2 - circle_derivative(w) ** 2)) / 2
    inverse = inverse_d2h(d2h)
    det = field.det_d2h
    trace_inverse = np.trace(inverse, axis1=1, axis2=2)
    zeroth = float(grid.weights @ (trace_inverse * w**2 * det))
    gradients = triangle_gradients(grid)
    grad_w = gradients.apply(w)
    centroids, _, hessian = field.centroid_data()
    projector = np.eye(3) - np.einsum("ti,tj->tij", centroids, centroids)
    trace = np.trace(hessian, axis1=1, axis2=2)
    cofactor = trace[:, None, None] * projector - hessian
    first = float(gradients.areas @ np.einsum("ta,tab,tb->t", grad_w, cofactor, grad_w))
    return (zeroth - first) / (n * (n - 1))


def v_w_m(
    w: Array,
    m: int,
    field: SupportField,
    forms: OperatorForms | None = None,
    method: SecondVolumeMethod | str = SecondVolumeMethod.FORM,
) -> float:
    """V(w; m): ``w`` in the first m slots, h_K in the rest."""
    w = np.asarray(w, dtype=float)
    if w.shape != field.h.shape:
        msg = f"w has shape {w.shape}, expected {field.h.shape}"
        raise InputError(msg)
    if m == 1 and field.dim == 2 and field.grad_h is not None:  # noqa: PLR2004
        product = w * field.h - circle_derivative(w) * field.grad_h[:, 0]
        return float(field.grid.weights @ product) / 2
    if m == 1:
        return float(field.grid.weights @ (w * field.det_d2h)) / field.dim
    if m != 2:  # noqa: PLR2004
        msg = f"V(w; m) is implemented for m in (1, 2), got {m}"
        raise InputError(msg)
    if SecondVolumeMethod(method) is SecondVolumeMethod.DIRECT:
        return _direct_second_volume(w, field)
    forms = forms if forms is not None else assemble(field)
    z = w / field.h
    return forms.norm2(z) - forms.energy(z)


def lp_mixed_volume(field: SupportField, other: SupportField, p: float) -> float:
    """V_p(K, L) = int (h_L/h_K)^p dV_K; int log(h_L/h_K) dV_K at p = 0."""
    field.grid.check_same(other.grid)
    ratio = other.h / field.h
    values = np.log(ratio) if p == 0 else ratio**p
    return float(field.cone_mass @ values)


def first_lp_minkowski_margin(
    field: SupportField,
    other: SupportField,
    p: float,
) -> float:
    n = field.dim
    volume_k, volume_l = volume(field), volume(other)
    mixed = lp_mixed_volume(field, other, p)
    if p == 0:
        return mixed - volume_k / n * math.log(volume_l / volume_k)
    return (mixed - volume_k) / p - volume_k / p * ((volume_l / volume_k) ** (p / n) - 1)


def mixed_volume_table(fields: Sequence[SupportField]) -> Array:
    """Pairwise V(K_i, ..., K_i, K_j) in the plane, V(K_i, K_i, K_j) in space."""
    size = len(fields)
    table = np.empty((size, size))
    for i, first in enumerate(fields):
        for j, second in enumerate(fields):
            table[i, j] = mixed_volume([first] * (first.dim - 1) + [second])
    logger.debug("Mixed volume table for %d bodies", size)
    return table
