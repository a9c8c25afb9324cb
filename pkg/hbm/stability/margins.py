"""Stability forms of Minkowski's second, the anisotropic isoperimetric and the
Brunn-Minkowski inequalities.

All volumes below are evaluated in z-form against the operator assembled for K,
z = h_L / h_K, so homothetic pairs give exactly vanishing deficits.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from hbm.common.errors import InputError
from hbm.geometry.fields import SupportField
from hbm.spectrum.forms import OperatorForms, assemble

logger = logging.getLogger(__name__)

ORDER_SLACK = 1e-12


def _check_p(p: float, n: int) -> None:
    if p > 1:
        msg = f"stability estimates need p <= 1, got {p}"
        raise InputError(msg)
    if p >= n:  # pragma: no cover
        msg = f"p must be below the dimension {n}"
        raise InputError(msg)


def _ratio(field: SupportField, other: SupportField) -> np.ndarray:
    field.grid.check_same(other.grid)
    return other.h / field.h


def rkl(
    field: SupportField,
    other: SupportField,
    forms: OperatorForms | None = None,
) -> float:
    """R_K(L) = (1/(n(n-1))) int <(D^2 h_K)^{-1} xi, xi> dS_K with xi = h_K grad(h_L/h_K).

    This is the Dirichlet form of -L_K at z = h_L/h_K, i.e. V(z^2 h_K; 1) - V(z h_K; 2).
    """
    z = _ratio(field, other)
    forms = forms if forms is not None else assemble(field)
    return forms.energy(z)


def variance(
    field: SupportField,
    other: SupportField,
    forms: OperatorForms | None = None,
) -> float:
    """Var_{dV_K}(h_L/h_K) = int (z - zbar)^2 dV_K with zbar the dV_K average."""
    z = _ratio(field, other)
    forms = forms if forms is not None else assemble(field)
    return max(forms.norm2(z) - forms.mean(z) ** 2 / forms.volume, 0.0)


@dataclass(frozen=True)
class MinkowskiVolumes:
    volume_k: float
    volume_l: float
    mixed_first: float
    mixed_second: float
    rkl: float
    variance: float

    @classmethod
    def of(cls, field: SupportField, other: SupportField) -> MinkowskiVolumes:
        forms = assemble(field)
        z = _ratio(field, other)
        other_forms = assemble(other)
        return cls(
            volume_k=forms.volume,
            volume_l=other_forms.volume,
            mixed_first=forms.mean(z),
            mixed_second=forms.norm2(z) - forms.energy(z),
            rkl=forms.energy(z),
            variance=max(forms.norm2(z) - forms.mean(z) ** 2 / forms.volume, 0.0),
        )

    def to_dict(self) -> dict[str, object]:
        return {
            "V(K)": self.volume_k,
            "V(L)": self.volume_l,
            "V(L,K)": self.mixed_first,
            "V(L,L,K)": self.mixed_second,
            "R_K(L)": self.rkl,
            "Var": self.variance,
        }


def minkowski2_margins(
    field: SupportField,
    other: SupportField,
    p: float,
    volumes: MinkowskiVolumes | None = None,
) -> tuple[float, float]:
    """Margins of the second Minkowski stability estimate.

    There is one margin for the R_K(L) form and one for the variance form.

    The R-form margin does not exceed the variance-form margin whenever
    R_K(L) >= (n-p)/(n-1) Var, which holds when K satisfies local p-BM.
    """
    n = field.dim
    _check_p(p, n)
    volumes = volumes if volumes is not None else MinkowskiVolumes.of(field, other)
    base = volumes.mixed_first**2 / volumes.volume_k - volumes.mixed_second
    margin = base - (1 - p) / (n - p) * volumes.rkl
    variance_margin = base - (1 - p) / (n - 1) * volumes.variance
    if margin > variance_margin + ORDER_SLACK * max(1.0, abs(base)):
        logger.warning(
            "R-form margin %.3e exceeds the variance-form margin %.3e: "
            "local %g-BM fails at K",
            margin,
            variance_margin,
            p,
        )
    return margin, variance_margin


def _isoperimetric_base(volumes: MinkowskiVolumes, n: int) -> float:
    perimeter = n * volumes.mixed_first
    bound = n * volumes.volume_l ** (1 / n) * volumes.volume_k ** ((n - 1) / n)
    return perimeter**2 - bound**2


def isoperimetric_margin(
    field: SupportField,
    other: SupportField,
    p: float,
    volumes: MinkowskiVolumes | None = None,
) -> tuple[float, float]:
    """P_L(K)^2 - (n V(L)^{1/n} V(K)^{(n-1)/n})^2 minus the stability deficit.

    The deficit is taken in its R_K(L) form and in its variance form.
    """
    n = field.dim
    _check_p(p, n)
    volumes = volumes if volumes is not None else MinkowskiVolumes.of(field, other)
    base = _isoperimetric_base(volumes, n)
    deficit = n**2 * volumes.volume_k * (1 - p)
    return (
        base - deficit / (n - p) * volumes.rkl,
        base - deficit / (n - 1) * volumes.variance,
    )


def bm_deficit(volume_k: float, volume_l: float, volume_sum: float, n: int) -> float:
    """beta(K, L) = V(K+L)^{1/n} / (V(K)^{1/n} + V(L)^{1/n}) - 1."""
    return volume_sum ** (1 / n) / (volume_k ** (1 / n) + volume_l ** (1 / n)) - 1


def bm_margin(field: SupportField, other: SupportField, p: float) -> tuple[float, float]:
    """beta(K, L) minus 2(1-p)/(n-p) R_{K+L}(K)/V(K+L), and its variance form.

    The variance is Var_{dV_{K+L}}(h_K/(h_K+h_L)), which is symmetric in K and L.
    """
    n = field.dim
    _check_p(p, n)
    total = field + other
    forms = assemble(total)
    beta = bm_deficit(assemble(field).volume, assemble(other).volume, forms.volume, n)
    r_value = rkl(total, field, forms)
    var_value = variance(total, field, forms)
    scale = 2 * (1 - p) / forms.volume
    return beta - scale / (n - p) * r_value, beta - scale / (n - 1) * var_value


def polar_area(field: SupportField) -> float:
    """V(K°) = (1/2) int h_K^{-2} dphi."""
    _require_planar(field)
    return float(field.grid.weights @ field.h**-2.0) / 2


def radii(field: SupportField, other: SupportField) -> tuple[float, float]:
    """In and out radii r = min h_K/h_L, R = max h_K/h_L of K relative to L."""
    ratio = 1 / _ratio(field, other)
    return float(ratio.min()), float(ratio.max())


def _require_planar(field: SupportField) -> None:
    if field.dim != 2:  # noqa: PLR2004
        msg = f"planar estimate called in dimension {field.dim}"
        raise InputError(msg)


def planar_rkl_lower_bounds(
    field: SupportField,
    other: SupportField,
) -> tuple[float, float]:
    """(4 (1/r - 1/R)^2 / V(K°), 4 log^2(R/r) / V(L°)), both lower bounds for R_K(L)."""
    _require_planar(field)
    r, big_r = radii(field, other)
    return (
        4 * (1 / r - 1 / big_r) ** 2 / polar_area(field),
        4 * math.log(big_r / r) ** 2 / polar_area(other),
    )


@dataclass(frozen=True)
class BonnesenReport:
    lhs: float
    classical_rhs: float
    improved_rhs: float
    r: float
    big_r: float
    polar_area_k: float
    polar_area_l: float
    p: float

    @property
    def larger(self) -> str:
        return "classical" if self.classical_rhs >= self.improved_rhs else "improved"

    def to_dict(self) -> dict[str, object]:
        return {
            "lhs": self.lhs,
            "classical_rhs": self.classical_rhs,
            "improved_rhs": self.improved_rhs,
            "r": self.r,
            "R": self.big_r,
            "V(K polar)": self.polar_area_k,
            "V(L polar)": self.polar_area_l,
            "p": self.p,
            "larger": self.larger,
        }


def bonnesen_compare(
    field: SupportField,
    other: SupportField,
    p: float = 0.0,
) -> BonnesenReport:
    """P_L(K)^2/V(K) against Bonnesen's bound and the local p-BM bound."""
    _require_planar(field)
    _check_p(p, 2)
    volumes = MinkowskiVolumes.of(field, other)
    r, big_r = radii(field, other)
    area_k, area_l = polar_area(field), polar_area(other)
    lhs = (2 * volumes.mixed_first) ** 2 / volumes.volume_k
    floor = 4 * volumes.volume_l
    deficit = max(
        8 / area_k * (1 / r - 1 / big_r) ** 2,
        8 / area_l * math.log(big_r / r) ** 2,
    )
    return BonnesenReport(
        lhs=lhs,
        classical_rhs=floor + volumes.volume_l**2 / volumes.volume_k * (big_r - r) ** 2,
        improved_rhs=floor + 2 * (1 - p) / (2 - p) * deficit,
        r=r,
        big_r=big_r,
        polar_area_k=area_k,
        polar_area_l=area_l,
        p=p,
    )
