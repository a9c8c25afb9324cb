from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from hbm.common.errors import InputError
from hbm.geometry.bodies import BodySpec
from hbm.geometry.fields import sample_field
from hbm.geometry.wulff import p_combination, wulff_body, wulff_is_support
from hbm.minkowski.mixed import volume
from hbm.sphere.grids import SphereGrid

logger = logging.getLogger(__name__)

MIN_LAMBDAS = 5
RELATIVE_SLACK = 1e-7


@dataclass(frozen=True)
class ConcavityRow:
    lam: float
    volume: float
    g: float
    is_support: bool
    gap: float

    def to_dict(self) -> dict[str, object]:
        return {
            "lambda": self.lam,
            "volume": self.volume,
            "g": self.g,
            "support": self.is_support,
            "gap": self.gap,
        }


@dataclass(frozen=True)
class ConcavityReport:
    p: float
    rows: list[ConcavityRow]
    second_differences: list[float]
    tol: float
    volume_error: float

    @property
    def max_second_difference(self) -> float:
        return max(self.second_differences)

    @property
    def min_second_difference(self) -> float:
        return min(self.second_differences)

    @property
    def concave(self) -> bool:
        return self.max_second_difference <= self.tol

    def to_dict(self) -> dict[str, object]:
        return {
            "p": self.p,
            "concave": self.concave,
            "max_second_difference": self.max_second_difference,
            "min_second_difference": self.min_second_difference,
            "tol": self.tol,
            "volume_error": self.volume_error,
            "rows": [row.to_dict() for row in self.rows],
        }


def _concavity_target(volume_value: float, p: float, n: int) -> float:
    if p == 0:
        return math.log(volume_value)
    return volume_value ** (p / n) / p


def geodesic_concavity(
    start: BodySpec,
    end: BodySpec,
    p: float,
    m_lambda: int,
    grid: SphereGrid,
) -> ConcavityReport:
    """Second differences of g(lam) along the L^p combination of two bodies.

    g is (1/p) V^{p/n}, or log V at p = 0, with V the volume of the Wulff body of
    the combination. The path is concave when no second difference exceeds ``tol``:
    1e-7 max|g| plus the relative Wulff-volume error at the endpoints times the
    largest second difference.
    """
    if m_lambda < MIN_LAMBDAS:
        msg = f"need at least {MIN_LAMBDAS} lambda values, got {m_lambda}"
        raise InputError(msg)
    if p > 1:
        msg = f"geodesic concavity is checked for p <= 1, got {p}"
        raise InputError(msg)
    h0, h1 = sample_field(start, grid), sample_field(end, grid)
    n = grid.dim

    rows = []
    for lam in np.linspace(0.0, 1.0, m_lambda):
        values = p_combination(h0, h1, float(lam), p)
        check, shape = wulff_is_support(values, grid)
        rows.append(
            ConcavityRow(
                lam=float(lam),
                volume=shape.volume,
                g=_concavity_target(shape.volume, p, n),
                is_support=check.is_support,
                gap=check.gap,
            ),
        )

    volume_error = max(
        abs(wulff_body(field.h, grid).volume / volume(field) - 1) for field in (h0, h1)
    )
    g = np.array([row.g for row in rows])
    second = g[:-2] - 2 * g[1:-1] + g[2:]
    tol = RELATIVE_SLACK * float(np.abs(g).max())
    tol += volume_error * float(np.abs(second).max())
    report = ConcavityReport(
        p=p,
        rows=rows,
        second_differences=second.tolist(),
        tol=tol,
        volume_error=volume_error,
    )
    if not report.concave:
        logger.warning(
            "Concavity fails for p=%g: max second difference %.3e > tol %.3e",
            p,
            report.max_second_difference,
            tol,
        )
    return report


def pbm_check(
    start: BodySpec,
    end: BodySpec,
    p: float,
    m_lambda: int,
    grid: SphereGrid,
) -> list[dict[str, object]]:
    """Per-lambda rows (lambda, V, g, support flag, gap) of a concavity run."""
    report = geodesic_concavity(start, end, p, m_lambda, grid)
    return [row.to_dict() for row in report.rows]
