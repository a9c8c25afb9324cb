from __future__ import annotations

import logging
from dataclasses import dataclass

from hbm.geometry.bodies import BodySpec
from hbm.geometry.fields import sample_field
from hbm.spectrum.gap import p_star
from hbm.sphere.grids import SphereGrid
from hbm.stability.deficits import DeficitReport, deficits
from hbm.stability.margins import (
    BonnesenReport,
    MinkowskiVolumes,
    bm_margin,
    bonnesen_compare,
    isoperimetric_margin,
    minkowski2_margins,
    planar_rkl_lower_bounds,
    radii,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StabilityReport:
    body_k: str
    body_l: str
    p: float
    p_star: float | None
    volumes: MinkowskiVolumes
    minkowski2: tuple[float, float]
    isoperimetric: tuple[float, float]
    bm: tuple[float, float]
    rkl_floor: float | None = None
    radii: tuple[float, float] | None = None
    rkl_lower_bounds: tuple[float, float] | None = None
    deficits: DeficitReport | None = None
    bonnesen: BonnesenReport | None = None

    def to_dict(self) -> dict[str, object]:
        row: dict[str, object] = {
            "K": self.body_k,
            "L": self.body_l,
            "p": self.p,
            "p_star": self.p_star,
            **self.volumes.to_dict(),
            "R_floor": self.rkl_floor,
            "minkowski2": self.minkowski2[0],
            "minkowski2_var": self.minkowski2[1],
            "isoperimetric": self.isoperimetric[0],
            "isoperimetric_var": self.isoperimetric[1],
            "bm": self.bm[0],
            "bm_var": self.bm[1],
        }
        if self.radii is not None:
            row["r"], row["R"] = self.radii
        if self.rkl_lower_bounds is not None:
            row["R_lower_inradius"], row["R_lower_log"] = self.rkl_lower_bounds
        if self.deficits is not None:
            row.update(self.deficits.to_dict())
        if self.bonnesen is not None:
            row["bonnesen"] = self.bonnesen.to_dict()
        return row


def stability_report(
    body_k: BodySpec,
    body_l: BodySpec,
    grid: SphereGrid,
    p: float | None = None,
    *,
    with_deficits: bool = False,
    with_bonnesen: bool = False,
) -> StabilityReport:
    """Every stability quantity of the pair (K, L); ``p=None`` uses p*(K)."""
    field_k, field_l = sample_field(body_k, grid), sample_field(body_l, grid)
    n = grid.dim
    critical = None
    if p is None:
        critical = p_star(body_k, grid)
        logger.info("Using p* = %.12g of %s", critical, body_k.describe())
        p = critical
    volumes = MinkowskiVolumes.of(field_k, field_l)
    planar = n == 2  # noqa: PLR2004

    report = StabilityReport(
        body_k=body_k.describe(),
        body_l=body_l.describe(),
        p=p,
        p_star=critical,
        volumes=volumes,
        minkowski2=minkowski2_margins(field_k, field_l, p, volumes),
        isoperimetric=isoperimetric_margin(field_k, field_l, p, volumes),
        bm=bm_margin(field_k, field_l, p),
        rkl_floor=(
            None if critical is None else (n - critical) / (n - 1) * volumes.variance
        ),
        radii=radii(field_k, field_l) if planar else None,
        rkl_lower_bounds=planar_rkl_lower_bounds(field_k, field_l) if planar else None,
        deficits=deficits(body_k, body_l) if with_deficits else None,
        bonnesen=bonnesen_compare(field_k, field_l, p) if with_bonnesen else None,
    )
    logger.debug("Stability report for %s / %s at p=%g", report.body_k, report.body_l, p)
    return report
