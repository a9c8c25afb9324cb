from __future__ import annotations

import logging
from typing import Any

from celery import group

from hbm.common.output import to_builtin
from hbm.geometry.dsl import parse_body
from hbm.sphere.grids import parse_grid
from hbm.stability.corpus import random_corpus
from hbm.stability.report import stability_report
from tasks.app import app

logger = logging.getLogger(__name__)

DEFAULT_GRID = "s1:N=512"


@app.task
def evaluate_pair(
    body_k: str,
    body_l: str,
    grid: str = DEFAULT_GRID,
    p: float | None = None,
    *,
    deficits: bool = False,
    bonnesen: bool = False,
) -> dict[str, Any]:
    """Stability row of one pair of bodies given by their descriptions."""
    sphere = parse_grid(grid)
    report = stability_report(
        parse_body(body_k, dim=sphere.dim, grid=sphere),
        parse_body(body_l, dim=sphere.dim, grid=sphere),
        sphere,
        p,
        with_deficits=deficits,
        with_bonnesen=bonnesen,
    )
    return to_builtin(report.to_dict())


def sweep_corpus(
    seed: int,
    count: int,
    p: float | None = 0.0,
    *,
    grid: str = DEFAULT_GRID,
    deficits: bool = False,
    bonnesen: bool = False,
) -> list[dict[str, Any]]:
    """Evaluate every pair of ``random_corpus(seed, count)``, in corpus order."""
    pairs = random_corpus(seed, count)
    if not pairs:
        return []
    job = group(
        evaluate_pair.s(
            first.describe(),
            second.describe(),
            grid,
            p,
            deficits=deficits,
            bonnesen=bonnesen,
        )
        for first, second in pairs
    )
    rows = job.apply_async().get()
    logger.info("Swept %d corpus pairs (seed=%d) at p=%s", len(rows), seed, p)
    return [{"pair": index, **row} for index, row in enumerate(rows)]
