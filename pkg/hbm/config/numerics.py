from __future__ import annotations

import os
from os import getenv

HBM_THREADS = int(getenv("HBM_THREADS", default=str(os.cpu_count() or 1)))

# n=2 assembly: order of the staggered midpoint difference (2 or 4)
S1_STENCIL_ORDER = int(getenv("HBM_S1_STENCIL_ORDER", default="4"))

DENSE_MAX_NODES = int(getenv("HBM_DENSE_MAX_NODES", default="4096"))
DENSE_MAX_LEVEL = int(getenv("HBM_DENSE_MAX_LEVEL", default="4"))
SOLVER_RTOL = float(getenv("HBM_SOLVER_RTOL", default="1e-9"))

# n=2 cell integrals of dS_K and dV_K
CELL_GAUSS_POINTS = int(getenv("HBM_CELL_GAUSS_POINTS", default="8"))
CELL_CORRECTION_LIMIT = float(getenv("HBM_CELL_CORRECTION_LIMIT", default="0.05"))

FD_STEP = float(getenv("HBM_FD_STEP", default="1e-4"))
CONDITION_GUARD = float(getenv("HBM_CONDITION_GUARD", default="1e-10"))
UNIT_TOL = 1e-12

WEINGARTEN_SAMPLES = int(getenv("HBM_WEINGARTEN_SAMPLES", default="2048"))
POLYGON_SAMPLES = int(getenv("HBM_POLYGON_SAMPLES", default="4096"))
EDGE_GAUSS_POINTS = int(getenv("HBM_EDGE_GAUSS_POINTS", default="8"))
