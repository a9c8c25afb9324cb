from __future__ import annotations

from os import getenv
from pathlib import Path

BASE_DIR = Path(__file__).resolve().parent.parent.parent

ENVIRONMENT = getenv("ENVIRONMENT", default="local")
