from __future__ import annotations

import os

try:
    _version = (
        os.popen("git describe --tags --dirty --always 2>/dev/null")  # noqa: S605, S607
        .read()
        .strip()
    )
except Exception:  # noqa: BLE001
    _version = ""

__version__ = _version or "0.0.0"
