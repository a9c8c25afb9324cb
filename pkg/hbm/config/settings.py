from __future__ import annotations

from split_settings.tools import include

include(
    "base.py",
    "logging.py",
    "numerics.py",
    "sentry.py",
    "celery.py",
)
