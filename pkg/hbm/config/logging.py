from __future__ import annotations

import logging.config
from os import getenv

LOG_LEVEL = getenv("LOG_LEVEL", default="INFO")
CELERY_LOG_LEVEL = getenv("CELERY_LOG_LEVEL", default="WARNING")
# NO_COLOR=1 when stderr goes to a file or a CI log
LOG_FORMATTER = "plain" if getenv("NO_COLOR") else "colored"

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "colored": {
            "()": "colorlog.ColoredFormatter",
            "format": "%(asctime)s %(log_color)s%(levelname)s %(name)s %(message)s",
            "datefmt": "%Y-%m-%d %H:%M:%S",
        },
        "plain": {
            "format": "%(asctime)s %(levelname)s %(name)s %(message)s",
            "datefmt": "%Y-%m-%d %H:%M:%S",
        },
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": LOG_FORMATTER,
            "stream": "ext://sys.stderr",
        },
    },
    "loggers": {
        "hbm": {"level": LOG_LEVEL},
        "tasks": {"level": LOG_LEVEL},
        "celery": {"level": CELERY_LOG_LEVEL},
        "": {
            "handlers": ["console"],
            "level": "WARNING",
        },
    },
}

logging.config.dictConfig(LOGGING)
