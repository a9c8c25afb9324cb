from __future__ import annotations

import logging
from os import environ, getenv

from hbm.config.base import ENVIRONMENT

logger = logging.getLogger(__name__)

USE_SENTRY = getenv("USE_SENTRY", default="false").lower() == "true"

if USE_SENTRY:
    import sentry_sdk
    from sentry_sdk.integrations.celery import CeleryIntegration

    DSN = environ["SENTRY_DSN"]
    TRACES_SAMPLE_RATE = float(getenv("SENTRY_TRACES_SAMPLE_RATE", default="1.0"))

    sentry_sdk.init(
        dsn=DSN,
        environment=ENVIRONMENT,
        integrations=[
            CeleryIntegration(),
        ],
        traces_sample_rate=TRACES_SAMPLE_RATE,
    )

    logger.debug("Sentry is initialized")
else:
    logger.debug("Sentry is not initialized")
