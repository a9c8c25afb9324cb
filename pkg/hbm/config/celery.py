from __future__ import annotations

from os import getenv

broker_url = getenv("CELERY_BROKER_URL", "memory://")
result_backend = getenv("CELERY_RESULT_BACKEND", "cache+memory://")

task_serializer = "json"
result_serializer = "json"
accept_content = ["json"]

task_always_eager = getenv("CELERY_TASK_ALWAYS_EAGER", "true").lower() == "true"
task_eager_propagates = getenv("CELERY_TASK_EAGER_PROPAGATES", "true").lower() == "true"
task_ignore_result = getenv("CELERY_TASK_IGNORE_RESULT", "false").lower() == "true"

worker_concurrency = int(getenv("HBM_THREADS", "0")) or None
enable_utc = True
