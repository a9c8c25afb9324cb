from __future__ import annotations

from celery import Celery

from hbm.config import celery as config

app = Celery("hbm")
app.config_from_object(config)
app.autodiscover_tasks(["tasks"], related_name="sweeps")
