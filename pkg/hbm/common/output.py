from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Any

import numpy as np

from hbm import __version__

SCHEMA_VERSION = 1


class OutputFormat(str, Enum):
    JSON = "json"
    CSV = "csv"
    HUMAN = "human"


def to_builtin(value: Any) -> Any:
    """Turn numpy scalars/arrays and enums into plain JSON-compatible values."""
    if isinstance(value, dict):
        return {str(key): to_builtin(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_builtin(item) for item in value]
    if isinstance(value, np.ndarray):
        return to_builtin(value.tolist())
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, Enum):
        return value.value
    return value


def build_document(
    command: str,
    config: dict[str, Any],
    result: Any,
    *,
    with_meta: bool = True,
) -> dict[str, Any]:
    document: dict[str, Any] = {
        "schema": SCHEMA_VERSION,
        "command": command,
        "config": config,
        "result": result,
    }
    if with_meta:
        document["meta"] = {
            "version": __version__,
            "created": datetime.now(tz=timezone.utc).isoformat(timespec="seconds"),
        }
    return document


def format_float(value: float) -> str:
    return format(value, ".17g")


def render_json(document: dict[str, Any]) -> str:
    return json.dumps(to_builtin(document), indent=2) + "\n"


def render_csv(rows: list[dict[str, Any]]) -> str:
    if not rows:
        return ""
    buffer = io.StringIO()
    fieldnames = list(rows[0])
    writer = csv.DictWriter(buffer, fieldnames=fieldnames, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(
            {
                key: format_float(value) if isinstance(value, float) else value
                for key, value in to_builtin(row).items()
            },
        )
    return buffer.getvalue()


def render_human(document: dict[str, Any]) -> str:
    lines = [f"{document['command']} (schema {document['schema']})"]
    result = to_builtin(document["result"])
    items = result.items() if isinstance(result, dict) else [("result", result)]
    lines.extend(f"  {key}: {value}" for key, value in items)
    return "\n".join(lines) + "\n"


def write_atomic(path: Path, text: str) -> None:
    """Write ``text`` to ``path`` in one step: temp file in the same dir, then replace."""
    path = path.resolve()
    fd, tmp_name = tempfile.mkstemp(
        dir=path.parent,
        prefix=f".{path.name}.",
        suffix=".tmp",
    )
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        Path(tmp_name).replace(path)
    except BaseException:
        Path(tmp_name).unlink(missing_ok=True)
        raise
