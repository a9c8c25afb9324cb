from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from hbm import __version__
from hbm.boundary.reilly import ReillyDomain
from hbm.common.output import (
    SCHEMA_VERSION,
    build_document,
    format_float,
    render_csv,
    render_human,
    render_json,
    to_builtin,
    write_atomic,
)


def test_to_builtin_unwraps_numpy_and_enums() -> None:
    value = to_builtin(
        {
            1: np.float64(0.5),
            "count": np.int64(3),
            "flag": np.bool_(True),
            "values": np.arange(3.0),
            "pair": (np.float32(1.5), ReillyDomain.DISK),
        },
    )

    assert value == {
        "1": 0.5,
        "count": 3,
        "flag": True,
        "values": [0.0, 1.0, 2.0],
        "pair": [1.5, "disk"],
    }
    assert type(value["count"]) is int
    assert type(value["flag"]) is bool


def test_document_meta() -> None:
    document = build_document("spectrum", {"k": 3}, {"lambda": 1.0})

    assert document["schema"] == SCHEMA_VERSION
    assert document["meta"]["version"] == __version__
    assert "created" in document["meta"]
    assert "meta" not in build_document("spectrum", {}, {}, with_meta=False)


def test_json_keeps_full_precision() -> None:
    text = render_json(build_document("x", {}, {"value": 0.1 + 0.2}, with_meta=False))

    assert json.loads(text)["result"]["value"] == 0.1 + 0.2
    assert text.endswith("\n")


@pytest.mark.parametrize("value", [0.1 + 0.2, 1 / 3, 2.0**-60, 1e300])
def test_format_float_round_trips(value: float) -> None:
    assert float(format_float(value)) == value


def test_csv_rows() -> None:
    text = render_csv([{"n": 2, "value": 0.1 + 0.2}, {"n": 3, "value": np.float64(2.5)}])

    assert text.splitlines() == ["n,value", "2,0.30000000000000004", "3,2.5"]
    assert render_csv([]) == ""


def test_human_lists_result_items() -> None:
    text = render_human(build_document("steklov", {}, {"n": 3, "eigenvalue": 2.5}))

    assert text.splitlines() == ["steklov (schema 1)", "  n: 3", "  eigenvalue: 2.5"]


def test_write_atomic_replaces_the_file(tmp_path: Path) -> None:
    target = tmp_path / "out.json"
    target.write_text("old", encoding="utf-8")

    write_atomic(target, "new\n")

    assert target.read_text(encoding="utf-8") == "new\n"
    assert [path.name for path in tmp_path.iterdir()] == ["out.json"]


def test_write_atomic_into_a_missing_directory(tmp_path: Path) -> None:
    with pytest.raises(OSError):
        write_atomic(tmp_path / "missing" / "out.json", "x")
