from __future__ import annotations

import math
from pathlib import Path

import numpy as np
import pytest

from hbm.common.errors import DSLParseError, InputError
from hbm.geometry.bodies import Ball, Ellipsoid, LinearImage, Lq, Sampled, Trigonometric
from hbm.geometry.dsl import parse_bodies, parse_body, read_support_file
from hbm.sphere.grids import build_circle_grid


def test_parse_simple_bodies() -> None:
    assert parse_body("ball") == Ball(dim=2)
    assert parse_body("ball:r=2.5", dim=3) == Ball(dim=3, radius=2.5)
    assert parse_body("ellipsoid:a=2,b=1,c=0.5") == Ellipsoid(semi_axes=(2.0, 1.0, 0.5))
    assert parse_body("lq:q=inf", dim=3) == Lq(dim=3, q=math.inf)
    assert parse_body("lq:q=1e1") == Lq(dim=2, q=10.0)


def test_parse_trig_collects_modes() -> None:
    body = parse_body("trig:a=1.5,b=1,rot=0.25,s4=0.01,c2=-0.05")

    assert isinstance(body, Trigonometric)
    assert body.rotation == 0.25
    assert body.modes == ((2, -0.05, 0.0), (4, 0.0, 0.01))


def test_parse_nested_linear_image() -> None:
    body = parse_body("linimg:(ellipsoid:a=2,b=1):m=1,1,0,1")

    assert isinstance(body, LinearImage)
    assert isinstance(body.base, Ellipsoid)
    assert np.array_equal(body.matrix, [[1.0, 1.0], [0.0, 1.0]])


def test_describe_parses_back() -> None:
    text = "linimg:(trig:a=2.0,b=1.0,c2=0.02,s2=0.0):m=1.0,0.5,0.0,1.0"

    assert parse_body(text).describe() == text


@pytest.mark.parametrize(
    ("text", "offset"),
    [
        ("cube", 0),
        ("ball:", 5),
        ("ball:r=2x", 8),
        ("ball:s=1", 0),
        ("ellipsoid:a=1,a=2", 14),
        ("ellipsoid:a=1", 0),
        ("lq:q=", 5),
        ("trig:a=1,b=1,x2=0.1", 13),
        ("trig:a=1,b=1,c3=0.1", 0),
        ("linimg:(ball):m=1,0,0", 0),
        ("linimg:(ball)m=1,0,0,1", 12),
        ("ball:r=-1", 0),
    ],
)
def test_parse_errors_report_byte_offsets(text: str, offset: int) -> None:
    with pytest.raises(DSLParseError) as info:
        parse_body(text)

    assert info.value.offset == offset
    assert isinstance(info.value, InputError)


def test_dimension_conflicts() -> None:
    with pytest.raises(DSLParseError, match="dimension"):
        parse_body("ellipsoid:a=1,b=2,c=3", dim=2)
    with pytest.raises(DSLParseError, match="dimension"):
        parse_body("trig:a=1,b=1", dim=3)


def test_parse_bodies_splits_on_semicolons() -> None:
    bodies = parse_bodies("ball;ellipsoid:a=2,b=1;lq:q=3")

    assert [body.kind for body in bodies] == ["ball", "ellipsoid", "lq"]


def test_support_file_round_trip(tmp_path: Path) -> None:
    grid = build_circle_grid(16)
    path = tmp_path / "h.txt"
    rows = "\n".join(f"{j},{1 + j % 8 * 0.01}" for j in range(16))
    path.write_text("# index,h\n" + rows + "\n")

    body = parse_body(f"support:{path}", grid=grid)

    assert isinstance(body, Sampled)
    assert body.values[9] == pytest.approx(1.01)
    assert body.describe() == f"support:{path}"


def test_support_needs_a_grid(tmp_path: Path) -> None:
    with pytest.raises(DSLParseError, match="grid"):
        parse_body(f"support:{tmp_path / 'h.txt'}")


@pytest.mark.parametrize(
    "content",
    ["0,1\n", "0,1\n0,1\n", "a,b\n", "16,1\n"],
)
def test_support_file_validation(tmp_path: Path, content: str) -> None:
    grid = build_circle_grid(16)
    path = tmp_path / "h.txt"
    path.write_text(content)

    with pytest.raises(InputError):
        read_support_file(path, grid)


def test_missing_support_file(tmp_path: Path) -> None:
    with pytest.raises(InputError, match="cannot read"):
        read_support_file(tmp_path / "absent.txt", build_circle_grid(16))
