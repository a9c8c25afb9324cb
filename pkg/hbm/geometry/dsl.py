"""Body description strings.

Grammar (whitespace is not allowed)::

    body      := ball | ellipsoid | lq | linimg | trig | support
    ball      := "ball" [":r=" number]
    ellipsoid := "ellipsoid:" params            a, b required, c optional (3D)
    lq        := "lq:q=" number                 number may be "inf"
    linimg    := "linimg:(" body "):m=" number ("," number)*    row-major, 4 or 9 entries
    trig      := "trig:" params                 a, b required; rot, c<k>, s<k> optional
    support   := "support:" path                file of "index,h" lines for a given grid
    params    := name "=" number ("," name "=" number)*

Errors report the byte offset into the UTF-8 encoded input.
"""

from __future__ import annotations

import math
import re
from pathlib import Path

import numpy as np

from hbm.common.errors import DSLParseError, InputError
from hbm.geometry.bodies import (
    Ball,
    BodySpec,
    Ellipsoid,
    LinearImage,
    Lq,
    Sampled,
    Trigonometric,
)
from hbm.sphere.grids import SphereGrid

_NUMBER = re.compile(r"[+-]?(inf|(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?)")
_NAME = re.compile(r"[a-z]+\d*")
_TRIG_MODE = re.compile(r"^(?P<kind>[cs])(?P<k>\d+)$")


class _Parser:
    def __init__(self, text: str, dim: int | None, grid: SphereGrid | None) -> None:
        self.text = text
        self.pos = 0
        self.dim = dim
        self.grid = grid

    def fail(self, message: str, pos: int | None = None) -> DSLParseError:
        where = self.pos if pos is None else pos
        return DSLParseError(message, self.text, len(self.text[:where].encode("utf-8")))

    def accept(self, literal: str) -> bool:
        if self.text.startswith(literal, self.pos):
            self.pos += len(literal)
            return True
        return False

    def expect(self, literal: str) -> None:
        if not self.accept(literal):
            raise self.fail(f"expected {literal!r}")

    def number(self) -> float:
        match = _NUMBER.match(self.text, self.pos)
        if match is None:
            raise self.fail("expected a number")
        self.pos = match.end()
        return float(match.group())

    def params(self) -> dict[str, tuple[float, int]]:
        values: dict[str, tuple[float, int]] = {}
        while True:
            start = self.pos
            match = _NAME.match(self.text, self.pos)
            if match is None:
                raise self.fail("expected a parameter name")
            self.pos = match.end()
            self.expect("=")
            if match.group() in values:
                raise self.fail(f"duplicate parameter {match.group()!r}", start)
            values[match.group()] = (self.number(), start)
            if not self.accept(","):
                return values

    def check_dim(self, dim: int, start: int) -> int:
        if self.dim is not None and self.dim != dim:
            msg = f"body has dimension {dim} but {self.dim} was requested"
            raise self.fail(msg, start)
        return dim

    def required_dim(self, start: int) -> int:
        if self.dim is None:
            return 2
        if self.dim not in (2, 3):
            raise self.fail(f"dimension must be 2 or 3, got {self.dim}", start)
        return self.dim

    def body(self) -> BodySpec:
        start = self.pos
        match = _NAME.match(self.text, self.pos)
        if match is None:
            raise self.fail("expected a body kind")
        kind = match.group()
        self.pos = match.end()
        handler = getattr(self, f"_{kind}", None)
        if handler is None:
            raise self.fail(f"unknown body kind {kind!r}", start)
        try:
            return handler(start)
        except InputError as exc:
            if isinstance(exc, DSLParseError):
                raise
            raise self.fail(str(exc), start) from exc

    def _ball(self, start: int) -> BodySpec:
        radius = 1.0
        if self.accept(":"):
            params = self.params()
            unknown = set(params) - {"r"}
            if unknown:
                raise self.fail(f"unknown ball parameter {sorted(unknown)[0]!r}", start)
            radius = params["r"][0]
        return Ball(dim=self.required_dim(start), radius=radius)

    def _ellipsoid(self, start: int) -> BodySpec:
        self.expect(":")
        params = self.params()
        for name in ("a", "b"):
            if name not in params:
                raise self.fail(f"ellipsoid needs {name}=", start)
        unknown = set(params) - {"a", "b", "c"}
        if unknown:
            raise self.fail(f"unknown ellipsoid parameter {sorted(unknown)[0]!r}", start)
        axes = tuple(params[name][0] for name in ("a", "b", "c") if name in params)
        self.check_dim(len(axes), start)
        return Ellipsoid(semi_axes=axes)

    def _lq(self, start: int) -> BodySpec:
        self.expect(":q=")
        return Lq(dim=self.required_dim(start), q=self.number())

    def _linimg(self, start: int) -> BodySpec:
        self.expect(":(")
        outer_dim, self.dim = self.dim, None
        base = self.body()
        self.dim = outer_dim
        self.expect("):m=")
        entries = [self.number()]
        while self.accept(","):
            entries.append(self.number())
        size = math.isqrt(len(entries))
        if size * size != len(entries) or size != base.dim:
            raise self.fail(
                f"linimg needs {base.dim * base.dim} matrix entries, got {len(entries)}",
                start,
            )
        self.check_dim(base.dim, start)
        return LinearImage(base=base, matrix=np.array(entries).reshape(size, size))

    def _trig(self, start: int) -> BodySpec:
        self.expect(":")
        params = self.params()
        self.check_dim(2, start)
        for name in ("a", "b"):
            if name not in params:
                raise self.fail(f"trig needs {name}=", start)
        modes: dict[int, list[float]] = {}
        for name, (value, where) in params.items():
            if name in ("a", "b", "rot"):
                continue
            mode = _TRIG_MODE.match(name)
            if mode is None:
                raise self.fail(f"unknown trig parameter {name!r}", where)
            slot = 0 if mode["kind"] == "c" else 1
            modes.setdefault(int(mode["k"]), [0.0, 0.0])[slot] = value
        return Trigonometric(
            a=params["a"][0],
            b=params["b"][0],
            rotation=params.get("rot", (0.0, 0))[0],
            modes=tuple((k, c, s) for k, (c, s) in sorted(modes.items())),
        )

    def _support(self, start: int) -> BodySpec:
        self.expect(":")
        path = self.text[self.pos :]
        self.pos = len(self.text)
        if not path:
            raise self.fail("support needs a file path")
        if self.grid is None:
            raise self.fail("support files need a grid (pass --grid)", start)
        self.check_dim(self.grid.dim, start)
        values = read_support_file(Path(path), self.grid)
        return Sampled(grid=self.grid, values=values, source=path)


def read_support_file(path: Path, grid: SphereGrid) -> np.ndarray:
    """Read "index,h" lines; every node index of ``grid`` must appear exactly once."""
    values = np.full(grid.size, np.nan)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        msg = f"cannot read support file {path}: {exc}"
        raise InputError(msg) from exc
    for number, line in enumerate(lines, start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        try:
            index_text, value_text = stripped.split(",")
            index, value = int(index_text), float(value_text)
        except ValueError as exc:
            msg = f"{path}:{number}: expected 'index,h'"
            raise InputError(msg) from exc
        if not 0 <= index < grid.size or not np.isnan(values[index]):
            msg = f"{path}:{number}: node index {index} out of range or repeated"
            raise InputError(msg)
        values[index] = value
    if np.isnan(values).any():
        missing = int(np.isnan(values).sum())
        msg = f"{path}: missing values for {missing} nodes of {grid.descriptor}"
        raise InputError(msg)
    return values


def parse_body(
    text: str,
    dim: int | None = None,
    grid: SphereGrid | None = None,
) -> BodySpec:
    parser = _Parser(text, dim, grid)
    body = parser.body()
    if parser.pos != len(text):
        raise parser.fail("unexpected trailing input")
    return body


def parse_bodies(
    text: str,
    dim: int | None = None,
    grid: SphereGrid | None = None,
) -> list[BodySpec]:
    """Parse a ';'-separated list of bodies."""
    return [parse_body(part, dim, grid) for part in text.split(";") if part]
