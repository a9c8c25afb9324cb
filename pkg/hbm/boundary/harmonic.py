from __future__ import annotations

import math
import re
from dataclasses import dataclass
from enum import Enum

import numpy as np
from numpy.polynomial import polynomial as P  # noqa: N812
from numpy.typing import NDArray

from hbm.common.errors import DSLParseError, InputError

Array = NDArray[np.float64]

_TERM = re.compile(r"\s*([+-])?\s*")
_FACTOR = re.compile(
    r"(?P<number>\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+)"
    r"|(?P<var>[xy])(?:\s*(?:\^|\*\*)\s*(?P<power>\d+))?",
)


@dataclass(frozen=True, eq=False)
class Polynomial2D:
    """Bivariate polynomial, ``coefficients[i, j]`` multiplying x^i y^j."""

    coefficients: Array

    @property
    def degree(self) -> int:
        i, j = np.nonzero(np.abs(self.coefficients) > 0)
        return int((i + j).max()) if i.size else 0

    def __call__(self, points: Array) -> Array:
        points = np.atleast_2d(points)
        return P.polyval2d(points[:, 0], points[:, 1], self.coefficients)

    def derivative(self, axis: int) -> Polynomial2D:
        return Polynomial2D(P.polyder(self.coefficients, axis=axis))

    def gradient(self, points: Array) -> Array:
        return np.column_stack([self.derivative(axis)(points) for axis in (0, 1)])

    def hessian(self, points: Array) -> Array:
        dx, dy = self.derivative(0), self.derivative(1)
        xx = dx.derivative(0)(points)
        xy = dx.derivative(1)(points)
        yy = dy.derivative(1)(points)
        rows = [np.stack([xx, xy], axis=-1), np.stack([xy, yy], axis=-1)]
        return np.stack(rows, axis=-2)

    def laplacian(self, points: Array) -> Array:
        return np.trace(self.hessian(points), axis1=-2, axis2=-1)

    def is_harmonic(self) -> bool:
        xx = P.polyder(self.coefficients, 2, axis=0)
        yy = P.polyder(self.coefficients, 2, axis=1)
        size = (max(xx.shape[0], yy.shape[0]), max(xx.shape[1], yy.shape[1]))
        total = np.zeros(size)
        total[: xx.shape[0], : xx.shape[1]] += xx
        total[: yy.shape[0], : yy.shape[1]] += yy
        scale = max(1.0, np.abs(self.coefficients).max())
        return bool(np.all(np.abs(total) <= 1e-12 * scale))

    def describe(self) -> str:
        terms = []
        for (i, j), value in np.ndenumerate(self.coefficients):
            if value:
                factors = [f"{value:g}"]
                factors += [("x" if i == 1 else f"x^{i}")] * (i > 0)
                factors += [("y" if j == 1 else f"y^{j}")] * (j > 0)
                terms.append("*".join(factors))
        return " + ".join(terms).replace("+ -", "- ") or "0"


def monomial(i: int, j: int, scale: float = 1.0) -> Polynomial2D:
    coefficients = np.zeros((i + 1, j + 1))
    coefficients[i, j] = scale
    return Polynomial2D(coefficients)


def complex_power(k: int) -> tuple[Polynomial2D, Polynomial2D]:
    """Real and imaginary parts of (x + iy)^k."""
    real = np.zeros((k + 1, k + 1))
    imaginary = np.zeros((k + 1, k + 1))
    for j in range(k + 1):
        coefficient = math.comb(k, j) * (1j**j)
        real[k - j, j] = coefficient.real
        imaginary[k - j, j] = coefficient.imag
    return Polynomial2D(real), Polynomial2D(imaginary)


class Parity(str, Enum):
    EVEN = "even"
    ALL = "all"
    UNCONDITIONAL = "unconditional"


@dataclass(frozen=True)
class HarmonicBasis:
    """Re and Im of z^k for 2 <= k <= max_degree, filtered by parity.

    Linear members are left out: their Hessians vanish, so they add nothing to the
    interior form. The unconditional filter keeps Re z^k for even k, which is even
    in each coordinate separately.
    """

    max_degree: int
    parity: Parity = Parity.EVEN

    def members(self) -> list[Polynomial2D]:
        members: list[Polynomial2D] = []
        for k in range(2, self.max_degree + 1):
            if self.parity is not Parity.ALL and k % 2:
                continue
            real, imaginary = complex_power(k)
            members.append(real)
            if self.parity is not Parity.UNCONDITIONAL:
                members.append(imaginary)
        if not members:
            msg = (
                f"harmonic basis of degree {self.max_degree} "
                f"with parity {self.parity.value} is empty"
            )
            raise InputError(msg)
        return members


@dataclass(frozen=True)
class EvenPolynomialBasis:
    """Monomials x^i y^j with i + j even and 2 <= i + j <= max_degree."""

    max_degree: int

    def members(self) -> list[Polynomial2D]:
        members = [
            monomial(i, total - i)
            for total in range(2, self.max_degree + 1, 2)
            for i in range(total + 1)
        ]
        if not members:
            msg = f"even polynomial basis of degree {self.max_degree} is empty"
            raise InputError(msg)
        return members


def _term(text: str, pos: int) -> tuple[float, int, int, int]:
    coefficient, i, j = 1.0, 0, 0
    expect_factor = True
    while expect_factor:
        match = _FACTOR.match(text, pos)
        if match is None:
            msg = "expected a number, x or y"
            raise DSLParseError(msg, text, len(text[:pos].encode("utf-8")))
        pos = match.end()
        if match["number"] is not None:
            coefficient *= float(match["number"])
        else:
            power = int(match["power"]) if match["power"] else 1
            if match["var"] == "x":
                i += power
            else:
                j += power
        stripped = len(text) - len(text[pos:].lstrip())
        if text.startswith("*", stripped) and not text.startswith("**", stripped):
            pos = stripped + 1
            while pos < len(text) and text[pos] == " ":
                pos += 1
        else:
            expect_factor = False
    return coefficient, i, j, pos


def parse_polynomial(text: str) -> Polynomial2D:
    """Parse sums of terms like ``3*x^2*y``, ``-x**3`` or ``2.5``."""
    terms: list[tuple[float, int, int]] = []
    pos = 0
    first = True
    while pos < len(text.rstrip()):
        sign = _TERM.match(text, pos)
        if sign is None or (sign[1] is None and not first):
            msg = "expected '+' or '-'"
            raise DSLParseError(msg, text, len(text[:pos].encode("utf-8")))
        pos = sign.end()
        coefficient, i, j, pos = _term(text, pos)
        terms.append((-coefficient if sign[1] == "-" else coefficient, i, j))
        first = False
    if not terms:
        msg = "empty polynomial"
        raise DSLParseError(msg, text, 0)
    size = max(max(i, j) for _, i, j in terms) + 1
    coefficients = np.zeros((size, size))
    for coefficient, i, j in terms:
        coefficients[i, j] += coefficient
    return Polynomial2D(coefficients)
