from __future__ import annotations

import logging
import math
from abc import ABC, abstractmethod
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, ClassVar

import numpy as np
from numpy.typing import NDArray

from hbm.common.errors import ConvexityError, InputError
from hbm.config.numerics import FD_STEP, UNIT_TOL
from hbm.sphere.grids import tangent_frame

if TYPE_CHECKING:
    from hbm.geometry.wulff import WulffShape
    from hbm.sphere.grids import SphereGrid

logger = logging.getLogger(__name__)

Array = NDArray[np.float64]

# |x_i| below this fraction of |x| counts as lying on a coordinate hyperplane
AXIS_EPS = 1e-12
_ADMISSIBLE_CHECK_NODES = 4096
SINGULAR_DET = 1e-12


def fd_gradient(func: Callable[[Array], Array], x: Array, step: float = FD_STEP) -> Array:
    """4th-order central differences, step scaled by |x|."""
    x = np.atleast_2d(x)
    h = step * np.linalg.norm(x, axis=1, keepdims=True)
    columns = []
    for i in range(x.shape[1]):
        e = np.zeros(x.shape[1])
        e[i] = 1.0
        shift = h * e
        columns.append(
            (
                -func(x + 2 * shift)
                + 8 * func(x + shift)
                - 8 * func(x - shift)
                + func(x - 2 * shift)
            )
            / (12 * h[:, 0]),
        )
    return np.stack(columns, axis=1)


def fd_hessian(
    gradient: Callable[[Array], Array],
    x: Array,
    step: float = FD_STEP,
) -> Array:
    x = np.atleast_2d(x)
    h = step * np.linalg.norm(x, axis=1, keepdims=True)
    columns = []
    for i in range(x.shape[1]):
        e = np.zeros(x.shape[1])
        e[i] = 1.0
        shift = h * e
        columns.append(
            (
                -gradient(x + 2 * shift)
                + 8 * gradient(x + shift)
                - 8 * gradient(x - shift)
                + gradient(x - 2 * shift)
            )
            / (12 * h),
        )
    hessian = np.stack(columns, axis=2)
    return 0.5 * (hessian + np.swapaxes(hessian, 1, 2))


class BodySpec(ABC):
    """Origin-symmetric convex body given by its support function.

    Implementations evaluate the 1-homogeneous extension of h and its Euclidean
    derivatives at arbitrary nonzero points, shape (m, n).
    """

    dim: int
    kind: ClassVar[str]
    hessian_source: ClassVar[str] = "analytic"
    smooth: ClassVar[bool] = True

    @abstractmethod
    def support(self, x: Array) -> Array: ...

    def gradient(self, x: Array) -> Array:
        return fd_gradient(self.support, x)

    def hessian(self, x: Array) -> Array:
        return fd_hessian(self.gradient, x)

    @abstractmethod
    def describe(self) -> str:
        """DSL string reproducing the body."""

    def __str__(self) -> str:
        return self.describe()


def _norms(x: Array) -> Array:
    return np.linalg.norm(x, axis=1)


def _fmt(value: float) -> str:
    return "inf" if math.isinf(value) else repr(float(value))


@dataclass(frozen=True)
class Ball(BodySpec):
    dim: int
    radius: float = 1.0
    kind: ClassVar[str] = "ball"

    def __post_init__(self) -> None:
        if self.dim not in (2, 3) or self.radius <= 0:
            msg = (
                "ball needs dim in {2, 3} and positive radius, "
                f"got {self.dim}, {self.radius}"
            )
            raise InputError(msg)

    def support(self, x: Array) -> Array:
        return self.radius * _norms(np.atleast_2d(x))

    def gradient(self, x: Array) -> Array:
        x = np.atleast_2d(x)
        return self.radius * x / _norms(x)[:, None]

    def hessian(self, x: Array) -> Array:
        x = np.atleast_2d(x)
        r = _norms(x)
        unit = x / r[:, None]
        projector = np.eye(self.dim) - np.einsum("mi,mj->mij", unit, unit)
        return self.radius * projector / r[:, None, None]

    def describe(self) -> str:
        return f"ball:r={_fmt(self.radius)}"


@dataclass(frozen=True)
class Ellipsoid(BodySpec):
    semi_axes: tuple[float, ...]
    kind: ClassVar[str] = "ellipsoid"

    def __post_init__(self) -> None:
        if len(self.semi_axes) not in (2, 3) or min(self.semi_axes) <= 0:
            msg = f"ellipsoid needs 2 or 3 positive semi-axes, got {self.semi_axes}"
            raise InputError(msg)

    @property
    def dim(self) -> int:  # type: ignore[override]
        return len(self.semi_axes)

    @property
    def _squares(self) -> Array:
        return np.asarray(self.semi_axes, dtype=float) ** 2

    def support(self, x: Array) -> Array:
        x = np.atleast_2d(x)
        return np.sqrt((self._squares * x**2).sum(axis=1))

    def gradient(self, x: Array) -> Array:
        x = np.atleast_2d(x)
        return self._squares * x / self.support(x)[:, None]

    def hessian(self, x: Array) -> Array:
        x = np.atleast_2d(x)
        h = self.support(x)
        g = self.gradient(x)
        return (np.diag(self._squares) - np.einsum("mi,mj->mij", g, g)) / h[:, None, None]

    def describe(self) -> str:
        names = ("a", "b", "c")
        return "ellipsoid:" + ",".join(
            f"{name}={_fmt(value)}"
            for name, value in zip(names, self.semi_axes, strict=False)
        )


@dataclass(frozen=True)
class Lq(BodySpec):
    """Unit ball of l_q; its support function is the dual l_{q*} norm."""

    dim: int
    q: float
    kind: ClassVar[str] = "lq"

    def __post_init__(self) -> None:
        if self.dim not in (2, 3) or not self.q >= 1:
            msg = f"lq needs dim in {{2, 3}} and q >= 1, got {self.dim}, {self.q}"
            raise InputError(msg)

    @property
    def dual_exponent(self) -> float:
        if self.q == 1:
            return math.inf
        if math.isinf(self.q):
            return 1.0
        return self.q / (self.q - 1)

    @property
    def is_polygonal(self) -> bool:
        return self.q == 1 or math.isinf(self.q)

    @property
    def smooth(self) -> bool:  # type: ignore[override]
        return not self.is_polygonal

    def support(self, x: Array) -> Array:
        x = np.atleast_2d(x)
        s = self.dual_exponent
        if math.isinf(s):
            return np.abs(x).max(axis=1)
        return (np.abs(x) ** s).sum(axis=1) ** (1 / s)

    def _require_differentiable(self) -> None:
        if self.is_polygonal:
            msg = f"{self.describe()} is a polytope; derivatives are undefined"
            raise InputError(msg)

    def _require_smooth(self, x: Array) -> None:
        self._require_differentiable()
        if self.dual_exponent < 2:  # noqa: PLR2004
            ratio = np.abs(x).min(axis=1) / _norms(x)
            if np.any(ratio <= AXIS_EPS):
                node = int(np.argmin(ratio))
                msg = (
                    f"{self.describe()}: D2h is singular "
                    f"at direction {x[node].tolist()}"
                )
                raise ConvexityError(msg, node=node)

    def gradient(self, x: Array) -> Array:
        x = np.atleast_2d(x)
        self._require_differentiable()
        s = self.dual_exponent
        h = self.support(x)
        return np.sign(x) * np.abs(x) ** (s - 1) * h[:, None] ** (1 - s)

    def hessian(self, x: Array) -> Array:
        x = np.atleast_2d(x)
        self._require_smooth(x)
        s = self.dual_exponent
        h = self.support(x)[:, None]
        power = np.sign(x) * np.abs(x) ** (s - 1)
        with np.errstate(divide="ignore"):
            diagonal = np.abs(x) ** (s - 2)
        outer = np.einsum("mi,mj->mij", power, power) * h[:, :, None] ** (1 - 2 * s)
        return (s - 1) * (
            np.einsum("mi,ij->mij", diagonal * h ** (1 - s), np.eye(self.dim)) - outer
        )

    def describe(self) -> str:
        return f"lq:q={_fmt(self.q)}"


@dataclass(frozen=True, eq=False)
class LinearImage(BodySpec):
    """T(K) with h_{T(K)}(x) = h_K(T^t x)."""

    base: BodySpec
    matrix: Array
    kind: ClassVar[str] = "linimg"

    def __post_init__(self) -> None:
        matrix = np.asarray(self.matrix, dtype=float)
        if matrix.shape != (self.base.dim, self.base.dim):
            size = self.base.dim
            msg = f"linimg matrix must be {size}x{size}, got {matrix.shape}"
            raise InputError(msg)
        if abs(np.linalg.det(matrix)) < SINGULAR_DET:
            msg = "linimg matrix is singular"
            raise InputError(msg)
        object.__setattr__(self, "matrix", matrix)

    @property
    def dim(self) -> int:  # type: ignore[override]
        return self.base.dim

    @property
    def smooth(self) -> bool:  # type: ignore[override]
        return self.base.smooth

    @property
    def hessian_source(self) -> str:  # type: ignore[override]
        return self.base.hessian_source

    def support(self, x: Array) -> Array:
        return self.base.support(np.atleast_2d(x) @ self.matrix)

    def gradient(self, x: Array) -> Array:
        return self.base.gradient(np.atleast_2d(x) @ self.matrix) @ self.matrix.T

    def hessian(self, x: Array) -> Array:
        inner = self.base.hessian(np.atleast_2d(x) @ self.matrix)
        return np.einsum("ik,mkl,jl->mij", self.matrix, inner, self.matrix)

    def describe(self) -> str:
        entries = ",".join(_fmt(v) for v in self.matrix.reshape(-1))
        return f"linimg:({self.base.describe()}):m={entries}"


class PlanarAngleBody(BodySpec):
    """Planar body given by h(phi) and its first two angular derivatives."""

    dim = 2

    @abstractmethod
    def angular(self, phi: Array) -> tuple[Array, Array, Array]:
        """Return h, h', h'' at the angles ``phi``."""

    def support(self, x: Array) -> Array:
        x = np.atleast_2d(x)
        h, _, _ = self.angular(np.arctan2(x[:, 1], x[:, 0]))
        return _norms(x) * h

    def gradient(self, x: Array) -> Array:
        x = np.atleast_2d(x)
        phi = np.arctan2(x[:, 1], x[:, 0])
        h, h1, _ = self.angular(phi)
        theta = np.column_stack([np.cos(phi), np.sin(phi)])
        perp = np.column_stack([-np.sin(phi), np.cos(phi)])
        return h[:, None] * theta + h1[:, None] * perp

    def hessian(self, x: Array) -> Array:
        x = np.atleast_2d(x)
        phi = np.arctan2(x[:, 1], x[:, 0])
        h, _, h2 = self.angular(phi)
        perp = np.column_stack([-np.sin(phi), np.cos(phi)])
        radius = (h2 + h) / _norms(x)
        return radius[:, None, None] * np.einsum("mi,mj->mij", perp, perp)

    def admissible(self, n_nodes: int = _ADMISSIBLE_CHECK_NODES) -> bool:
        """h > 0 and h'' + h > 0 on a dense offset grid."""
        phi = 2 * np.pi * (np.arange(n_nodes) + 0.5) / n_nodes
        h, _, h2 = self.angular(phi)
        return bool(np.all(h > 0) and np.all(h2 + h > 0))


@dataclass(frozen=True)
class Trigonometric(PlanarAngleBody):
    """Rotated ellipse plus an even Fourier perturbation of its support function.

    ``modes`` holds (k, c_k, s_k) with k even, adding c_k cos k phi + s_k sin k phi.
    """

    a: float
    b: float
    rotation: float = 0.0
    modes: tuple[tuple[int, float, float], ...] = ()
    kind: ClassVar[str] = "trig"

    def __post_init__(self) -> None:
        if self.a <= 0 or self.b <= 0:
            msg = f"trig needs positive semi-axes, got a={self.a}, b={self.b}"
            raise InputError(msg)
        if any(k % 2 or k < 2 for k, _, _ in self.modes):  # noqa: PLR2004
            msg = "trig modes must have even frequency k >= 2"
            raise InputError(msg)
        if not self.admissible():
            msg = f"{self.describe()} is not in K^2_+ (h'' + h must stay positive)"
            raise ConvexityError(msg)

    def angular(self, phi: Array) -> tuple[Array, Array, Array]:
        psi = np.asarray(phi) - self.rotation
        a2, b2 = self.a**2, self.b**2
        h = np.sqrt(a2 * np.cos(psi) ** 2 + b2 * np.sin(psi) ** 2)
        h1 = (b2 - a2) * np.sin(2 * psi) / (2 * h)
        h2 = ((b2 - a2) * np.cos(2 * psi) - h1**2) / h
        for k, c, s in self.modes:
            cos_k, sin_k = np.cos(k * phi), np.sin(k * phi)
            h = h + c * cos_k + s * sin_k
            h1 = h1 + k * (s * cos_k - c * sin_k)
            h2 = h2 - k**2 * (c * cos_k + s * sin_k)
        return h, h1, h2

    def describe(self) -> str:
        parts = [f"a={_fmt(self.a)}", f"b={_fmt(self.b)}"]
        if self.rotation:
            parts.append(f"rot={_fmt(self.rotation)}")
        for k, c, s in self.modes:
            parts.extend([f"c{k}={_fmt(c)}", f"s{k}={_fmt(s)}"])
        return "trig:" + ",".join(parts)


@dataclass(frozen=True, eq=False)
class MinkowskiSum(BodySpec):
    """K + L, with h_{K+L} = h_K + h_L."""

    first: BodySpec
    second: BodySpec
    kind: ClassVar[str] = "sum"

    def __post_init__(self) -> None:
        if self.first.dim != self.second.dim:
            msg = (
                f"cannot add bodies of dimensions {self.first.dim} "
                f"and {self.second.dim}"
            )
            raise InputError(msg)

    @property
    def dim(self) -> int:  # type: ignore[override]
        return self.first.dim

    @property
    def smooth(self) -> bool:  # type: ignore[override]
        return self.first.smooth and self.second.smooth

    @property
    def hessian_source(self) -> str:  # type: ignore[override]
        if "finite-difference" in (self.first.hessian_source, self.second.hessian_source):
            return "finite-difference"
        return "analytic"

    def support(self, x: Array) -> Array:
        return self.first.support(x) + self.second.support(x)

    def gradient(self, x: Array) -> Array:
        return self.first.gradient(x) + self.second.gradient(x)

    def hessian(self, x: Array) -> Array:
        return self.first.hessian(x) + self.second.hessian(x)

    def describe(self) -> str:
        return f"{self.first.describe()}+{self.second.describe()}"


@dataclass(frozen=True, eq=False)
class Sampled(BodySpec):
    """Support values known only at the nodes of one grid."""

    grid: SphereGrid
    values: Array
    source: str = "<memory>"
    kind: ClassVar[str] = "support"
    hessian_source: ClassVar[str] = "finite-difference"

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.size,):
            msg = (
                f"support file has {values.size} values "
                f"for a grid of {self.grid.size} nodes"
            )
            raise InputError(msg)
        object.__setattr__(self, "values", values)

    @property
    def dim(self) -> int:  # type: ignore[override]
        return self.grid.dim

    def node_index(self, theta: Array) -> NDArray[np.intp]:
        theta = np.atleast_2d(theta)
        index = np.argmax(theta @ self.grid.nodes.T, axis=1)
        miss = np.linalg.norm(self.grid.nodes[index] - theta, axis=1)
        if np.any(miss > UNIT_TOL * 1e3):
            msg = "sampled support is only defined at grid nodes"
            raise InputError(msg)
        return index

    def support(self, x: Array) -> Array:
        x = np.atleast_2d(x)
        r = _norms(x)
        return r * self.values[self.node_index(x / r[:, None])]

    def gradient(self, x: Array) -> Array:
        msg = "sampled support has no off-grid extension; use sample_field"
        raise InputError(msg)

    def hessian(self, x: Array) -> Array:
        return self.gradient(x)

    def describe(self) -> str:
        return f"support:{self.source}"


@dataclass(frozen=True, eq=False)
class Wulff(BodySpec):
    """Aleksandrov body of per-node values; usable once its hull is constructed."""

    grid: SphereGrid
    values: Array
    shape: WulffShape | None = field(default=None)
    kind: ClassVar[str] = "wulff"
    smooth: ClassVar[bool] = False

    @property
    def dim(self) -> int:  # type: ignore[override]
        return self.grid.dim

    def construct(self) -> Wulff:
        from hbm.geometry.wulff import wulff_body

        return Wulff(self.grid, self.values, wulff_body(self.values, self.grid))

    def support(self, x: Array) -> Array:
        if self.shape is None:
            msg = "Wulff body has no hull yet; call construct() first"
            raise InputError(msg)
        return (np.atleast_2d(x) @ self.shape.vertices.T).max(axis=1)

    def describe(self) -> str:
        return f"wulff:{self.grid.descriptor}"


def _check_unit(spec: BodySpec, theta: Array) -> Array:
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (spec.dim,):
        msg = f"direction must have {spec.dim} components, got shape {theta.shape}"
        raise InputError(msg)
    if abs(np.linalg.norm(theta) - 1) > UNIT_TOL:
        msg = f"direction {theta.tolist()} is not a unit vector"
        raise InputError(msg)
    return theta


def eval_support(spec: BodySpec, theta: Array) -> float:
    theta = _check_unit(spec, theta)
    return float(spec.support(theta[None, :])[0])


def tangent_d2h(hessian: Array, frames: Array) -> Array:
    """Restrict ambient Hessians (m, n, n) to tangent frames (m, n, n-1)."""
    return np.einsum("mia,mij,mjb->mab", frames, hessian, frames)


def eval_D2h(spec: BodySpec, theta: Array) -> float | Array:  # noqa: N802
    """D^2 h at theta.

    This is the scalar h'' + h for n=2 and a 2x2 matrix in ``tangent_frame`` for n=3.
    """
    theta = _check_unit(spec, theta)
    matrix = tangent_d2h(spec.hessian(theta[None, :]), tangent_frame(theta[None, :]))[0]
    if spec.dim == 2:  # noqa: PLR2004
        return float(matrix[0, 0])
    return matrix
