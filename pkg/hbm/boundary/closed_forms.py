"""Closed-form boundary Poincare values and explicit upper bounds.

Poincare constants are caller inputs; ``POINCARE_CONSTANTS`` lists the known ones.
"""

from __future__ import annotations

import math

from hbm.common.errors import InputError

POINCARE_CONSTANTS = {
    # C_Poin(B_inf^n) = 2 / pi in every dimension
    "cube": 2 / math.pi,
}


def _require(condition: bool, message: str) -> None:  # noqa: FBT001
    if not condition:
        raise InputError(message)


def _nonnegative(**values: float) -> None:
    for name, value in values.items():
        _require(value >= 0, f"{name} must be nonnegative, got {value}")


def _positive(**values: float) -> None:
    for name, value in values.items():
        _require(value > 0, f"{name} must be positive, got {value}")


def steklov_ball_eigenvalue(n: int, k: int) -> float:
    """Eigenvalue of the second Steklov operator of B_2^n on degree-k harmonics."""
    _require(n >= 2, f"dimension must be >= 2, got {n}")  # noqa: PLR2004
    _require(k >= 1, f"degree must be >= 1 (constants are excluded), got {k}")
    return 2 * (k + n - 2) - (n - 1) - (k + n - 2) / k


def bh_ball(n: int) -> float:
    _require(n >= 2, f"dimension must be >= 2, got {n}")  # noqa: PLR2004
    return 2 / (n + 2)


def dk_upper_bound(r: float, big_r: float, c_poin: float, n: int) -> float:
    """D(K) <= (C_Poin^2 n + 2 C_Poin R) / r^2."""
    _positive(r=r, R=big_r, n=n)
    _nonnegative(C_poin=c_poin)
    return (c_poin**2 * n + 2 * c_poin * big_r) / r**2


def bh_upper_general(c_poin: float, r: float, max_hess: float) -> float:
    """B_H(K) <= C_Poin / r + C_Poin^2 max ||Hess W||."""
    _positive(r=r)
    _nonnegative(C_poin=c_poin, max_hess=max_hess)
    return c_poin / r + c_poin**2 * max_hess


def bh_upper_lq(q: float, n: int, c_poin: float, r: float = 1.0) -> float:
    """Structural bound for B_q^n.

    It takes W = (1/q) sum |x_i|^q, whose Hessian norm is q - 1.
    """
    _require(q >= 2, f"q must be >= 2, got {q}")  # noqa: PLR2004
    _positive(n=n, r=r)
    _nonnegative(C_poin=c_poin)
    return c_poin / r + c_poin**2 * (q - 1)


def q_kw(c_poin: float, max_hess: float, w_range: float) -> tuple[float, bool]:
    """Q_{K,w} = max ||Hess W|| e^{max w - min w} C_Poin^2, and whether it is below 1."""
    _nonnegative(C_poin=c_poin, max_hess=max_hess, w_range=w_range)
    value = max_hess * math.exp(w_range) * c_poin**2
    return value, value < 1


def bh_to_gap_bound(bh_upper: float, n: int) -> float:
    """Lower bound 1 + 1/((n-1) B_H) for lambda_1e."""
    _positive(bh_upper=bh_upper)
    _require(n >= 2, f"dimension must be >= 2, got {n}")  # noqa: PLR2004
    return 1 + 1 / ((n - 1) * bh_upper)


def p_from_bh(bh_upper: float) -> float:
    """Local p-BM holds with p = 1 - 1/B_H."""
    _positive(bh_upper=bh_upper)
    return 1 - 1 / bh_upper


def trace_constants(n: int, r: float, big_r: float, c_che: float) -> tuple[float, float]:
    """Boundary L^1 trace constants.

    The classical one is sqrt(2)/log 2 nR/r, the improved one (n C_Che + R)/r.
    """
    _positive(n=n, r=r, R=big_r)
    _nonnegative(C_che=c_che)
    return math.sqrt(2) / math.log(2) * n * big_r / r, (n * c_che + big_r) / r
