from __future__ import annotations

import logging
import math

import numpy as np

from hbm.common.errors import ConvexityError, InputError
from hbm.common.rng import make_generator
from hbm.geometry.bodies import Trigonometric

logger = logging.getLogger(__name__)

AXIS_RANGE = (0.5, 2.0)
MODES = (2, 4, 6)
PERTURBATION = 0.15
MAX_ATTEMPTS = 1000


def _mode(
    generator: np.random.Generator,
    k: int,
    scale: float,
) -> tuple[int, float, float]:
    cosine, sine = generator.uniform(-scale, scale, size=2) / k**2
    return k, float(cosine), float(sine)


def _draw(generator: np.random.Generator) -> Trigonometric:
    for _ in range(MAX_ATTEMPTS):
        a, b = generator.uniform(*AXIS_RANGE, size=2)
        rotation = generator.uniform(0.0, math.pi)
        scale = PERTURBATION * min(a, b)
        modes = tuple(_mode(generator, k, scale) for k in MODES)
        try:
            return Trigonometric(
                a=float(a),
                b=float(b),
                rotation=float(rotation),
                modes=modes,
            )
        except ConvexityError:
            logger.debug("Rejected a non-convex draw (a=%.3f, b=%.3f)", a, b)
    msg = f"no admissible body after {MAX_ATTEMPTS} draws"  # pragma: no cover
    raise ConvexityError(msg)  # pragma: no cover


def random_corpus(seed: int, count: int) -> list[tuple[Trigonometric, Trigonometric]]:
    """``count`` pairs of smooth origin-symmetric planar bodies.

    The pairs are reproducible from ``seed``.

    Each body is an ellipse with an even Fourier perturbation of its support function;
    draws leaving K^2_+ are rejected.
    """
    if count < 0:
        msg = f"corpus size must be nonnegative, got {count}"
        raise InputError(msg)
    generator = make_generator(seed)
    return [(_draw(generator), _draw(generator)) for _ in range(count)]


def parse_corpus(text: str, default_seed: int | None = None) -> tuple[int, int]:
    """Read ``random:seed=<u64>,count=<k>``.

    The seed may be omitted when a default is given.
    """
    kind, _, rest = text.partition(":")
    if kind != "random" or not rest:
        msg = f"corpus must look like random:seed=<u64>,count=<k>, got {text!r}"
        raise InputError(msg)
    values: dict[str, int] = {}
    for item in rest.split(","):
        key, _, value = item.partition("=")
        if key not in ("seed", "count") or key in values or not value.isdigit():
            msg = f"bad corpus parameter {item!r} in {text!r}"
            raise InputError(msg)
        values[key] = int(value)
    if default_seed is not None:
        values.setdefault("seed", default_seed)
    if set(values) != {"seed", "count"}:
        msg = f"corpus needs both seed and count, got {text!r}"
        raise InputError(msg)
    return values["seed"], values["count"]
