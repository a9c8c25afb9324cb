from __future__ import annotations

import numpy as np

from hbm.common.errors import InputError

MAX_SEED = 2**64 - 1


def make_generator(seed: int) -> np.random.Generator:
    """Counter-based generator, identical streams across platforms for one seed."""
    if not 0 <= seed <= MAX_SEED:
        msg = f"seed must be an unsigned 64-bit integer, got {seed}"
        raise InputError(msg)
    return np.random.Generator(np.random.Philox(seed))
