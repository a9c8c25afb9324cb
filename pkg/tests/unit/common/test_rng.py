from __future__ import annotations

import numpy as np
import pytest

from hbm.common.errors import InputError
from hbm.common.rng import MAX_SEED, make_generator


@pytest.mark.parametrize("seed", [0, 1, 2**32, MAX_SEED])
def test_same_seed_same_stream(seed: int) -> None:
    assert np.array_equal(make_generator(seed).random(8), make_generator(seed).random(8))


def test_different_seeds_differ() -> None:
    assert not np.array_equal(make_generator(1).random(8), make_generator(2).random(8))


@pytest.mark.parametrize("seed", [-1, MAX_SEED + 1])
def test_seed_range(seed: int) -> None:
    with pytest.raises(InputError, match="64-bit"):
        make_generator(seed)
