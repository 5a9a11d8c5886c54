import functools

import numpy as np
import pytest

from pslab import presets


@functools.lru_cache(maxsize=None)
def random_sl2(count, seed=0):
    """Well-spread random SL(2,R) matrices with entries O(1)."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        a, b, c = rng.normal(size=3)
        if abs(a) < 1e-3:
            continue
        d = (1.0 + b * c) / a
        out.append(np.array([[a, b], [c, d]]))
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def sl2():
    return presets.sl2_mild()


@pytest.fixture
def sl3():
    return presets.sl3_mild()


@pytest.fixture
def sl4():
    return presets.sl4_mild()
