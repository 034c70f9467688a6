import numpy as np
import pytest

from otfsim.core import OtfsParams


@pytest.fixture
def p8():
    return OtfsParams(8, 8, 15e3)


@pytest.fixture
def p_desk():
    return OtfsParams(16, 32, 15e3)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def rand_grid(rng, n, m):
    return rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))
