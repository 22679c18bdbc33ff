import numpy as np
import pytest

from oldroyd_lab.grid import build_grid


@pytest.fixture
def grid32():
    return build_grid(2, 32, 2.0 * np.pi)


@pytest.fixture
def grid16():
    return build_grid(2, 16, 2.0 * np.pi)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
