import numpy as np
import pytest

from dscurv import build_grid


@pytest.fixture(scope="session")
def s1_64():
    return build_grid(1, 64)


@pytest.fixture(scope="session")
def s2_16x32():
    return build_grid(2, (16, 32))


@pytest.fixture(scope="session")
def s2_32x64():
    return build_grid(2, (32, 64))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
