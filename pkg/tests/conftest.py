import numpy as np
import pytest

from ebcheck import batteries as bat
from ebcheck._config import DEFAULT_TOL


@pytest.fixture(scope="session")
def remark_sets():
    return bat.remark31_sets()


@pytest.fixture(scope="session")
def remark_f():
    return bat.remark31_function()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def tol():
    return DEFAULT_TOL
