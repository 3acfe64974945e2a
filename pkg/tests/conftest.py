import numpy as np
import pytest

from congested_ns.core import PhysicalParams, make_grid
from congested_ns.profiles import traveling_wave


@pytest.fixture(scope="session")
def params():
    return PhysicalParams(mu=1.0, v_plus=2.0, u_minus=1.0, u_plus=0.0)


@pytest.fixture(scope="session")
def grid():
    return make_grid(50.0, 2049)


@pytest.fixture(scope="session")
def wave(params, grid):
    return traveling_wave(params, grid)


@pytest.fixture()
def rng():
    return np.random.default_rng(12345)
