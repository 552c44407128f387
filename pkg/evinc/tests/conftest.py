"""
Общие фикстуры тестов
evinc/tests/conftest.py
"""
import numpy as np
import pytest

from evinc.gallery.catalog import catalog_problem
from evinc.signals.models import TimeGrid, WeightedSignal


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def grid():
    return TimeGrid(t0=0.0, dt=0.01, n=101)


@pytest.fixture
def random_signal(grid, rng):
    def make(dim: int = 2, rho: float = 1.0) -> WeightedSignal:
        return WeightedSignal(grid=grid, values=rng.standard_normal((grid.n, dim)), rho=rho)

    return make


@pytest.fixture
def scalar_problem():
    return catalog_problem("scalar_ode", dt=0.01, horizon=1.0)


@pytest.fixture
def sign_problem():
    return catalog_problem("sign_ramp", dt=0.01)
