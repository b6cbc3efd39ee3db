import functools
import warnings

import pytest

from spheroidal_eq.equilibrium_solver import solve_equilibrium


@functools.lru_cache(maxsize=None)
def solved(alpha, n):
    return solve_equilibrium(alpha, n)


@pytest.fixture
def solve():
    return solved


def pytest_configure(config):
    warnings.filterwarnings("ignore", message="The TBB threading layer")
