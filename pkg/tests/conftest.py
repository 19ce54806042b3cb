import numpy as np
import pytest
from hypothesis import settings

from graphnorm.grid import Grid, GridSpec

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

TWO_PI = 2 * np.pi


def make(n=1, N=1, P=16, L=TWO_PI):
    return Grid(GridSpec(n, N, P, L))


@pytest.fixture
def grid1():
    return make(1, 1, 32)


@pytest.fixture
def grid2():
    return make(2, 1, 16)


@pytest.fixture
def grid3():
    return make(3, 1, 8)
