import math

import numpy as np
import pytest
from hypothesis import settings

from spectral_grf.grid import GridSpec
from spectral_grf.spectral import PolyDecayDensity, Test1dDensity

TWO_PI = 2.0 * math.pi

# wall-clock deadlines are noise on a shared single-CPU box
settings.register_profile("default", deadline=None)
settings.load_profile("default")


@pytest.fixture
def poly2():
    return PolyDecayDensity(1.0, 1, 1, 2, dim=2)


@pytest.fixture
def test1d():
    return Test1dDensity()


def periodic_interval(n: int) -> GridSpec:
    return GridSpec((TWO_PI,), (n,), origin=(-math.pi,))


def random_even_counts(rng: np.random.Generator, dim: int, max_half: int = 6):
    return tuple(int(2 * rng.integers(1, max_half + 1)) for _ in range(dim))
