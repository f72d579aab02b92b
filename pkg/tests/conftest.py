import numpy as np
import pytest

from dgrate.ref_element import ReferenceElement
from dgrate.filters import pocs_cubature, build_filter_generator


@pytest.fixture(scope="session")
def elem1():
    return ReferenceElement(1)


@pytest.fixture(scope="session")
def elem3():
    return ReferenceElement(3)


@pytest.fixture(scope="session", params=[1, 3])
def elem(request, elem1, elem3):
    return {1: elem1, 3: elem3}[request.param]


@pytest.fixture(scope="session")
def cub1(elem1):
    return pocs_cubature(elem1)


@pytest.fixture(scope="session")
def cub3(elem3):
    return pocs_cubature(elem3)


@pytest.fixture(scope="session")
def fgen1(elem1, cub1):
    return build_filter_generator(elem1, cub1)


@pytest.fixture(scope="session")
def fgen3(elem3, cub3):
    return build_filter_generator(elem3, cub3)


@pytest.fixture
def rng():
    return np.random.default_rng(42)


def random_physical_states(rng, n, spread=1.0):
    """Random conservative states with positive density and pressure."""
    rho = np.exp(rng.uniform(-spread, spread, n))
    vx = rng.uniform(-2.0 * spread, 2.0 * spread, n)
    vy = rng.uniform(-2.0 * spread, 2.0 * spread, n)
    p = np.exp(rng.uniform(-spread, spread, n))
    E = p / 0.4 + 0.5 * rho * (vx ** 2 + vy ** 2)
    return np.column_stack([rho, rho * vx, rho * vy, E])
