import numpy as np
import pytest
from hypothesis import strategies as st

from kahler_bounds.meshes import icosphere


def complex_vectors(dim, bound=10.0):
    part = st.floats(-bound, bound, allow_nan=False, allow_infinity=False)
    return st.lists(st.tuples(part, part), min_size=dim, max_size=dim).map(
        lambda xs: np.array([a + 1j * b for a, b in xs])).filter(lambda z: np.linalg.norm(z) > 1e-3)


@st.composite
def point_pairs(draw, max_m=3):
    m = draw(st.integers(1, max_m))
    return draw(complex_vectors(m + 1)), draw(complex_vectors(m + 1))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(scope="session")
def sphere5():
    return icosphere(5)


@pytest.fixture(scope="session")
def sphere6():
    return icosphere(6)
