import numpy as np
import pytest

from modfactor.algebra import AlgebraSpec
from modfactor.numerics import NumericConfig

SPECS = [(1,), (2,), (3,), (1, 1), (1, 2), (2, 2)]


@pytest.fixture
def rng():
    return np.random.default_rng(20100501)


@pytest.fixture
def cfg():
    return NumericConfig()


@pytest.fixture(params=SPECS, ids=lambda s: "+".join(f"M{n}" for n in s))
def spec(request):
    return AlgebraSpec(request.param)


def random_matrix(rng, n, m=None):
    m = n if m is None else m
    return rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))
