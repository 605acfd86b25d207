import numpy as np
import pytest

from llasym.config import DEFAULT
from llasym.elliptic import AnisotropyParams


@pytest.fixture(scope="session")
def params05():
    return AnisotropyParams.from_modulus(0.5, 1.0)


@pytest.fixture(scope="session")
def tol():
    return DEFAULT


@pytest.fixture()
def rng():
    return np.random.default_rng(20260825)


@pytest.fixture(scope="session")
def synthetic_r(params05):
    from llasym.scattering import synthetic_reflection
    return synthetic_reflection(0.5, 1.0, params05, DEFAULT)
