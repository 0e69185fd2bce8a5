import numpy as np
import pytest

from nldlab import BasisLayout, ModelParams


@pytest.fixture(scope="session")
def layout16():
    return BasisLayout(16)


@pytest.fixture(scope="session")
def layout32():
    return BasisLayout(32)


@pytest.fixture(scope="session")
def layout128():
    return BasisLayout(128)


@pytest.fixture(scope="session")
def params32(layout32):
    return ModelParams(layout32)


@pytest.fixture(scope="session")
def params128(layout128):
    return ModelParams(layout128)


@pytest.fixture
def rng():
    return np.random.default_rng(20260825)
