import random

import pytest

from bridgecraft.schemes.gm import gm_keygen

TOY_P = 7
TOY_Q = 11


@pytest.fixture
def rng():
    return random.Random(1234)


@pytest.fixture
def toy_gm(rng):
    """GM keys on N = 77."""
    return gm_keygen(0, rng, p=TOY_P, q=TOY_Q)


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: full-size trial counts; deselect with -m 'not slow'")
