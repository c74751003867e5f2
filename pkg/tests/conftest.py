import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def l2_diff(a, b):
    """L2 distance between two wavefunctions on the same grid."""
    return float(np.sqrt(np.sum(np.abs(a.values - b.values) ** 2) * a.measure))


@pytest.fixture
def l2():
    return l2_diff
