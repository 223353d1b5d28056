import numpy as np
import pytest

from undominated import Election


@pytest.fixture
def e3():
    """Three-voter Condorcet cycle: a>b>c, b>c>a, c>a>b."""
    return Election([[0, 1, 2], [1, 2, 0], [2, 0, 1]])


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
