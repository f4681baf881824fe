import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from qpinsker.states import Ensemble, pure_state  # noqa: E402

SQ = 1 / math.sqrt(2)


@pytest.fixture
def ket0():
    return pure_state([1, 0])


@pytest.fixture
def ket1():
    return pure_state([0, 1])


@pytest.fixture
def ketplus():
    return pure_state([1, 1])


@pytest.fixture
def bell():
    return pure_state([1, 0, 0, 1])


@pytest.fixture
def zero_plus(ket0, ketplus):
    return Ensemble.uniform([ket0, ketplus])


@pytest.fixture
def trine():
    return Ensemble.uniform([pure_state([math.cos(a), math.sin(a)]) for a in (0, math.pi / 3, 2 * math.pi / 3)])


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)
