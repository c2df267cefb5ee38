import sys
from pathlib import Path

import numpy as np
import pytest

ROOT_DIR = Path(__file__).resolve().parents[1]
if str(ROOT_DIR) not in sys.path:
    sys.path.insert(0, str(ROOT_DIR))

from tfrlab.core import TimeGrid, sample
from tfrlab.windows import Gaussian


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def grid64():
    return TimeGrid.centered(64)


@pytest.fixture
def grid256():
    return TimeGrid.centered(256)


@pytest.fixture
def g0_64(grid64):
    return sample(Gaussian(), grid64)


@pytest.fixture
def g0_256(grid256):
    return sample(Gaussian(), grid256)
