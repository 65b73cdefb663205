import random

import pytest

from topomata import _kernels
from topomata.zoo import zero_machine


@pytest.fixture(scope="session")
def warm_kernels():
    """Compile the jitted kernels once so timed tests measure steady state."""
    _kernels.warmup()
    return _kernels.active_backend()


@pytest.fixture
def rng():
    return random.Random(20240811)


@pytest.fixture(scope="session")
def zero():
    return zero_machine()
