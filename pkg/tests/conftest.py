import random

import pytest


@pytest.fixture
def seeded():
    """Deterministic RNG; tests derive all randomness from this."""
    return random.Random(20240901)
