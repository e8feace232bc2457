import os
import random

import pytest


@pytest.fixture
def rng():
    """Seeded from AINF_SEED so randomized fixtures are reproducible."""
    return random.Random(int(os.environ.get("AINF_SEED", "20240611")))
