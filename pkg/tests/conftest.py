import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture
def phase_grid():
    """One fringe period sampled on a single row."""
    return np.linspace(0.0, 2 * np.pi, 720, endpoint=False)[None, :]
