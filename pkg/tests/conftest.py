import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from catquench.pipeline import build_context
from catquench.quench import QuenchSpec


@pytest.fixture(scope="session")
def headline_ctx():
    """j = 1/2, R = 20 context of the 1.5 -> -0.283, delta = 0.5 quench."""
    spec = QuenchSpec(1.5, -0.283, 0.5, 20.0, 0.5,
                      time_grid=np.linspace(0.0, 80.0, 161))
    return build_context(spec)


@pytest.fixture(scope="session")
def small_ctx():
    """Cheap j = 1/2, R = 10 context for structural tests."""
    spec = QuenchSpec(1.5, -0.4, 0.5, 10.0, 0.5,
                      time_grid=np.linspace(0.0, 20.0, 21))
    return build_context(spec)
