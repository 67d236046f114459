import math
import random

import pytest
from hypothesis import HealthCheck, settings, strategies as st

settings.register_profile(
    "lab",
    max_examples=100,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("lab")


def disk_points(rmax=0.9):
    """Strategy for interior disk points with |z| <= rmax."""
    return st.builds(
        lambda r, a: r * rmax * complex(math.cos(a), math.sin(a)),
        st.floats(0.0, 1.0),
        st.floats(-math.pi, math.pi),
    )


def halfplane_points(span=3.0):
    return st.builds(
        complex,
        st.floats(-span, span),
        st.floats(0.05, span),
    )


def sample_disk(rng: random.Random, rmax: float = 0.9) -> complex:
    r = rmax * math.sqrt(rng.random())
    ang = rng.uniform(-math.pi, math.pi)
    return r * complex(math.cos(ang), math.sin(ang))


@pytest.fixture
def rng():
    return random.Random(987654321)
