import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from udisk.geometry import Point

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", deadline=None, max_examples=25,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", deadline=None, max_examples=500,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def points_from(arr, start_id=0):
    return [Point(float(a), float(b), start_id + i) for i, (a, b) in enumerate(arr)]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
