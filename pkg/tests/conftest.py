import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", max_examples=60, deadline=None,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_halfplane(rng, n):
    r = np.exp(rng.uniform(-4, 4, n))
    theta = rng.uniform(-1.5, 1.5, n)
    return r * np.exp(1j * theta)


def random_disc(rng, n):
    r = np.sqrt(rng.uniform(0, 0.998, n))
    return r * np.exp(1j * rng.uniform(-np.pi, np.pi, n))
