import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "repo",
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")


@pytest.fixture
def two_state():
    K = np.array([[0.9, 0.1], [0.2, 0.8]])
    return K, np.array([2 / 3, 1 / 3])


@pytest.fixture
def flip():
    return np.array([[0.0, 1.0], [1.0, 0.0]]), np.array([0.5, 0.5])


@pytest.fixture
def three_cycle():
    return np.roll(np.eye(3), 1, axis=1), np.full(3, 1 / 3)
