import pytest
from hypothesis import HealthCheck, settings

from lambshift import FockConfig, SystemParams

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture
def reference():
    """Transmon-like point: omega_r = 1.25, lambda = 0.01, g = 0.02 in units of omega_a."""
    return SystemParams(1.0, 1.25, 0.01, 0.02)


@pytest.fixture
def cfg():
    return FockConfig()
