import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "canopyfit",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("canopyfit")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def small_camera():
    from canopyfit.render.camera import canonical_camera

    return canonical_camera(1.0, width=120, height=90)
