import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "unit",
    derandomize=True,
    max_examples=200,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("unit")


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(0xC0FFEE)


def unit_vector(rng: np.random.Generator, dimension: int) -> np.ndarray:
    """A random unit vector that is never degenerate."""
    while True:
        v = rng.normal(size=dimension)
        norm = np.linalg.norm(v)
        if norm > 1e-6:
            return v / norm
