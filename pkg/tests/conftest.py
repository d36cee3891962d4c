import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_intervals(rng, count: int, mean: float = 850.0, sd: float = 60.0) -> np.ndarray:
    """Positive, HRV-plausible random interval series."""
    return np.clip(mean + sd * rng.standard_normal(count), 250.0, None)


def clean_random_intervals(rng, count: int, mean: float = 850.0, sd: float = 35.0) -> np.ndarray:
    """Random series guaranteed under the 20% median-of-5 outlier rule.

    Values are clipped to +-8% of the mean, so the worst possible deviation
    from any window median is below 18%.
    """
    return np.clip(mean + sd * rng.standard_normal(count), 0.92 * mean, 1.08 * mean)
