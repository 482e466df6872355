import numpy as np
import pytest

from relchange import FunctionalSeries, Grid


def make_series(seed: int, n: int = 12, p: int = 4, scale: float = 1.0) -> FunctionalSeries:
    rng = np.random.default_rng(seed)
    return FunctionalSeries(Grid.uniform(p), scale * rng.standard_normal((n, p)))


@pytest.fixture
def uniform_grid():
    return Grid.uniform(11)
