import numpy as np
import pytest

from ncagen import GenConfig, Trajectory


@pytest.fixture
def rng():
    return np.random.default_rng(20260814)


@pytest.fixture
def default_config():
    return GenConfig()


def random_trajectory(rng, n: int, timesteps: int = 26, grid_h: int = 12, grid_w: int = 12):
    """Uniform random grids; the tokenizer does not care about dynamics."""
    grids = tuple(
        rng.integers(0, n, (grid_h, grid_w)).astype(np.uint8) for _ in range(timesteps)
    )
    return Trajectory(rule_seed=0, grids=grids)


@pytest.fixture
def make_trajectory():
    return random_trajectory
