import numpy as np
import pytest

from experiments import ExperimentConfig
from samplers import StreamSeed, derive_stream


@pytest.fixture
def stream_for():
    """Factory for seeded streams: stream_for(master, index)."""
    def make(master: int = 0, index: int = 0) -> np.random.Generator:
        return derive_stream(StreamSeed(master=master, index=index))
    return make


@pytest.fixture
def small_config():
    return ExperimentConfig(
        alpha_mode="inverse_n",
        n_grid=[16, 64],
        threshold_exponents=[1.0, 2.0],
        trials=50,
        master_seed=7,
        workers=2,
    )


@pytest.fixture
def squared_config():
    return ExperimentConfig(
        alpha_mode="inverse_n_squared",
        n_grid=[4, 16, 64],
        threshold_exponents=[2.0],
        trials=200,
        master_seed=3,
        workers=2,
    )
