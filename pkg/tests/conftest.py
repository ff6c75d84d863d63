import numpy as np
import pytest

from scenario_config import ScenarioConfig, from_flat


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture
def calm_config() -> ScenarioConfig:
    """Default economy with no sentiment noise."""
    return from_flat({"sigma": 0.0})
