import numpy as np
import pytest

from pathset import GeneratorSpec, generate_scene


@pytest.fixture(scope="session")
def small_scene():
    return generate_scene(GeneratorSpec(obstacle_count=10, side_length=1.0, seed=42))


@pytest.fixture(scope="session")
def medium_scene():
    return generate_scene(GeneratorSpec(obstacle_count=20, side_length=1.5, seed=7))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
