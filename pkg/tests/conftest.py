import numpy as np
import pytest

import retrialsi as rs


@pytest.fixture(scope="session")
def wellmixed_config():
    # reference well-mixed setup used throughout the suite
    return rs.ModelConfig(N=10, c=5, alpha=5.0, mu=0.4, theta=2.0)


@pytest.fixture(scope="session")
def wellmixed_generator(wellmixed_config):
    return rs.build_generator(wellmixed_config, rs.rate_function(wellmixed_config))


@pytest.fixture(scope="session")
def wellmixed_p0(wellmixed_config):
    return rs.delta_vector(wellmixed_config.space, wellmixed_config.initial_state)


@pytest.fixture(scope="session")
def tiny_config():
    # 4-state chain; small enough to check against hand calculations
    return rs.ModelConfig(N=2, c=1, alpha=5.0, mu=0.4, theta=2.0)


@pytest.fixture(scope="session")
def tiny_generator(tiny_config):
    return rs.build_generator(tiny_config, rs.rate_function(tiny_config))


@pytest.fixture(scope="session")
def two_state_toy():
    # symmetric toy generator, closed-form transient and stationary behavior
    return rs.GeneratorMatrix.from_dense(np.array([[-1.0, 1.0], [1.0, -1.0]]))
