import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from varlp.config import ExperimentConfig
from varlp.harness import RunContext, load_fixtures

settings.register_profile(
    "numerics", deadline=None, max_examples=50,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("numerics")


@pytest.fixture(scope="session")
def fixtures():
    return load_fixtures()


@pytest.fixture(scope="session")
def ctx(fixtures):
    return RunContext(config=ExperimentConfig(), fixtures=fixtures)


@pytest.fixture(scope="session")
def grid(ctx):
    return ctx.grid()


@pytest.fixture(scope="session")
def family(ctx):
    return ctx.family()


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(12345)
