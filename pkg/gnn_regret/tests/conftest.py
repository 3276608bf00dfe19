import pytest

from regretgls.data import build_record
from regretgls.instance import generate_random

from gnn_regret.model import ModelConfig


@pytest.fixture(scope="session")
def records10():
    """Ten n=10 records with every feature channel and oracle targets."""
    return [build_record(generate_random(10, seed=100 + i)) for i in range(10)]


@pytest.fixture(scope="session")
def record6():
    return build_record(generate_random(6, seed=1))


@pytest.fixture(scope="session")
def small_cfg():
    # throwaway dimensions; unit tests that only exercise plumbing
    return ModelConfig(d_x=1, d_h=16, T=1, heads=2, ff_dim=32)
