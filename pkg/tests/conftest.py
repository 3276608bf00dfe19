"""Shared fixtures: small instances and cached oracle references."""
from __future__ import annotations

import pytest

from regretgls.instance import generate_random
from regretgls.regret import exact_optimum


@pytest.fixture(scope="session")
def square():
    # Unit square, nodes in corner order 0..3: optimum is the perimeter, cost 4.
    import numpy as np

    from regretgls.instance import Instance, METRIC_EUCLIDEAN

    coords = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    return Instance(name="square", n=4, coords=coords, metric=METRIC_EUCLIDEAN)


@pytest.fixture(scope="session")
def inst10():
    return generate_random(10, seed=7)


@pytest.fixture(scope="session")
def inst20():
    return generate_random(20, seed=7)


@pytest.fixture(scope="session")
def opt10(inst10):
    return exact_optimum(inst10)


@pytest.fixture(scope="session")
def opt20(inst20):
    return exact_optimum(inst20)
