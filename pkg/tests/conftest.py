import os

import numpy as np
import pytest

from src.egw.measures import DiscreteMeasure, random_instance


def pytest_collection_modifyitems(config, items):
    if os.getenv("EGW_RUN_SLOW") == "1":
        return

    skip_slow = pytest.mark.skip(reason="set EGW_RUN_SLOW=1 to run")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def two_point():
    """mu0 = mu1 = (delta_0 + delta_1) / 2 on the real line"""
    m = DiscreteMeasure(points=[[0.0], [1.0]], weights=[0.5, 0.5])
    return m, m


@pytest.fixture
def convex_pair():
    """Uncentered two-atom measures on the line, solved at eps = 1.05 * 16 sqrt(M4 M4)"""
    mu0 = DiscreteMeasure(points=[[-1.4], [1.2]], weights=[0.4, 0.6])
    mu1 = DiscreteMeasure(points=[[-1.01], [1.31]], weights=[0.4, 0.6])
    return mu0, mu1


@pytest.fixture
def nonconvex_pair():
    """Three atoms on the line against three atoms in the plane, eps = 0.07"""
    mu0 = DiscreteMeasure(points=[[0.3], [-0.8], [-0.5]], weights=np.full(3, 1 / 3))
    mu1 = DiscreteMeasure(
        points=[[0.1, 0.6], [-0.5, 0.3], [0.4, -0.3]], weights=np.full(3, 1 / 3)
    )
    return mu0, mu1


@pytest.fixture
def symmetric_pair():
    """mu1 is invariant under x -> -x"""
    points = [[0.1, 0.0], [-0.05, 0.2], [-0.05, -0.2]]
    mu0 = DiscreteMeasure(points=points, weights=[0.5, 0.25, 0.25])
    mu1 = DiscreteMeasure(points=[[0.3], [-0.3], [0.1], [-0.1]], weights=[0.2, 0.2, 0.3, 0.3])
    return mu0, mu1


@pytest.fixture
def random_pair():
    def make(n_atoms: int = 6, dim: int = 2, trial: int = 0, seed: int = 7):
        return random_instance(n_atoms, dim, seed=seed, trial=trial)

    return make


@pytest.fixture
def raster():
    """Asymmetric toy image, zero pixels dropped on ingestion"""
    return np.array(
        [
            [0.0, 1.0, 0.0, 0.0, 0.0],
            [0.0, 2.0, 1.0, 0.0, 0.0],
            [0.0, 3.0, 0.0, 1.0, 0.0],
            [0.0, 1.0, 0.0, 0.0, 0.0],
            [0.0, 2.0, 2.0, 2.0, 0.0],
        ]
    )
