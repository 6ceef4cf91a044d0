import numpy as np

import src.egw.constants as consts
from src.egw.measures.measure import DiscreteMeasure, normalize


def random_measure(
    n_atoms: int, dim: int, sigma: float, rng: np.random.Generator
) -> DiscreteMeasure:
    """Mean-zero normal atoms with uniformly drawn, normalized weights"""
    if n_atoms < 1 or dim < 1:
        raise ValueError("'n_atoms' and 'dim' must be >= 1")
    if sigma <= 0:
        raise ValueError("'sigma' must be > 0")

    points = rng.normal(0.0, sigma, size=(n_atoms, dim))
    # 1 - U[0, 1) lies in (0, 1], so no atom gets zero mass
    weights = 1.0 - rng.random(n_atoms)
    return DiscreteMeasure(points=points, weights=normalize(weights))


def instance_rng(seed: int, *keys: int) -> np.random.Generator:
    """Independent stream per (seed, keys) so results do not depend on run order"""
    return np.random.default_rng([int(seed), *[int(k) for k in keys]])


def random_instance(
    n_atoms: int,
    dim: int,
    seed: int,
    trial: int = 0,
    sigma0: float = consts.SIGMA_0,
    sigma1: float = consts.SIGMA_1,
) -> tuple:
    rng = instance_rng(seed, dim, n_atoms, trial)
    mu0 = random_measure(n_atoms, dim, sigma0, rng)
    mu1 = random_measure(n_atoms, dim, sigma1, rng)
    return mu0, mu1
