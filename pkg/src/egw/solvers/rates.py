"""
Theoretical rate envelopes of the two gradient methods.

The unknown minimizer B* is replaced by the best iterate of the run
(lowest Phi among the recorded B_k), so the envelopes are proxies.
"""

import numpy as np


def fgm_rate_envelope(k: int, L: float, best_norm: float, delta_prime: float) -> float:
    """Bound on Phi(B_k) - Phi(B*) after iteration k (counted from 0)"""
    if k < 0:
        raise ValueError("'k' must be >= 0")
    return 2.0 * L * best_norm**2 / ((k + 1) * (k + 2)) + 3.0 * delta_prime


def adaptive_rate_envelope(
    k: int,
    L: float,
    start_distance: float,
    delta_prime: float,
    L_ot: float = None,
    best_norm: float = None,
    M: float = None,
) -> float:
    """Bound on min_{i <= k} |(B_i - A_i) / beta_i|_F^2 (k counted from 1)

    Without `L_ot` the convex form is returned; otherwise `best_norm` and `M`
    enter the nonconvex term.
    """
    if k < 1:
        raise ValueError("'k' must be >= 1")

    envelope = 96.0 * L**2 * start_distance**2 / (k * (k + 1) * (k + 2)) + 8.0 * L * delta_prime
    if L_ot is not None:
        if best_norm is None or M is None:
            raise ValueError("the nonconvex envelope needs 'best_norm' and 'M'")
        envelope += 24.0 * L * L_ot / k * (best_norm**2 + 5.0 * M**2 / 16.0)
    return envelope


def fgm_iteration_budget(M: float, eta: float, delta_prime: float, L: float = 64.0) -> int:
    """Iterations after which the fast gradient method is eta-optimal, with |B*|_F <= M / 2"""
    if eta <= 3.0 * delta_prime:
        raise ValueError(f"'eta' must exceed 3 delta' = {3.0 * delta_prime:.3e}")
    budget = -1.5 + 0.5 * np.sqrt(1.0 + 2.0 * L * M**2 / (eta - 3.0 * delta_prime))
    return max(1, int(np.ceil(budget)))
