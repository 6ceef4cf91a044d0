from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

import src.egw.constants as consts
from src.egw.core.problem import ProblemSpec
from src.egw.exceptions import UncenteredMeasureError
from src.egw.measures import DiscreteMeasure, moments
from src.egw.oracle import (
    Coupling,
    Kernel,
    OracleCertificate,
    SinkhornOracle,
    oracle_tolerance_schedule,
)
from src.utils.logger import logger


@dataclass(frozen=True, eq=False)
class PhiEvaluation:
    value: float
    certificate: OracleCertificate
    coupling: Coupling
    clamped: bool = False


def kl_divergence(plan: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    """KL(plan | a b^T) with 0 log 0 = 0"""
    mask = plan > consts.KL_ZERO_THRESHOLD
    reference = np.outer(a, b)
    return float(np.sum(plan[mask] * np.log(plan[mask] / reference[mask])))


def ot_objective(cost: np.ndarray, plan: np.ndarray, a, b, eps: float) -> float:
    return float(np.sum(cost * plan)) + eps * kl_divergence(plan, a, b)


def phi(
    spec: ProblemSpec,
    A: np.ndarray,
    delta: float = None,
    oracle: SinkhornOracle = None,
    gamma_floor: float = consts.SINKHORN_GAMMA_FLOOR,
) -> PhiEvaluation:
    """32 |A|_F^2 + OT_{A, eps}, with the coupling certified to sup-norm error `delta`

    The Sinkhorn tolerance is never set below `gamma_floor * min(b)`; when it is
    clamped the certificate carries the radius actually reached.
    """
    delta = spec.delta_oracle if delta is None else delta
    if delta <= 0:
        raise ValueError("oracle radius 'delta' must be > 0")

    oracle = oracle or SinkhornOracle(warm_start=False)
    A = np.asarray(A, dtype=np.float64)
    cost = spec.cost_matrix(A)
    K = Kernel.from_cost(cost, eps=spec.eps, strict=not oracle.log_domain)
    a, b = spec.mu0.weights, spec.mu1.weights

    # |P - P*|_inf <= exp(d) - 1, so d = log(1 + delta) gives the sup-norm radius
    floor = max(gamma_floor * float(np.min(b)), consts.MIN_GAMMA)
    gamma = oracle_tolerance_schedule(np.log1p(delta), K, b, floor=floor, warn=False)
    coupling, certificate = oracle(K, a, b, gamma)

    value = 32.0 * float(np.sum(A * A)) + ot_objective(cost, coupling.plan, a, b, spec.eps)
    return PhiEvaluation(
        value=value, certificate=certificate, coupling=coupling, clamped=gamma <= floor
    )


def gradient(spec: ProblemSpec, A: np.ndarray, plan) -> np.ndarray:
    """64 A - 32 sum_ij P_ij x_i y_j^T"""
    plan = plan.plan if isinstance(plan, Coupling) else np.asarray(plan, dtype=np.float64)
    if plan.shape != (spec.mu0.n_atoms, spec.mu1.n_atoms):
        raise ValueError(f"plan shape {plan.shape} does not match the marginals")

    return 64.0 * np.asarray(A, dtype=np.float64) - 32.0 * (
        spec.mu0.points.T @ plan @ spec.mu1.points
    )


def stationarity_gap(spec: ProblemSpec, A: np.ndarray, plan) -> float:
    """|A - 1/2 sum_ij P_ij x_i y_j^T|_F, zero at stationary points"""
    return float(np.linalg.norm(gradient(spec, A, plan)) / 64.0)


def project_dm(A: np.ndarray, M: float) -> np.ndarray:
    """Projection onto the Frobenius ball of radius M / 2"""
    if M <= 0:
        raise ValueError("'M' must be > 0")

    A = np.asarray(A, dtype=np.float64)
    norm = np.linalg.norm(A)
    if norm <= M / 2:
        return A.copy()
    return A * (M / 2 / norm)


def project_box(A: np.ndarray, M: float) -> np.ndarray:
    """Entrywise clamp to [-M/2, M/2]"""
    if M <= 0:
        raise ValueError("'M' must be > 0")
    return np.clip(np.asarray(A, dtype=np.float64), -M / 2, M / 2)


def _pairwise_fourth_moment(m: DiscreteMeasure) -> float:
    """sum_ii' w_i w_i' |x_i - x_i'|^4, accumulated in row blocks"""
    total = 0.0
    for start in range(0, m.n_atoms, consts.PAIRWISE_BLOCK_SIZE):
        stop = start + consts.PAIRWISE_BLOCK_SIZE
        sq_dist = cdist(m.points[start:stop], m.points, "sqeuclidean")
        total += float(m.weights[start:stop] @ sq_dist**2 @ m.weights)
    return total


def s1_constant(mu0: DiscreteMeasure, mu1: DiscreteMeasure) -> float:
    cross = moments(mu0).m2 * moments(mu1).m2
    return _pairwise_fourth_moment(mu0) + _pairwise_fourth_moment(mu1) - 4.0 * cross


def egw_value(
    spec: ProblemSpec,
    A: np.ndarray,
    plan,
    allow_uncentered: bool = False,
) -> float:
    """S1 + 32 |A|_F^2 + OT objective of the plan"""
    if not spec.centered:
        if not allow_uncentered:
            raise UncenteredMeasureError(
                "marginals are not centered; center them or pass allow_uncentered"
            )
        logger.warning("Decomposition valid only for centered marginals")

    plan = plan.plan if isinstance(plan, Coupling) else np.asarray(plan, dtype=np.float64)
    A = np.asarray(A, dtype=np.float64)
    a, b = spec.mu0.weights, spec.mu1.weights
    s2 = 32.0 * float(np.sum(A * A)) + ot_objective(spec.cost_matrix(A), plan, a, b, spec.eps)
    return s1_constant(spec.mu0, spec.mu1) + s2


def gw_objective(mu0: DiscreteMeasure, mu1: DiscreteMeasure, plan, eps: float) -> float:
    """Quadratic EGW objective of a plan, evaluated directly

    sum (|x - x'|^2 - |y - y'|^2)^2 P_ij P_i'j' + eps KL(P | mu0 x mu1)
    """
    plan = plan.plan if isinstance(plan, Coupling) else np.asarray(plan, dtype=np.float64)
    dist0 = cdist(mu0.points, mu0.points, "sqeuclidean")
    dist1 = cdist(mu1.points, mu1.points, "sqeuclidean")
    rows, cols = plan.sum(axis=1), plan.sum(axis=0)

    distortion = (
        rows @ dist0**2 @ rows
        + cols @ dist1**2 @ cols
        - 2.0 * float(np.sum(plan * (dist0 @ plan @ dist1)))
    )
    return float(distortion) + eps * kl_divergence(plan, mu0.weights, mu1.weights)
