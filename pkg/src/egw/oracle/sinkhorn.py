"""
Sinkhorn iterations with a certified error on the output coupling.

d(P, Q) below is the metric d_H(u, u') + d_H(v, v') between couplings
P = diag(u) K diag(v) and Q = diag(u') K diag(v'); it controls the entrywise
error through |P - Q|_inf <= exp(d(P, Q)) - 1.
"""

from dataclasses import asdict, dataclass

import numpy as np
from scipy.special import logsumexp

import src.egw.constants as consts
from src.egw.exceptions import KernelOverflowError, KernelUnderflowError, OracleToleranceError
from src.egw.oracle.hilbert import hilbert_distance, hilbert_distance_log
from src.egw.oracle.kernel import Kernel
from src.utils.logger import logger


@dataclass(frozen=True, eq=False)
class Coupling:
    plan: np.ndarray
    u: np.ndarray
    v: np.ndarray
    log_u: np.ndarray = None
    log_v: np.ndarray = None

    @property
    def shape(self) -> tuple:
        return self.plan.shape

    @property
    def row_marginal(self) -> np.ndarray:
        return self.plan.sum(axis=1)

    @property
    def col_marginal(self) -> np.ndarray:
        return self.plan.sum(axis=0)

    def log_scalings(self) -> tuple:
        if self.log_u is not None:
            return self.log_u, self.log_v
        return np.log(self.u), np.log(self.v)


@dataclass(frozen=True)
class OracleCertificate:
    delta_hilbert: float
    delta_sup: float
    iterations: int
    lambda_K: float
    marginal_violation: float
    converged: bool = True
    certified: bool = True
    gamma: float = float("nan")
    first_iterate_distance: float = float("nan")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "OracleCertificate":
        return cls(**data)


def _weights(x, name: str) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if not np.all(np.isfinite(x)) or np.any(x <= 0):
        raise ValueError(f"'{name}' must have finite entries > 0")
    return x


def _check_inputs(K: Kernel, a, b, gamma: float, k_max: int) -> tuple:
    a, b = _weights(a, "a"), _weights(b, "b")
    if K.shape != (a.shape[0], b.shape[0]):
        raise ValueError(f"kernel shape {K.shape} does not match marginals")
    if gamma <= 0:
        raise ValueError("'gamma' must be > 0")
    if k_max < 1:
        raise ValueError("'k_max' must be >= 1")
    return a, b


def certify(
    K: Kernel,
    b: np.ndarray,
    w: np.ndarray,
    iterations: int,
    converged: bool,
    gamma: float,
    first_iterate_distance: float,
    certified: bool = True,
) -> OracleCertificate:
    """Bound d(P, P*) from the column marginal w of the returned coupling"""
    violation = float(np.linalg.norm(w - b))
    ratio = w / b
    # np.argmax/np.argmin return the lowest index on ties
    i_max = int(np.argmax(ratio))
    i_min = int(np.argmin(ratio))
    delta_hilbert = (1.0 / w[i_min] + 1.0 / b[i_max]) / K.gap * violation

    with np.errstate(over="ignore"):
        delta_sup = float(np.expm1(delta_hilbert))

    return OracleCertificate(
        delta_hilbert=float(delta_hilbert),
        delta_sup=delta_sup,
        iterations=int(iterations),
        lambda_K=K.contraction,
        marginal_violation=violation,
        converged=bool(converged),
        certified=certified,
        gamma=float(gamma),
        first_iterate_distance=float(first_iterate_distance),
    )


def sinkhorn(
    K: Kernel,
    a,
    b,
    gamma: float,
    k_max: int = consts.SINKHORN_KMAX,
    u0: np.ndarray = None,
) -> tuple:
    """Alternating scaling v = b / K^T u, u = a / K v until |P^T 1 - b|_2 < gamma

    Returns (Coupling, OracleCertificate). Running out of iterations is not an
    error: the last iterate is returned with `converged=False`.
    """
    a, b = _check_inputs(K, a, b, gamma, k_max)
    matrix = K.matrix
    u = np.full(a.shape[0], 1.0 / a.shape[0]) if u0 is None else np.array(u0, dtype=np.float64)

    Ktu = matrix.T @ u
    first_distance = float("nan")
    converged = False
    k = 0
    for k in range(1, k_max + 1):
        if not np.all(Ktu > 0):
            raise KernelUnderflowError()
        v = b / Ktu
        Kv = matrix @ v
        if not np.all(Kv > 0):
            raise KernelUnderflowError()
        u = a / Kv
        if not np.all(np.isfinite(u)) or not np.all(np.isfinite(v)):
            raise KernelOverflowError("Sinkhorn scalings overflowed, increase eps or rescale data")

        # K^T u is reused by the next v-update
        Ktu = matrix.T @ u
        w = v * Ktu
        if not np.all(w > 0):
            raise KernelUnderflowError()
        if k == 1:
            first_distance = hilbert_distance(w, b)
        if np.linalg.norm(w - b) < gamma:
            converged = True
            break

    if not converged:
        logger.debug(f"Sinkhorn stopped at k_max={k_max} before reaching gamma={gamma:.3e}")

    plan = u[:, None] * matrix * v[None, :]
    certificate = certify(K, b, w, k, converged, gamma, first_distance)
    return Coupling(plan=plan, u=u, v=v), certificate


def sinkhorn_log(
    K: Kernel,
    a,
    b,
    gamma: float,
    k_max: int = consts.SINKHORN_KMAX,
    log_u0: np.ndarray = None,
) -> tuple:
    """Log-domain Sinkhorn; stable when K under- or overflows, certificate flagged uncertified"""
    a, b = _check_inputs(K, a, b, gamma, k_max)
    log_a, log_b = np.log(a), np.log(b)
    L = K.log_matrix
    if log_u0 is None:
        log_u = np.full(a.shape[0], -np.log(a.shape[0]))
    else:
        log_u = np.array(log_u0, dtype=np.float64)

    log_Ktu = logsumexp(L + log_u[:, None], axis=0)
    first_distance = float("nan")
    converged = False
    k = 0
    for k in range(1, k_max + 1):
        log_v = log_b - log_Ktu
        log_u = log_a - logsumexp(L + log_v[None, :], axis=1)
        log_Ktu = logsumexp(L + log_u[:, None], axis=0)
        log_w = log_v + log_Ktu
        w = np.exp(log_w)
        if k == 1:
            first_distance = hilbert_distance_log(log_w, log_b)
        if np.linalg.norm(w - b) < gamma:
            converged = True
            break

    with np.errstate(over="ignore", under="ignore"):
        plan = np.exp(log_u[:, None] + L + log_v[None, :])
        u, v = np.exp(log_u), np.exp(log_v)

    w = np.maximum(w, np.finfo(np.float64).tiny)
    certificate = certify(K, b, w, k, converged, gamma, first_distance, certified=False)
    coupling = Coupling(plan=plan, u=u, v=v, log_u=log_u, log_v=log_v)
    return coupling, certificate


def coupling_distance(first: Coupling, second: Coupling) -> float:
    """d(P, Q) = d_H(u, u') + d_H(v, v') for couplings of the same kernel"""
    log_u0, log_v0 = first.log_scalings()
    log_u1, log_v1 = second.log_scalings()
    return hilbert_distance_log(log_u0, log_u1) + hilbert_distance_log(log_v0, log_v1)


def tolerance_alpha(delta: float, gap: float) -> float:
    """Root in (0, 1) of (2a - a^2) / (1 - a) = delta * gap, written without cancellation"""
    t = delta * gap
    return 2.0 * t / (t + 2.0 + np.sqrt(t * t + 4.0))


def oracle_tolerance_schedule(
    delta_target: float,
    K: Kernel,
    b,
    floor: float = None,
    warn: bool = True,
) -> float:
    """Stopping tolerance gamma that certifies d(P, P*) <= delta_target

    With `floor`, a gamma below it is raised to the floor (the certificate then
    reports the radius actually reached) instead of raising.
    """
    if delta_target <= 0:
        raise ValueError("'delta_target' must be > 0")

    b = _weights(b, "b")
    b_min = float(np.min(b))
    gamma = tolerance_alpha(delta_target, K.gap) * b_min

    minimum = consts.MIN_GAMMA if floor is None else floor
    if gamma >= minimum and gamma > 0:
        return float(gamma)

    if floor is not None:
        if warn:
            logger.warning(f"Sinkhorn tolerance {gamma:.3e} raised to the floor {floor:.3e}")
        return float(floor)

    # invert gamma = alpha * b_min at the smallest usable gamma
    alpha = consts.MIN_GAMMA / b_min
    suggested = (2.0 * alpha - alpha**2) / (1.0 - alpha) / K.gap
    raise OracleToleranceError(
        f"delta_target={delta_target:.3e} needs gamma={gamma:.3e}, below float precision;"
        f" use delta_target >= {suggested:.3e}",
        suggested_minimum=float(suggested),
    )


def max_iterations_bound(
    K: Kernel,
    a,
    b,
    delta: float,
    first_iterate_violation: float,
) -> int:
    """A-priori number of iterations after which d(P_k, P*) <= delta

    The bound is on the true distance to the optimal coupling. The gamma stopping
    rule measures it through the marginal-violation certificate, which can fire
    a few iterations later.

    `first_iterate_violation` is d_H(P_1^T 1, b), measured after the first
    (v, u) update.
    """
    if delta <= 0:
        raise ValueError("'delta' must be > 0")
    a, b = _weights(a, "a"), _weights(b, "b")

    lam, gap = K.contraction, K.gap
    b_min = float(np.min(b))
    alpha = tolerance_alpha(delta, gap)
    radius = -2.0 * (-K.cost_sup / K.eps + np.log(min(np.min(a), b_min)))
    bound = 1.0 + radius / (alpha * b_min)

    if lam > 0:
        if first_iterate_violation <= delta * gap:
            bound = 1.0
        else:
            log_lambda = np.log1p(-gap)
            contraction_bound = 1.0 + np.log(delta * gap / first_iterate_violation) / (
                2.0 * log_lambda
            )
            bound = min(bound, contraction_bound)

    return max(1, int(np.ceil(bound)))


class SinkhornOracle:
    """Sinkhorn runs that reuse the previous scaling u as the next starting point"""

    def __init__(
        self,
        k_max: int = consts.SINKHORN_KMAX,
        warm_start: bool = True,
        log_domain: bool = False,
    ):
        self.k_max = k_max
        self.warm_start = warm_start
        self.log_domain = log_domain
        self.calls = 0
        self.total_iterations = 0
        self._log_u = None

    def _start(self, n_rows: int):
        if not self.warm_start or self._log_u is None or self._log_u.shape[0] != n_rows:
            return None
        return self._log_u

    def __call__(self, K: Kernel, a, b, gamma: float) -> tuple:
        log_u0 = self._start(K.shape[0])
        if self.log_domain:
            coupling, certificate = sinkhorn_log(K, a, b, gamma, k_max=self.k_max, log_u0=log_u0)
        else:
            u0 = None if log_u0 is None else np.exp(log_u0)
            coupling, certificate = sinkhorn(K, a, b, gamma, k_max=self.k_max, u0=u0)

        self._log_u = coupling.log_scalings()[0]
        self.calls += 1
        self.total_iterations += certificate.iterations
        return coupling, certificate
