from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.special import expit

import src.egw.constants as consts
from src.egw.exceptions import KernelOverflowError
from src.egw.measures import DiscreteMeasure


def cost_matrix(mu0: DiscreteMeasure, mu1: DiscreteMeasure, A: np.ndarray) -> np.ndarray:
    """c_A(x, y) = -4 |x|^2 |y|^2 - 32 x^T A y on the product of the supports"""
    A = np.asarray(A, dtype=np.float64)
    if A.shape != (mu0.dim, mu1.dim):
        raise ValueError(f"A must have shape {(mu0.dim, mu1.dim)}, got {A.shape}")

    return -4.0 * np.outer(mu0.sq_norms, mu1.sq_norms) - 32.0 * (mu0.points @ A @ mu1.points.T)


@dataclass(frozen=True, eq=False)
class Kernel:
    """Gibbs kernel exp(-C / eps), kept together with its logarithm"""

    matrix: np.ndarray
    log_matrix: np.ndarray
    cost_sup: float
    eps: float = 1.0

    @classmethod
    def from_cost(cls, cost: np.ndarray, eps: float, strict: bool = True) -> "Kernel":
        if eps <= 0:
            raise ValueError("'eps' must be > 0")

        cost = np.asarray(cost, dtype=np.float64)
        log_matrix = -cost / eps
        with np.errstate(over="ignore", under="ignore"):
            matrix = np.exp(log_matrix)
        if strict and not np.all(np.isfinite(matrix)):
            raise KernelOverflowError()

        return cls(
            matrix=matrix,
            log_matrix=log_matrix,
            cost_sup=float(np.max(np.abs(cost))),
            eps=float(eps),
        )

    @classmethod
    def from_matrix(cls, matrix: np.ndarray) -> "Kernel":
        """Wrap an arbitrary positive matrix (eps = 1, cost = -log K)"""
        matrix = np.asarray(matrix, dtype=np.float64)
        if matrix.ndim != 2 or not np.all(np.isfinite(matrix)) or np.any(matrix <= 0):
            raise ValueError("kernel entries must be finite and > 0")

        log_matrix = np.log(matrix)
        return cls(matrix=matrix, log_matrix=log_matrix, cost_sup=float(np.max(np.abs(log_matrix))))

    @property
    def shape(self) -> tuple:
        return self.matrix.shape

    @cached_property
    def log_eta(self) -> float:
        return log_cross_ratio(self.log_matrix)

    @cached_property
    def contraction(self) -> float:
        return contraction_coefficient(self)

    @cached_property
    def gap(self) -> float:
        return contraction_gap(self)


def build_kernel(
    mu0: DiscreteMeasure,
    mu1: DiscreteMeasure,
    A: np.ndarray,
    eps: float,
    strict: bool = True,
) -> Kernel:
    return Kernel.from_cost(cost_matrix(mu0, mu1, A), eps=eps, strict=strict)


def log_cross_ratio(
    log_matrix: np.ndarray, exhaustive_threshold: int = consts.EXHAUSTIVE_ETA_THRESHOLD
) -> float:
    """log eta = max over (i, j, k, l) of L_ik + L_jl - L_jk - L_il

    Exact when the kernel has at most `exhaustive_threshold` entries, otherwise an
    upper bound (which makes lambda conservative).
    """
    L = np.asarray(log_matrix, dtype=np.float64)
    # eta(K) = eta(K^T): pair up the rows of the shorter side
    if L.shape[0] > L.shape[1]:
        L = L.T

    if L.size <= exhaustive_threshold:
        log_eta = 0.0
        for row in L:
            diff = row[None, :] - L
            log_eta = max(log_eta, float(np.max(diff.max(axis=1) - diff.min(axis=1))))
        return log_eta

    # range_i(L_ik - L_il) <= range_i(L_ik) + range_i(L_il), and the same over columns
    col_bound = 2.0 * float(np.max(np.ptp(L, axis=0)))
    row_bound = 2.0 * float(np.max(np.ptp(L, axis=1)))
    return min(col_bound, row_bound)


def contraction_coefficient(K: Kernel) -> float:
    """lambda(K) = (sqrt(eta) - 1) / (sqrt(eta) + 1) = tanh(log(eta) / 4)"""
    return float(np.tanh(K.log_eta / 4.0))


def contraction_gap(K: Kernel) -> float:
    """1 - lambda(K) without cancellation"""
    return float(2.0 * expit(-K.log_eta / 2.0))
