from dataclasses import dataclass, replace
from enum import Enum
from functools import cached_property

import numpy as np

import src.egw.constants as consts
from src.egw.exceptions import ValidationError
from src.egw.measures import DiscreteMeasure, Moments, center, moments
from src.egw.oracle import Kernel, cost_matrix


class Convexity(str, Enum):
    CERTIFIED_CONVEX = "certified_convex"
    UNKNOWN = "unknown"


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    """Marginals, regularization and the constants the solvers and bounds rely on"""

    mu0: DiscreteMeasure
    mu1: DiscreteMeasure
    eps: float
    M: float
    L: float
    delta_oracle: float
    convexity: Convexity
    convexity_threshold: float
    moments0: Moments
    moments1: Moments
    centered: bool

    @property
    def shape(self) -> tuple:
        return self.mu0.dim, self.mu1.dim

    @property
    def m2_product(self) -> float:
        return float(np.sqrt(self.moments0.m2 * self.moments1.m2))

    @property
    def m4_product(self) -> float:
        return float(np.sqrt(self.moments0.m4 * self.moments1.m4))

    @property
    def L_ot(self) -> float:
        """Smoothness constant of A -> OT_{A, eps}"""
        return 32.0**2 / self.eps * self.m4_product

    @property
    def weak_convexity(self) -> float:
        return self.L_ot - 64.0

    @property
    def L_theoretical(self) -> float:
        return max(64.0, self.weak_convexity)

    @property
    def is_convex(self) -> bool:
        return self.convexity == Convexity.CERTIFIED_CONVEX

    @cached_property
    def atom_norm_sum(self) -> float:
        """sum_ij |x_i| |y_j|"""
        return float(self.mu0.norms.sum() * self.mu1.norms.sum())

    def delta_prime(self, delta: float = None) -> float:
        """Function-value error induced by a delta-oracle"""
        delta = self.delta_oracle if delta is None else delta
        return 32.0 * self.M * delta * self.atom_norm_sum

    def gradient_error(self, delta: float = None) -> float:
        """Bound on |G~ - G|_F for a delta-oracle"""
        delta = self.delta_oracle if delta is None else delta
        return 32.0 * delta * self.atom_norm_sum

    def cost_matrix(self, A: np.ndarray) -> np.ndarray:
        return cost_matrix(self.mu0, self.mu1, A)

    def kernel(self, A: np.ndarray, strict: bool = True) -> Kernel:
        return Kernel.from_cost(self.cost_matrix(A), eps=self.eps, strict=strict)

    def is_feasible(self, A: np.ndarray) -> bool:
        return bool(np.linalg.norm(A) <= self.M / 2 + consts.FEASIBILITY_ATOL)

    def zeros(self) -> np.ndarray:
        return np.zeros(self.shape)

    def default_start(self) -> np.ndarray:
        return np.ones(self.shape) * min(self.M, 1.0) * consts.START_SCALE

    def with_L(self, L: float) -> "ProblemSpec":
        if L <= 0:
            raise ValidationError("'L' must be > 0")
        return replace(self, L=float(L))


def build_problem(
    mu0: DiscreteMeasure,
    mu1: DiscreteMeasure,
    eps: float,
    M: float = None,
    L: float = None,
    delta_oracle: float = 0.0,
    center_measures: bool = True,
) -> ProblemSpec:
    """Fill M, L and the convexity flag for the pair (mu0, mu1) at regularization eps"""
    if eps is None or not np.isfinite(eps) or eps <= 0:
        raise ValidationError("'eps' must be a finite value > 0")
    if delta_oracle < 0:
        raise ValidationError("'delta_oracle' must be >= 0")

    if center_measures:
        mu0, mu1 = center(mu0), center(mu1)

    moments0, moments1 = moments(mu0), moments(mu1)
    m2_product = float(np.sqrt(moments0.m2 * moments1.m2))
    m4_product = float(np.sqrt(moments0.m4 * moments1.m4))

    if M is None:
        M = m2_product + consts.M_MARGIN
    elif M <= 0 or M < m2_product:
        raise ValidationError(f"'M' must be >= sqrt(M2(mu0) M2(mu1)) = {m2_product:.17g}")

    convex = m4_product < eps / 16.0
    if L is None:
        L = max(64.0, 32.0**2 / eps * m4_product - 64.0)
    elif L <= 0:
        raise ValidationError("'L' must be > 0")

    return ProblemSpec(
        mu0=mu0,
        mu1=mu1,
        eps=float(eps),
        M=float(M),
        L=float(L),
        delta_oracle=float(delta_oracle),
        convexity=Convexity.CERTIFIED_CONVEX if convex else Convexity.UNKNOWN,
        convexity_threshold=eps / 16.0,
        moments0=moments0,
        moments1=moments1,
        centered=mu0.is_centered() and mu1.is_centered(),
    )


def convex_margin_eps(
    mu0: DiscreteMeasure,
    mu1: DiscreteMeasure,
    margin: float = consts.CONVEX_MARGIN,
    center_measures: bool = True,
) -> float:
    """eps = margin * 16 * sqrt(M4(mu0) M4(mu1))"""
    if center_measures:
        mu0, mu1 = center(mu0), center(mu1)
    m4_product = np.sqrt(moments(mu0).m4 * moments(mu1).m4)
    return float(margin * 16.0 * m4_product)
