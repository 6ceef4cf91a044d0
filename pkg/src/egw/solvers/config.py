from dataclasses import asdict, dataclass
from enum import Enum

import src.egw.constants as consts
from src.egw.core import ProblemSpec
from src.egw.exceptions import ValidationError


class Algorithm(str, Enum):
    FGM = "fgm"
    ADAPTIVE = "adaptive"
    AUTO = "auto"


class LMode(str, Enum):
    THEORETICAL = "theoretical"
    FIXED = "fixed"
    SEARCH = "search"


class Projection(str, Enum):
    BALL = "ball"
    BOX = "box"


class Status(str, Enum):
    CONVERGED = "converged"
    MAX_ITERS = "max_iters"
    ABORTED = "aborted"


@dataclass(frozen=True)
class SolveConfig:
    """Settings of one solve; `delta_oracle=None` derives the oracle radius from grad_tol"""

    algorithm: Algorithm = Algorithm.AUTO
    grad_tol: float = consts.GRAD_TOL
    max_outer_iters: int = consts.MAX_OUTER_ITERS
    delta_oracle: float = None
    L_mode: LMode = LMode.THEORETICAL
    L_value: float = None
    line_search_shrink: float = consts.LINE_SEARCH_SHRINK
    line_search_max_steps: int = consts.LINE_SEARCH_MAX_STEPS
    warm_start: bool = True
    seed: int = 0
    sinkhorn_kmax: int = consts.SOLVER_SINKHORN_KMAX
    sinkhorn_gamma_floor: float = consts.SINKHORN_GAMMA_FLOOR
    log_domain: bool = False
    projection: Projection = Projection.BALL
    target_gap: float = None

    def __post_init__(self):
        try:
            object.__setattr__(self, "algorithm", Algorithm(self.algorithm))
            object.__setattr__(self, "L_mode", LMode(self.L_mode))
            object.__setattr__(self, "projection", Projection(self.projection))
        except ValueError as e:
            raise ValidationError(str(e)) from e

        if not self.grad_tol > 0:
            raise ValidationError("'grad_tol' must be > 0")
        if self.max_outer_iters < 1:
            raise ValidationError("'max_outer_iters' must be >= 1")
        if self.delta_oracle is not None and not self.delta_oracle > 0:
            raise ValidationError("'delta_oracle' must be > 0")
        if self.L_mode == LMode.FIXED and (self.L_value is None or not self.L_value > 0):
            raise ValidationError("L_mode 'fixed' needs 'L_value' > 0")
        if not 0 < self.line_search_shrink < 1:
            raise ValidationError("'line_search_shrink' must be in (0, 1)")
        if self.line_search_max_steps < 1:
            raise ValidationError("'line_search_max_steps' must be >= 1")
        if self.sinkhorn_kmax < 1:
            raise ValidationError("'sinkhorn_kmax' must be >= 1")
        if not 0 < self.sinkhorn_gamma_floor < 1:
            raise ValidationError("'sinkhorn_gamma_floor' must be in (0, 1)")
        if self.target_gap is not None and not self.target_gap > 0:
            raise ValidationError("'target_gap' must be > 0")

    def oracle_delta(self, spec: ProblemSpec) -> float:
        """Sup-norm oracle radius; by default delta' = grad_tol / 10"""
        if self.delta_oracle is not None:
            return float(self.delta_oracle)

        scale = 32.0 * spec.M * spec.atom_norm_sum
        if scale == 0:
            return consts.DEFAULT_DELTA
        return min(consts.DEFAULT_DELTA, self.grad_tol / (consts.ORACLE_ERROR_FRACTION * scale))

    def resolve_algorithm(self, spec: ProblemSpec) -> Algorithm:
        if self.algorithm == Algorithm.AUTO:
            return Algorithm.FGM if spec.is_convex else Algorithm.ADAPTIVE
        return self.algorithm

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "SolveConfig":
        return cls(**data)
