from dataclasses import asdict, dataclass, field
from enum import Enum

import src.egw.constants as consts
from src.egw.core import convex_margin_eps
from src.egw.exceptions import ValidationError
from src.egw.measures import DiscreteMeasure


class EpsRule(str, Enum):
    CONVEX_MARGIN = "convex_margin"
    NONCONVEX_MARGIN = "nonconvex_margin"
    FIXED = "fixed"


@dataclass(frozen=True)
class GeneratorSpec:
    """Normal atoms around the origin with uniform random weights"""

    sigma0: float = consts.SIGMA_0
    sigma1: float = consts.SIGMA_1
    seed: int = 0

    def __post_init__(self):
        if not self.sigma0 > 0 or not self.sigma1 > 0:
            raise ValidationError("generator sigmas must be > 0")


@dataclass(frozen=True)
class BenchmarkSpec:
    dims: list
    sizes: list
    trials: int = 1
    time_budget: float = consts.TIME_BUDGET
    eps_rule: EpsRule = EpsRule.CONVEX_MARGIN
    eps_value: float = None
    generator: GeneratorSpec = field(default_factory=GeneratorSpec)
    compare: bool = False

    def __post_init__(self):
        try:
            object.__setattr__(self, "eps_rule", EpsRule(self.eps_rule))
        except ValueError as e:
            raise ValidationError(str(e)) from e
        object.__setattr__(self, "dims", [int(d) for d in self.dims])
        object.__setattr__(self, "sizes", [int(n) for n in self.sizes])

        if not self.dims or any(d < 1 for d in self.dims):
            raise ValidationError("'dims' must be a non-empty list of integers >= 1")
        if not self.sizes or any(n < 1 for n in self.sizes):
            raise ValidationError("'sizes' must be a non-empty list of integers >= 1")
        if any(later <= earlier for earlier, later in zip(self.sizes, self.sizes[1:])):
            raise ValidationError("'sizes' must be strictly increasing")
        if self.trials < 1:
            raise ValidationError("'trials' must be >= 1")
        if self.time_budget < 0:
            raise ValidationError("'time_budget' must be >= 0")
        if self.eps_rule == EpsRule.FIXED and (self.eps_value is None or not self.eps_value > 0):
            raise ValidationError("eps rule 'fixed' needs 'eps_value' > 0")
        if self.eps_rule == EpsRule.NONCONVEX_MARGIN and self.eps_value is not None:
            if not 0 < self.eps_value < 1:
                raise ValidationError("eps rule 'nonconvex_margin' needs a factor in (0, 1)")

    @property
    def cells(self) -> list:
        return [(d, n) for d in self.dims for n in self.sizes]

    def eps_for(self, mu0: DiscreteMeasure, mu1: DiscreteMeasure) -> float:
        if self.eps_rule == EpsRule.FIXED:
            return float(self.eps_value)
        if self.eps_rule == EpsRule.NONCONVEX_MARGIN:
            factor = consts.NONCONVEX_MARGIN if self.eps_value is None else self.eps_value
            return convex_margin_eps(mu0, mu1, margin=factor)
        return convex_margin_eps(mu0, mu1, margin=consts.CONVEX_MARGIN)

    def to_dict(self) -> dict:
        return asdict(self)
