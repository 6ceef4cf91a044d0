import numpy as np

from src.egw.core import ProblemSpec
from src.egw.solvers.adaptive import AdaptiveGradientSolver
from src.egw.solvers.config import Algorithm, LMode, SolveConfig
from src.egw.solvers.fgm import FastGradientSolver
from src.egw.solvers.report import SolveReport
from src.utils.logger import logger


SOLVERS = {
    Algorithm.FGM: FastGradientSolver,
    Algorithm.ADAPTIVE: AdaptiveGradientSolver,
}


def _warn_not_convex(spec: ProblemSpec):
    if not spec.is_convex:
        logger.warning(
            "fgm requested on an instance without a convexity certificate"
            f" (sqrt(M4 M4) = {spec.m4_product:.6g} >= eps/16 = {spec.convexity_threshold:.6g})"
        )


def get_solver(spec: ProblemSpec, cfg: SolveConfig):
    algorithm = cfg.resolve_algorithm(spec)
    if algorithm == Algorithm.FGM:
        _warn_not_convex(spec)
    return SOLVERS[algorithm](spec, cfg)


def resolve_L(spec: ProblemSpec, cfg: SolveConfig) -> float:
    if cfg.L_mode == LMode.FIXED:
        return float(cfg.L_value)
    return spec.L_theoretical


def solve_fgm(spec: ProblemSpec, cfg: SolveConfig = None, A0: np.ndarray = None) -> SolveReport:
    cfg = cfg or SolveConfig()
    _warn_not_convex(spec)
    spec = spec.with_L(resolve_L(spec, cfg))
    return FastGradientSolver(spec, cfg).run(A0)


def solve_adaptive(
    spec: ProblemSpec, cfg: SolveConfig = None, C0: np.ndarray = None
) -> SolveReport:
    cfg = cfg or SolveConfig()
    spec = spec.with_L(resolve_L(spec, cfg))
    return AdaptiveGradientSolver(spec, cfg).run(C0)


def solve(spec: ProblemSpec, cfg: SolveConfig = None, start: np.ndarray = None) -> SolveReport:
    """Run the configured algorithm; `auto` picks fgm iff the instance is certified convex"""
    cfg = cfg or SolveConfig()
    if cfg.L_mode == LMode.SEARCH:
        from src.egw.solvers.line_search import line_search

        return line_search(spec, cfg, start).report

    spec = spec.with_L(resolve_L(spec, cfg))
    return get_solver(spec, cfg).run(start)


def relative_error(first: float, second: float) -> float:
    """|v1 - v2| / min(v1, v2), the agreement metric between two solvers"""
    low = min(first, second)
    if low <= 0:
        raise ValueError("relative error needs positive values")
    return abs(first - second) / low
