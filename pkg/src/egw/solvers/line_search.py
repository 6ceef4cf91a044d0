from dataclasses import dataclass, field, replace

import numpy as np
from tqdm import tqdm

from src.egw.core import ProblemSpec
from src.egw.solvers.config import LMode, SolveConfig
from src.egw.solvers.report import SolveReport
from src.egw.solvers.solve import get_solver
from src.utils.logger import logger


@dataclass(frozen=True)
class LineSearchTrial:
    L: float
    converged: bool
    iterations: int


@dataclass(eq=False)
class LineSearchResult:
    """Selected L (smallest converging on the grid) and the report of its run"""

    L: float
    report: SolveReport
    trials: list = field(default_factory=list)

    @property
    def fastest_L(self) -> float:
        """Converging L with the fewest outer iterations"""
        converged = [t for t in self.trials if t.converged]
        if not converged:
            return self.L
        return min(converged, key=lambda t: (t.iterations, t.L)).L


def line_search(
    spec: ProblemSpec,
    cfg: SolveConfig = None,
    start: np.ndarray = None,
    show_progress: bool = False,
) -> LineSearchResult:
    """Shrink L geometrically from the theoretical value until a run stops converging"""
    cfg = cfg or SolveConfig()
    L0 = spec.L_theoretical
    run_cfg = replace(cfg, L_mode=LMode.FIXED, L_value=L0)

    trials, selected = [], None
    grid = L0 * cfg.line_search_shrink ** np.arange(cfg.line_search_max_steps + 1)
    for L in tqdm(grid, desc="Line search", disable=not show_progress):
        report = get_solver(spec.with_L(L), replace(run_cfg, L_value=float(L))).run(start)
        trials.append(
            LineSearchTrial(L=float(L), converged=report.converged, iterations=report.outer_iters)
        )
        if not report.converged:
            break
        selected = LineSearchResult(L=float(L), report=report)

    if selected is None:
        logger.warning(f"No tested L converged, falling back to the theoretical L={L0:.6g}")
        selected = LineSearchResult(L=L0, report=report)

    selected.trials = trials
    logger.info(f"✅ Line search selected L={selected.L:.6g} after {len(trials)} trials")
    return selected


def line_search_L(
    spec: ProblemSpec,
    cfg: SolveConfig = None,
    start: np.ndarray = None,
    show_progress: bool = False,
) -> float:
    cfg = cfg or SolveConfig()
    if cfg.L_mode == LMode.FIXED:
        return float(cfg.L_value)
    return line_search(spec, cfg, start, show_progress=show_progress).L
