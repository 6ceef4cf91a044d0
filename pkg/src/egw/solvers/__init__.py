from src.egw.solvers.adaptive import AdaptiveGradientSolver
from src.egw.solvers.base import BaseSolver, Evaluation
from src.egw.solvers.config import Algorithm, LMode, Projection, SolveConfig, Status
from src.egw.solvers.fgm import FastGradientSolver
from src.egw.solvers.line_search import (
    LineSearchResult,
    LineSearchTrial,
    line_search,
    line_search_L,
)
from src.egw.solvers.rates import (
    adaptive_rate_envelope,
    fgm_iteration_budget,
    fgm_rate_envelope,
)
from src.egw.solvers.report import TRACE_COLUMNS, IterationRecord, SolveReport, plan_frame
from src.egw.solvers.solve import (
    get_solver,
    relative_error,
    resolve_L,
    solve,
    solve_adaptive,
    solve_fgm,
)
from src.egw.solvers.sweep import SweepPoint, eps_sweep, sweep_frame
