from dataclasses import dataclass

import numpy as np
import pandas as pd
from tqdm import tqdm

from src.egw.core import build_problem
from src.egw.exceptions import InvalidStartError, ValidationError
from src.egw.measures import DiscreteMeasure
from src.egw.solvers.config import SolveConfig, Status
from src.egw.solvers.report import SolveReport
from src.egw.solvers.solve import solve
from src.utils.logger import logger


@dataclass(frozen=True, eq=False)
class SweepPoint:
    eps: float
    report: SolveReport

    @property
    def objective(self) -> float:
        return self.report.final_objective

    @property
    def residual(self) -> float:
        return self.report.final_gradient_norm

    def to_row(self) -> dict:
        row = {
            "eps": self.eps,
            "objective": self.objective,
            "residual": self.residual,
            "status": self.report.status.value,
        }
        for (i, j), value in np.ndenumerate(self.report.final_A):
            row[f"A_{i}_{j}"] = value
        return row


def eps_sweep(
    mu0: DiscreteMeasure,
    mu1: DiscreteMeasure,
    eps_schedule: list,
    cfg: SolveConfig = None,
    M: float = None,
    center: bool = True,
    show_progress: bool = False,
) -> list:
    """Solve along a decreasing eps schedule, warm-starting A from the previous solution

    An aborted solve ends the sweep; its point is kept last so the failure is visible.
    """
    cfg = cfg or SolveConfig()
    schedule = [float(eps) for eps in eps_schedule]
    if not schedule:
        raise ValidationError("eps schedule is empty")
    if any(eps <= 0 for eps in schedule):
        raise ValidationError("eps values must be > 0")
    if any(later >= earlier for earlier, later in zip(schedule, schedule[1:])):
        raise ValidationError("eps schedule must be strictly decreasing")

    points, start = [], None
    for eps in tqdm(schedule, desc="Sweep", disable=not show_progress):
        spec = build_problem(mu0, mu1, eps, M=M, center_measures=center)
        try:
            report = solve(spec, cfg, start)
        except InvalidStartError as e:
            logger.warning(f"Warm start rejected at eps={eps:.6g} ({e}), using the default start")
            report = solve(spec, cfg)

        points.append(SweepPoint(eps=eps, report=report))
        if report.status == Status.ABORTED:
            logger.warning(f"Sweep truncated at eps={eps:.6g}: {report.message}")
            break
        logger.info(
            f"eps={eps:.6g}: objective={report.final_objective:.17g},"
            f" residual={report.final_gradient_norm:.3e}, status={report.status.value}"
        )
        if cfg.warm_start:
            start = report.final_A

    return points


def sweep_frame(points: list) -> pd.DataFrame:
    return pd.DataFrame([p.to_row() for p in points])
