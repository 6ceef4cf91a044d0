"""
Timing harness for random instances.

Each (d, N) cell runs its trials in order and stops starting new ones once the
cumulative wall time reaches the time budget; skipped trials are recorded with
status `budget_exceeded` and averages use completed runs only.
"""

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace

import numpy as np
import pandas as pd
from tqdm import tqdm

import src.egw.constants as consts
from src.egw.benchmark.config import BenchmarkSpec, EpsRule
from src.egw.core import build_problem
from src.egw.measures import random_instance
from src.egw.solvers import Algorithm, SolveConfig, SolveReport, Status, relative_error, solve
from src.utils.logger import logger


BUDGET_EXCEEDED = "budget_exceeded"
COMPLETED = (Status.CONVERGED.value, Status.MAX_ITERS.value)


@dataclass(frozen=True)
class RunRecord:
    d: int
    N: int
    trial: int
    wall_time_seconds: float
    outer_iters: int
    total_sinkhorn_iters: int
    objective: float
    status: str
    eps: float = float("nan")
    algorithm: str = ""
    relative_error: float = float("nan")

    @classmethod
    def skipped(cls, d: int, N: int, trial: int) -> "RunRecord":
        return cls(
            d=d,
            N=N,
            trial=trial,
            wall_time_seconds=0.0,
            outer_iters=0,
            total_sinkhorn_iters=0,
            objective=float("nan"),
            status=BUDGET_EXCEEDED,
        )


def _objective(report: SolveReport) -> float:
    return report.final_objective if report.egw is None else report.egw


def _solve_instance(bench: BenchmarkSpec, cfg: SolveConfig, mu0, mu1) -> tuple:
    eps = bench.eps_for(mu0, mu1)
    doublings = 0
    while True:
        report = solve(build_problem(mu0, mu1, eps), cfg)
        retry = (
            bench.eps_rule == EpsRule.NONCONVEX_MARGIN
            and report.status == Status.ABORTED
            and doublings < consts.MAX_EPS_DOUBLINGS
        )
        if not retry:
            return eps, report
        logger.warning(f"Solve aborted at eps={eps:.6g} ({report.message}), doubling eps")
        eps *= 2.0
        doublings += 1


def _compare(cfg: SolveConfig, mu0, mu1, eps: float, first: SolveReport) -> float:
    spec = build_problem(mu0, mu1, eps)
    if not spec.is_convex:
        return float("nan")

    other = Algorithm.ADAPTIVE if first.algorithm == Algorithm.FGM else Algorithm.FGM
    second = solve(spec, replace(cfg, algorithm=other))
    try:
        return relative_error(_objective(first), _objective(second))
    except ValueError:
        return float("nan")


def run_cell(bench: BenchmarkSpec, cfg: SolveConfig, d: int, N: int) -> list:
    records, elapsed = [], 0.0
    logger.info(f"🕐 Benchmark cell d={d}, N={N}")
    for trial in range(bench.trials):
        if elapsed >= bench.time_budget:
            records.append(RunRecord.skipped(d, N, trial))
            continue

        mu0, mu1 = random_instance(
            N,
            d,
            seed=bench.generator.seed,
            trial=trial,
            sigma0=bench.generator.sigma0,
            sigma1=bench.generator.sigma1,
        )
        start = time.perf_counter()
        eps, report = _solve_instance(bench, cfg, mu0, mu1)
        wall_time = time.perf_counter() - start
        elapsed += wall_time

        error = float("nan")
        if bench.compare and report.status != Status.ABORTED:
            error = _compare(cfg, mu0, mu1, eps, report)

        records.append(
            RunRecord(
                d=d,
                N=N,
                trial=trial,
                wall_time_seconds=wall_time,
                outer_iters=report.outer_iters,
                total_sinkhorn_iters=report.total_sinkhorn_iters,
                objective=_objective(report),
                status=report.status.value,
                eps=eps,
                algorithm=report.algorithm.value,
                relative_error=error,
            )
        )

    if elapsed >= bench.time_budget:
        logger.warning(f"Time budget of {bench.time_budget}s reached for d={d}, N={N}")
    return records


class BenchmarkRunner:
    """Timing the solves on random instances for all (d, N) cells"""

    def __init__(
        self,
        bench: BenchmarkSpec,
        cfg: SolveConfig = None,
        jobs: int = 1,
        show_progress: bool = True,
    ):
        if jobs < 1:
            raise ValueError("'jobs' must be >= 1")
        self.bench = bench
        self.cfg = cfg or SolveConfig()
        self.jobs = jobs
        self.show_progress = show_progress

    def run(self) -> list:
        cells = self.bench.cells
        progress = tqdm(total=len(cells), desc="Benchmark", disable=not self.show_progress)
        records = []
        if self.jobs == 1:
            for d, N in cells:
                records.extend(run_cell(self.bench, self.cfg, d, N))
                progress.update()
        else:
            with ProcessPoolExecutor(max_workers=self.jobs) as executor:
                futures = [executor.submit(run_cell, self.bench, self.cfg, d, N) for d, N in cells]
                # results are collected in submission order
                for future in futures:
                    records.extend(future.result())
                    progress.update()
        progress.close()

        completed = sum(r.status in COMPLETED for r in records)
        logger.info(f"✅ Benchmark completed: {completed}/{len(records)} runs finished")
        return records


def records_frame(records: list) -> pd.DataFrame:
    columns = list(RunRecord.__dataclass_fields__)
    return pd.DataFrame([asdict(r) for r in records], columns=columns)


def scaling_exponent(records: list | pd.DataFrame) -> float:
    """Slope of log(mean wall time) against log(N) over completed runs"""
    df = records if isinstance(records, pd.DataFrame) else records_frame(records)
    df = df[df["status"].isin(COMPLETED)]
    mean_time = df.groupby("N")["wall_time_seconds"].mean()
    mean_time = mean_time[mean_time > 0]
    if mean_time.shape[0] < 2:
        raise ValueError("need completed runs for at least two sizes")

    sizes = mean_time.index.to_numpy(dtype=np.float64)
    slope, _ = np.polyfit(np.log(sizes), np.log(mean_time.to_numpy()), 1)
    return float(slope)
