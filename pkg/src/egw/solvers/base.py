from dataclasses import dataclass, replace

import numpy as np

from src.egw.core import (
    PhiEvaluation,
    ProblemSpec,
    gradient,
    phi,
    project_box,
    project_dm,
    s1_constant,
)
from src.egw.exceptions import InvalidStartError, SolverAbortError
from src.egw.oracle import Coupling, OracleCertificate, SinkhornOracle
from src.egw.solvers.config import Algorithm, Projection, SolveConfig, Status
from src.egw.solvers.report import IterationRecord, SolveReport
from src.utils.logger import logger


@dataclass(frozen=True, eq=False)
class Evaluation:
    point: np.ndarray
    value: float
    gradient: np.ndarray
    coupling: Coupling
    certificate: OracleCertificate

    @property
    def grad_norm(self) -> float:
        return float(np.linalg.norm(self.gradient))


class BaseSolver:
    """Shared oracle calls, projection, trace recording and report assembly"""

    algorithm: Algorithm = None

    def __init__(self, spec: ProblemSpec, cfg: SolveConfig = None, oracle: SinkhornOracle = None):
        self.spec = spec
        self.cfg = cfg or SolveConfig()
        self.delta = self.cfg.oracle_delta(spec)
        self.delta_prime = spec.delta_prime(self.delta)
        self.oracle = oracle or SinkhornOracle(
            k_max=self.cfg.sinkhorn_kmax,
            warm_start=self.cfg.warm_start,
            log_domain=self.cfg.log_domain,
        )
        self.delta_certified = self.delta
        self.clamped_calls = 0
        self.uncertified_calls = 0
        self.records = []
        self.extras = {}
        self._last = None
        self._best = None

    def initial_point(self) -> np.ndarray:
        raise NotImplementedError

    def _run(self, start: np.ndarray) -> Status:
        raise NotImplementedError

    def envelope(self, k: int, best_norm: float, start: np.ndarray, delta_prime: float) -> float:
        raise NotImplementedError

    def project(self, A: np.ndarray) -> np.ndarray:
        if self.cfg.projection == Projection.BOX:
            return project_box(A, self.spec.M)
        return project_dm(A, self.spec.M)

    def evaluate(self, A: np.ndarray) -> Evaluation:
        evaluation = phi(
            self.spec,
            A,
            delta=self.delta,
            oracle=self.oracle,
            gamma_floor=self.cfg.sinkhorn_gamma_floor,
        )
        self.track(evaluation)
        if not np.isfinite(evaluation.value):
            raise SolverAbortError(
                f"non-finite objective {evaluation.value} at |A|_F = {np.linalg.norm(A):.3e}"
            )

        return Evaluation(
            point=np.asarray(A, dtype=np.float64),
            value=evaluation.value,
            gradient=gradient(self.spec, A, evaluation.coupling),
            coupling=evaluation.coupling,
            certificate=evaluation.certificate,
        )

    def track(self, evaluation: PhiEvaluation):
        """Keep the largest sup-norm radius the oracle has certified so far"""
        certificate = evaluation.certificate
        if evaluation.clamped:
            if self.clamped_calls == 0:
                logger.warning(
                    f"Sinkhorn tolerance raised to the floor {certificate.gamma:.3e}"
                    f" (lambda(K) = {certificate.lambda_K:.17g}); rate envelopes use the"
                    " certified oracle radius from now on"
                )
            self.clamped_calls += 1

        if not certificate.converged:
            if self.uncertified_calls == 0:
                logger.warning(
                    f"Sinkhorn stopped at k_max={self.oracle.k_max} with marginal violation"
                    f" {certificate.marginal_violation:.3e} > gamma={certificate.gamma:.3e};"
                    " continuing with the last iterate"
                )
            self.uncertified_calls += 1

        if certificate.delta_sup > self.delta_certified:
            self.delta_certified = certificate.delta_sup

    def record(self, k: int, at_B: Evaluation, residual: float):
        self.records.append(
            IterationRecord(
                iter=k,
                phi=at_B.value,
                residual=float(residual),
                envelope=float("nan"),
                delta_sup=at_B.certificate.delta_sup,
                sinkhorn_iters=at_B.certificate.iterations,
                delta_prime=self.spec.delta_prime(self.delta_certified),
            )
        )
        self._last = at_B
        if self._best is None or at_B.value < self._best.value:
            self._best = at_B
        logger.debug(
            f"{self.algorithm.value} k={k}: phi={at_B.value:.17g}, residual={residual:.3e},"
            f" sinkhorn_iters={at_B.certificate.iterations}"
        )

    def should_stop(self, at_A: Evaluation, at_B: Evaluation) -> bool:
        return at_A.grad_norm < self.cfg.grad_tol and at_B.grad_norm < self.cfg.grad_tol

    def check_start(self, start) -> np.ndarray:
        start = np.asarray(start, dtype=np.float64)
        if start.shape != self.spec.shape:
            raise InvalidStartError(f"start must have shape {self.spec.shape}, got {start.shape}")
        if not self.spec.is_feasible(start):
            raise InvalidStartError(
                f"start is infeasible: |A|_F = {np.linalg.norm(start):.6g}"
                f" > M/2 = {self.spec.M / 2:.6g}"
            )
        return start

    def run(self, start: np.ndarray = None) -> SolveReport:
        start = self.initial_point() if start is None else self.check_start(start)
        message = ""
        try:
            status = self._run(start)
        except (FloatingPointError, SolverAbortError) as e:
            status, message = Status.ABORTED, str(e)
            logger.warning(
                f"{self.algorithm.value} aborted after {len(self.records)} iterations: {e}"
            )

        report = self._report(status, message, start)
        logger.debug(
            f"{self.algorithm.value} finished with status '{status.value}' after"
            f" {report.outer_iters} iterations"
        )
        return report

    def _report(self, status: Status, message: str, start: np.ndarray) -> SolveReport:
        spec = self.spec
        final = self._last
        best_norm = 0.0 if self._best is None else float(np.linalg.norm(self._best.point))
        records = [
            replace(r, envelope=self.envelope(r.iter, best_norm, start, r.delta_prime))
            for r in self.records
        ]
        self.extras["delta_certified"] = self.delta_certified
        self.extras["clamped_oracle_calls"] = self.clamped_calls
        self.extras["uncertified_oracle_calls"] = self.uncertified_calls
        if self.uncertified_calls:
            logger.warning(
                f"{self.uncertified_calls} of {self.oracle.calls} Sinkhorn calls did not reach"
                f" their tolerance; certified oracle radius {self.delta_certified:.3e}"
            )

        s1 = s1_constant(spec.mu0, spec.mu1)
        objective = float("nan") if final is None else final.value
        return SolveReport(
            algorithm=self.algorithm,
            status=status,
            final_A=start.copy() if final is None else final.point,
            final_plan=None if final is None else final.coupling,
            records=records,
            L=spec.L,
            M=spec.M,
            eps=spec.eps,
            delta_oracle=self.delta,
            delta_prime=spec.delta_prime(self.delta_certified),
            final_objective=objective,
            final_gradient_norm=float("nan") if final is None else final.grad_norm,
            s1=s1,
            egw=s1 + objective if spec.centered and final is not None else None,
            centered=spec.centered,
            convexity=spec.convexity,
            final_certificate=None if final is None else final.certificate,
            total_sinkhorn_iters=self.oracle.total_iterations,
            config=self.cfg,
            message=message,
            extras=dict(self.extras),
        )
