import numpy as np

from src.egw.exceptions import ValidationError
from src.egw.solvers.base import BaseSolver
from src.egw.solvers.config import Algorithm, Status
from src.egw.solvers.rates import fgm_iteration_budget, fgm_rate_envelope


class FastGradientSolver(BaseSolver):
    """Fast gradient method with inexact oracle for the convex regime"""

    algorithm = Algorithm.FGM

    def initial_point(self) -> np.ndarray:
        return self.spec.zeros()

    def iteration_budget(self) -> int:
        """Explicit stopping index when a target optimality gap is configured"""
        if self.cfg.target_gap is None or not self.spec.is_convex:
            return None
        try:
            return fgm_iteration_budget(
                self.spec.M, self.cfg.target_gap, self.delta_prime, L=self.spec.L
            )
        except ValueError as e:
            raise ValidationError(f"'target_gap' is below the oracle floor: {e}") from e

    def envelope(self, k: int, best_norm: float, start: np.ndarray, delta_prime: float) -> float:
        return fgm_rate_envelope(k, self.spec.L, best_norm, delta_prime)

    def _run(self, start: np.ndarray) -> Status:
        L = self.spec.L
        budget = self.iteration_budget()
        n_iters = self.cfg.max_outer_iters
        if budget is not None:
            n_iters = min(n_iters, budget + 1)
            self.extras["iteration_budget"] = budget

        A = start
        at_A = self.evaluate(A)
        W = 0.5 * at_A.gradient
        for k in range(n_iters):
            B = self.project(A - at_A.gradient / L)
            C = self.project(-W / L)
            at_B = self.evaluate(B)
            self.record(k, at_B, residual=at_A.grad_norm)
            if self.should_stop(at_A, at_B):
                self.extras["stop_reason"] = "grad_tol"
                return Status.CONVERGED

            tau = 2.0 / (k + 3)
            A = tau * C + (1.0 - tau) * B
            at_A = self.evaluate(A)
            W = W + (k + 2) / 2.0 * at_A.gradient

        if budget is not None and n_iters == budget + 1:
            self.extras["stop_reason"] = "iteration_budget"
            return Status.CONVERGED
        return Status.MAX_ITERS
