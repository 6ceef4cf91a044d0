import numpy as np

import src.egw.constants as consts
from src.egw.exceptions import InvalidStartError
from src.egw.solvers.base import BaseSolver
from src.egw.solvers.config import Algorithm, Status
from src.egw.solvers.rates import adaptive_rate_envelope


class AdaptiveGradientSolver(BaseSolver):
    """Accelerated gradient method for smooth, possibly nonconvex objectives"""

    algorithm = Algorithm.ADAPTIVE

    def initial_point(self) -> np.ndarray:
        return self.spec.default_start()

    def envelope(self, k: int, best_norm: float, start: np.ndarray, delta_prime: float) -> float:
        best = self._best.point if self._best is not None else start
        start_distance = float(np.linalg.norm(start - best))
        if self.spec.is_convex:
            return adaptive_rate_envelope(k, self.spec.L, start_distance, delta_prime)
        return adaptive_rate_envelope(
            k,
            self.spec.L,
            start_distance,
            delta_prime,
            L_ot=self.spec.L_ot,
            best_norm=best_norm,
            M=self.spec.M,
        )

    def _run(self, start: np.ndarray) -> Status:
        L = self.spec.L
        beta = 1.0 / (2.0 * L)

        A = C = start
        at_A = self.evaluate(A)
        threshold = consts.STATIONARY_START_FACTOR * self.delta_prime
        if at_A.grad_norm < threshold:
            raise InvalidStartError(
                f"start is numerically stationary (|G| = {at_A.grad_norm:.3e} < {threshold:.3e});"
                " choose another starting point"
            )

        for k in range(1, self.cfg.max_outer_iters + 1):
            gamma = k / (4.0 * L)
            B = self.project(A - beta * at_A.gradient)
            C = self.project(C - gamma * at_A.gradient)
            at_B = self.evaluate(B)
            self.record(k, at_B, residual=np.linalg.norm(B - A) / beta)
            if self.should_stop(at_A, at_B):
                self.extras["stop_reason"] = "grad_tol"
                return Status.CONVERGED

            tau = 2.0 / (k + 2)
            A = tau * C + (1.0 - tau) * B
            at_A = self.evaluate(A)

        return Status.MAX_ITERS
