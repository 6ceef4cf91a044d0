from dataclasses import asdict, dataclass, field, fields

import numpy as np
import pandas as pd

from src.egw.core import Convexity
from src.egw.oracle import Coupling, OracleCertificate
from src.egw.solvers.config import Algorithm, SolveConfig, Status


TRACE_COLUMNS = ["iter", "phi", "residual", "envelope", "delta_sup", "sinkhorn_iters"]


def plan_frame(plan: np.ndarray) -> pd.DataFrame:
    """Row-major (i, j, mass) table of a coupling"""
    rows, cols = np.indices(plan.shape)
    return pd.DataFrame({"i": rows.reshape(-1), "j": cols.reshape(-1), "mass": plan.reshape(-1)})


@dataclass(frozen=True)
class IterationRecord:
    """One outer iteration: Phi(B_k), the stationarity residual and the oracle summary

    `envelope` bounds Phi(B_k) - Phi(B*) for the fast gradient method and the
    running minimum of the squared residual for the adaptive method. It uses
    `delta_prime`, the function-value error of the largest oracle radius
    certified up to this iteration.
    """

    iter: int
    phi: float
    residual: float
    envelope: float
    delta_sup: float
    sinkhorn_iters: int
    delta_prime: float = float("nan")


@dataclass(eq=False)
class SolveReport:
    algorithm: Algorithm
    status: Status
    final_A: np.ndarray
    final_plan: Coupling
    records: list
    L: float
    M: float
    eps: float
    delta_oracle: float
    delta_prime: float
    final_objective: float
    final_gradient_norm: float
    s1: float
    egw: float
    centered: bool
    convexity: Convexity
    final_certificate: OracleCertificate
    total_sinkhorn_iters: int
    config: SolveConfig = None
    message: str = ""
    extras: dict = field(default_factory=dict)

    @property
    def outer_iters(self) -> int:
        return len(self.records)

    @property
    def converged(self) -> bool:
        return self.status == Status.CONVERGED

    @property
    def objective_trace(self) -> list:
        return [(r.iter, r.phi) for r in self.records]

    @property
    def residual_trace(self) -> list:
        return [(r.iter, r.residual) for r in self.records]

    @property
    def rate_envelope(self) -> list:
        return [(r.iter, r.envelope) for r in self.records]

    @property
    def certificates(self) -> list:
        return [(r.iter, r.delta_sup, r.sinkhorn_iters) for r in self.records]

    def optimality_gaps(self) -> np.ndarray:
        """Phi(B_k) - min_j Phi(B_j)"""
        values = np.array([r.phi for r in self.records])
        if values.size == 0:
            return values
        return values - values.min()

    def best_residuals(self) -> np.ndarray:
        """min_{i <= k} residual_i^2"""
        residuals = np.array([r.residual for r in self.records])
        if residuals.size == 0:
            return residuals
        return np.minimum.accumulate(residuals**2)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([asdict(r) for r in self.records], columns=TRACE_COLUMNS)

    def plan_frame(self) -> pd.DataFrame:
        return plan_frame(self.final_plan.plan)

    def to_dict(self) -> dict:
        data = {f.name: getattr(self, f.name) for f in fields(self)}
        data["records"] = [asdict(r) for r in self.records]
        data["final_A"] = self.final_A.tolist()
        data["final_plan"] = None
        if self.final_plan is not None:
            data["final_plan"] = {
                "plan": self.final_plan.plan.tolist(),
                "u": self.final_plan.u.tolist(),
                "v": self.final_plan.v.tolist(),
            }
        data["final_certificate"] = (
            None if self.final_certificate is None else self.final_certificate.to_dict()
        )
        data["config"] = None if self.config is None else self.config.to_dict()
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "SolveReport":
        data = dict(data)
        data["algorithm"] = Algorithm(data["algorithm"])
        data["status"] = Status(data["status"])
        data["convexity"] = Convexity(data["convexity"])
        data["records"] = [IterationRecord(**r) for r in data["records"]]
        data["final_A"] = np.array(data["final_A"], dtype=np.float64)
        if data["final_plan"] is not None:
            data["final_plan"] = Coupling(
                **{k: np.array(v, dtype=np.float64) for k, v in data["final_plan"].items()}
            )
        if data["final_certificate"] is not None:
            data["final_certificate"] = OracleCertificate.from_dict(data["final_certificate"])
        if data["config"] is not None:
            data["config"] = SolveConfig.from_dict(data["config"])
        return cls(**data)
