from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from src.egw.core.problem import build_problem
from src.egw.exceptions import DebiasError, SolverAbortError, UncenteredMeasureError
from src.egw.measures import DiscreteMeasure
from src.utils.logger import logger


@dataclass(frozen=True, eq=False)
class DebiasedResult:
    """S(mu0, mu1) - (S(mu0, mu0) + S(mu1, mu1)) / 2 and its three terms"""

    value: float
    s01: float
    s00: float
    s11: float
    reports: tuple = ()

    def to_dict(self) -> dict:
        return {"debiased": self.value, "s01": self.s01, "s00": self.s00, "s11": self.s11}


def _solve_term(mu0: DiscreteMeasure, mu1: DiscreteMeasure, eps: float, cfg, M, center: bool):
    from src.egw.solvers import Status, solve

    report = solve(build_problem(mu0, mu1, eps, M=M, center_measures=center), cfg)
    if report.status == Status.ABORTED:
        raise SolverAbortError(report.message)
    if report.egw is None:
        raise UncenteredMeasureError("the EGW value needs centered marginals")
    return report


def debiased_egw(
    mu0: DiscreteMeasure,
    mu1: DiscreteMeasure,
    eps: float,
    cfg=None,
    M: float = None,
    jobs: int = 1,
    center: bool = True,
) -> DebiasedResult:
    terms = {
        "S(mu0, mu1)": (mu0, mu1),
        "S(mu0, mu0)": (mu0, mu0),
        "S(mu1, mu1)": (mu1, mu1),
    }

    reports = {}
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(terms))) as executor:
            futures = {
                term: executor.submit(_solve_term, *pair, eps, cfg, M, center)
                for term, pair in terms.items()
            }
            for term, future in futures.items():
                try:
                    reports[term] = future.result()
                except Exception as e:
                    raise DebiasError(term, e) from e
    else:
        for term, pair in terms.items():
            try:
                reports[term] = _solve_term(*pair, eps, cfg, M, center)
            except Exception as e:
                raise DebiasError(term, e) from e

    s01, s00, s11 = (reports[term].egw for term in terms)
    value = s01 - 0.5 * (s00 + s11)
    logger.info(f"✅ Debiased EGW: {value:.17g} (S01={s01:.17g}, S00={s00:.17g}, S11={s11:.17g})")
    return DebiasedResult(value=value, s01=s01, s00=s00, s11=s11, reports=tuple(reports.values()))
