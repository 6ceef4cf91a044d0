from src.egw.core.debias import DebiasedResult, debiased_egw
from src.egw.core.hessian import (
    HSystemSolution,
    bilinear_values,
    coupling_variance_sup,
    hessian_bilinear_form,
    hessian_eigenvalue_bounds,
    hessian_matrix,
    hessian_quadratic_form,
    solve_h_system,
    two_point_coupling_mass,
)
from src.egw.core.objective import (
    PhiEvaluation,
    egw_value,
    gradient,
    gw_objective,
    kl_divergence,
    ot_objective,
    phi,
    project_box,
    project_dm,
    s1_constant,
    stationarity_gap,
)
from src.egw.core.problem import Convexity, ProblemSpec, build_problem, convex_margin_eps
from src.egw.oracle import cost_matrix
