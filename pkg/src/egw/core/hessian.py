"""
Second-order diagnostics of the variational objective.

The second derivative of Phi in direction C is expressed through the pair
(h0, h1) solving the linearized Schroedinger system of the coupling. These
routines need a plan with column-marginal violation <= 1e-12 and are never
called from the solvers.
"""

from dataclasses import dataclass

import numpy as np
from scipy import linalg
from scipy.special import expit

import src.egw.constants as consts
from src.egw.core.problem import ProblemSpec
from src.egw.exceptions import HessianPrecisionError, HSystemError
from src.egw.oracle import Coupling


@dataclass(frozen=True, eq=False)
class HSystemSolution:
    h0: np.ndarray
    h1: np.ndarray
    normalization_residual: float
    residual: float


def _plan(spec: ProblemSpec, plan) -> np.ndarray:
    plan = plan.plan if isinstance(plan, Coupling) else np.asarray(plan, dtype=np.float64)
    if plan.shape != (spec.mu0.n_atoms, spec.mu1.n_atoms):
        raise ValueError(f"plan shape {plan.shape} does not match the marginals")

    violation = np.linalg.norm(plan.sum(axis=0) - spec.mu1.weights)
    if violation > consts.HESSIAN_PLAN_VIOLATION:
        raise HessianPrecisionError(
            f"plan marginal violation {violation:.3e} exceeds {consts.HESSIAN_PLAN_VIOLATION:.0e};"
            " recompute the coupling with a tighter tolerance"
        )
    return plan


def _direction(spec: ProblemSpec, C: np.ndarray) -> np.ndarray:
    C = np.asarray(C, dtype=np.float64)
    if C.shape != spec.shape:
        raise ValueError(f"direction must have shape {spec.shape}, got {C.shape}")
    return C


def bilinear_values(spec: ProblemSpec, C: np.ndarray) -> np.ndarray:
    """s_ij = x_i^T C y_j"""
    return spec.mu0.points @ C @ spec.mu1.points.T


def solve_h_system(spec: ProblemSpec, plan, C: np.ndarray) -> HSystemSolution:
    plan = _plan(spec, plan)
    C = _direction(spec, C)
    a, b = spec.mu0.weights, spec.mu1.weights
    n0, n1 = a.shape[0], b.shape[0]

    s = bilinear_values(spec, C)
    rhs = 32.0 * np.concatenate([(plan * s).sum(axis=1), (plan * s).sum(axis=0), [0.0]])

    system = np.zeros((n0 + n1 + 1, n0 + n1))
    system[:n0, :n0] = np.diag(a)
    system[:n0, n0:] = plan
    system[n0 : n0 + n1, :n0] = plan.T
    system[n0 : n0 + n1, n0:] = np.diag(b)
    # pins the one-dimensional kernel (1, -1)
    system[-1, :n0] = a

    solution, *_ = linalg.lstsq(system, rhs)
    residual = float(np.max(np.abs(system @ solution - rhs)))
    if residual > consts.HSYSTEM_RESIDUAL_ATOL:
        raise HSystemError(f"h-system ill-conditioned (residual {residual:.3e})")

    h0, h1 = solution[:n0], solution[n0:]
    return HSystemSolution(
        h0=h0,
        h1=h1,
        normalization_residual=float(abs(a @ h0)),
        residual=residual,
    )


def hessian_bilinear_form(
    spec: ProblemSpec, A: np.ndarray, B: np.ndarray, C: np.ndarray, plan
) -> float:
    """D^2 Phi_[A](B, C); `plan` is the coupling at A"""
    _direction(spec, A)
    B = _direction(spec, B)
    solution = solve_h_system(spec, plan, C)
    plan = _plan(spec, plan)

    s_b, s_c = bilinear_values(spec, B), bilinear_values(spec, C)
    potentials = solution.h0[:, None] + solution.h1[None, :] - 32.0 * s_c
    return 64.0 * float(np.sum(B * C)) + 32.0 / spec.eps * float(np.sum(plan * s_b * potentials))


def hessian_quadratic_form(spec: ProblemSpec, A: np.ndarray, C: np.ndarray, plan) -> float:
    return hessian_bilinear_form(spec, A, C, C, plan)


def hessian_matrix(spec: ProblemSpec, A: np.ndarray, plan) -> np.ndarray:
    """Matrix of D^2 Phi_[A] in the basis of elementary d0 x d1 matrices (row-major)"""
    _direction(spec, A)
    d0, d1 = spec.shape
    basis = np.eye(d0 * d1).reshape(d0 * d1, d0, d1)
    solutions = [solve_h_system(spec, plan, e) for e in basis]
    values = [bilinear_values(spec, e) for e in basis]
    plan = _plan(spec, plan)

    hessian = 64.0 * np.eye(d0 * d1)
    for l, (solution, s_l) in enumerate(zip(solutions, values)):
        potentials = solution.h0[:, None] + solution.h1[None, :] - 32.0 * s_l
        for k, s_k in enumerate(values):
            hessian[k, l] += 32.0 / spec.eps * float(np.sum(plan * s_k * potentials))

    return (hessian + hessian.T) / 2


def hessian_eigenvalue_bounds(spec: ProblemSpec) -> tuple:
    """Interval [64 - 32^2 / eps sqrt(M4 M4), 64] containing the spectrum of D^2 Phi"""
    return 64.0 - spec.L_ot, 64.0


def coupling_variance_sup(spec: ProblemSpec, plan) -> tuple:
    """sup over |C|_F = 1 of Var_P(X^T C Y), with a maximizing C"""
    plan = plan.plan if isinstance(plan, Coupling) else np.asarray(plan, dtype=np.float64)
    X, Y = spec.mu0.points, spec.mu1.points
    d0, d1 = spec.shape

    second = np.einsum("ij,ip,iq,jr,js->prqs", plan, X, X, Y, Y).reshape(d0 * d1, d0 * d1)
    mean = (X.T @ plan @ Y).reshape(-1)
    covariance = second - np.outer(mean, mean)

    eigenvalues, eigenvectors = np.linalg.eigh((covariance + covariance.T) / 2)
    return float(eigenvalues[-1]), eigenvectors[:, -1].reshape(d0, d1)


def two_point_coupling_mass(a, b, A: np.ndarray, eps: float) -> float:
    """Optimal mass on (a, b) for mu0 = (delta_0 + delta_a)/2 and mu1 = (delta_0 + delta_b)/2"""
    a = np.atleast_1d(np.asarray(a, dtype=np.float64))
    b = np.atleast_1d(np.asarray(b, dtype=np.float64))
    A = np.atleast_2d(np.asarray(A, dtype=np.float64))
    z = (2.0 * (a @ a) * (b @ b) + 16.0 * (a @ A @ b)) / eps
    return float(expit(z) / 2.0)
