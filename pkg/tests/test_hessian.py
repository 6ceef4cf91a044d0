import numpy as np
import pytest

from src.egw.core import (
    bilinear_values,
    build_problem,
    coupling_variance_sup,
    gradient,
    hessian_eigenvalue_bounds,
    hessian_matrix,
    hessian_quadratic_form,
    solve_h_system,
    two_point_coupling_mass,
)
from src.egw.exceptions import HessianPrecisionError
from src.egw.measures import DiscreteMeasure
from src.egw.oracle import sinkhorn


def random_spec(rng: np.random.Generator, eps: float = 1.0):
    def measure(n, d):
        points, weights = rng.normal(0.0, 0.3, (n, d)), rng.uniform(0.1, 1.0, n)
        return DiscreteMeasure(points=points, weights=weights / weights.sum())

    n0, n1 = rng.integers(2, 7, size=2)
    d0, d1 = rng.integers(1, 4, size=2)
    return build_problem(measure(n0, d0), measure(n1, d1), eps)


def tight_plan(spec, A, gamma: float = 1e-14):
    coupling, _ = sinkhorn(spec.kernel(A), spec.mu0.weights, spec.mu1.weights, gamma)
    return coupling.plan


def test_quadratic_form_is_sandwiched():
    rng = np.random.default_rng(31)
    for _ in range(10):
        spec = random_spec(rng)
        A = rng.normal(0.0, 0.05, spec.shape)
        plan = tight_plan(spec, A)
        lower, upper = hessian_eigenvalue_bounds(spec)
        for _ in range(5):
            C = rng.normal(size=spec.shape)
            norm2 = float(np.sum(C * C))
            value = hessian_quadratic_form(spec, A, C, plan)
            assert lower * norm2 - 1e-6 <= value <= upper * norm2 + 1e-6


def test_bounds():
    spec = random_spec(np.random.default_rng(2), eps=0.5)
    assert hessian_eigenvalue_bounds(spec) == (pytest.approx(64.0 - spec.L_ot), 64.0)


class TestHSystem:
    def test_solution_satisfies_the_system(self):
        rng = np.random.default_rng(5)
        spec = random_spec(rng)
        A = rng.normal(0.0, 0.05, spec.shape)
        plan = tight_plan(spec, A)
        C = rng.normal(size=spec.shape)

        solution = solve_h_system(spec, plan, C)
        weighted = 32.0 * plan * bilinear_values(spec, C)
        a, b = spec.mu0.weights, spec.mu1.weights
        np.testing.assert_allclose(
            a * solution.h0 + plan @ solution.h1, weighted.sum(axis=1), atol=1e-10
        )
        np.testing.assert_allclose(
            plan.T @ solution.h0 + b * solution.h1, weighted.sum(axis=0), atol=1e-10
        )
        assert solution.normalization_residual <= 1e-10

    def test_needs_a_precise_plan(self):
        rng = np.random.default_rng(5)
        spec = random_spec(rng)
        A = spec.zeros()
        with pytest.raises(HessianPrecisionError):
            solve_h_system(spec, tight_plan(spec, A, gamma=1e-3), np.ones(spec.shape))

    def test_direction_shape_is_checked(self):
        spec = random_spec(np.random.default_rng(5))
        plan = tight_plan(spec, spec.zeros())
        with pytest.raises(ValueError):
            solve_h_system(spec, plan, np.ones((spec.shape[0] + 1, spec.shape[1])))


class TestSecondDerivative:
    def test_matches_finite_differences_of_the_gradient(self):
        rng = np.random.default_rng(8)
        h = 1e-5
        for _ in range(5):
            spec = random_spec(rng)
            A = rng.normal(0.0, 0.05, spec.shape)
            C = rng.normal(size=spec.shape)

            upper = gradient(spec, A + h * C, tight_plan(spec, A + h * C))
            lower = gradient(spec, A - h * C, tight_plan(spec, A - h * C))
            numeric = float(np.sum((upper - lower) * C)) / (2.0 * h)

            value = hessian_quadratic_form(spec, A, C, tight_plan(spec, A))
            assert value == pytest.approx(numeric, rel=1e-5, abs=1e-6)

    def test_matrix_reproduces_the_quadratic_form(self):
        rng = np.random.default_rng(12)
        spec = random_spec(rng)
        A = rng.normal(0.0, 0.05, spec.shape)
        plan = tight_plan(spec, A)
        H = hessian_matrix(spec, A, plan)

        np.testing.assert_allclose(H, H.T)
        C = rng.normal(size=spec.shape)
        expected = hessian_quadratic_form(spec, A, C, plan)
        assert C.reshape(-1) @ H @ C.reshape(-1) == pytest.approx(expected, rel=1e-8, abs=1e-10)

    def test_variance_bound_is_sharper(self):
        rng = np.random.default_rng(21)
        spec = random_spec(rng, eps=0.5)
        A = rng.normal(0.0, 0.05, spec.shape)
        plan = tight_plan(spec, A)

        variance, C = coupling_variance_sup(spec, plan)
        assert np.linalg.norm(C) == pytest.approx(1.0)
        s = bilinear_values(spec, C)
        mean = float(np.sum(plan * s))
        assert float(np.sum(plan * s**2)) - mean**2 == pytest.approx(variance, rel=1e-8)

        variance_bound = 64.0 - 32.0**2 / spec.eps * variance
        assert variance_bound >= hessian_eigenvalue_bounds(spec)[0] - 1e-10
        smallest = np.linalg.eigvalsh(hessian_matrix(spec, A, plan))[0]
        assert smallest >= variance_bound - 1e-8

    def test_variance_is_sharp_on_two_points(self, two_point):
        spec = build_problem(*two_point, eps=1.0, center_measures=False)
        plan = tight_plan(spec, spec.zeros())
        mass = two_point_coupling_mass([1.0], [1.0], np.zeros((1, 1)), eps=1.0)

        variance, C = coupling_variance_sup(spec, plan)
        assert variance == pytest.approx(mass * (1.0 - mass), rel=1e-10)
        assert abs(C[0, 0]) == pytest.approx(1.0)


def test_potentials_balance_the_direction():
    rng = np.random.default_rng(40)
    for _ in range(5):
        spec = random_spec(rng)
        A = rng.normal(0.0, 0.05, spec.shape)
        plan = tight_plan(spec, A)
        C = rng.normal(size=spec.shape)

        solution = solve_h_system(spec, plan, C)
        h = solution.h0[:, None] + solution.h1[None, :]
        weighted = 32.0 * float(np.sum(plan * bilinear_values(spec, C) * h))
        assert weighted == pytest.approx(float(np.sum(plan * h**2)), rel=1e-8, abs=1e-10)
