import numpy as np
import pytest

import src.egw.constants as consts
from src.egw.core import (
    Convexity,
    build_problem,
    convex_margin_eps,
    egw_value,
    gradient,
    gw_objective,
    kl_divergence,
    phi,
    project_box,
    project_dm,
    s1_constant,
    stationarity_gap,
)
from src.egw.exceptions import UncenteredMeasureError, ValidationError
from src.egw.measures import DiscreteMeasure, center, moments
from src.egw.oracle import sinkhorn


def random_pair(rng: np.random.Generator, n0: int, n1: int, d0: int, d1: int) -> tuple:
    def measure(n, d):
        points, weights = rng.normal(0.0, 0.25, (n, d)), rng.uniform(0.1, 1.0, n)
        return DiscreteMeasure(points=points, weights=weights / weights.sum())

    return measure(n0, d0), measure(n1, d1)


def tight_plan(spec, A):
    K = spec.kernel(A)
    coupling, _ = sinkhorn(K, spec.mu0.weights, spec.mu1.weights, 1e-14)
    return coupling.plan


class TestProblemConstants:
    def test_defaults(self, convex_pair):
        mu0, mu1 = convex_pair
        spec = build_problem(mu0, mu1, eps=2.0)
        m0, m1 = moments(spec.mu0), moments(spec.mu1)

        assert spec.centered
        assert spec.M == pytest.approx(np.sqrt(m0.m2 * m1.m2) + consts.M_MARGIN)
        assert spec.L_ot == pytest.approx(1024.0 / 2.0 * np.sqrt(m0.m4 * m1.m4))
        assert spec.L == pytest.approx(max(64.0, spec.L_ot - 64.0))
        assert spec.convexity_threshold == pytest.approx(2.0 / 16.0)

    def test_convex_margin_gives_a_certificate(self, convex_pair):
        mu0, mu1 = convex_pair
        eps = convex_margin_eps(mu0, mu1)
        spec = build_problem(mu0, mu1, eps)
        assert spec.convexity == Convexity.CERTIFIED_CONVEX
        assert spec.L == 64.0

        below = build_problem(mu0, mu1, convex_margin_eps(mu0, mu1, margin=0.9))
        assert below.convexity == Convexity.UNKNOWN

    def test_delta_prime(self, nonconvex_pair):
        mu0, mu1 = nonconvex_pair
        spec = build_problem(mu0, mu1, 0.07)
        norm_sum = spec.mu0.norms.sum() * spec.mu1.norms.sum()
        assert spec.delta_prime(1e-3) == pytest.approx(32.0 * spec.M * 1e-3 * norm_sum)
        assert spec.gradient_error(1e-3) == pytest.approx(32.0 * 1e-3 * norm_sum)

    @pytest.mark.parametrize("eps", [0.0, -1.0, np.inf, np.nan])
    def test_invalid_eps(self, two_point, eps):
        with pytest.raises(ValidationError):
            build_problem(*two_point, eps=eps)

    def test_M_below_second_moments(self, convex_pair):
        with pytest.raises(ValidationError, match="'M' must be >="):
            build_problem(*convex_pair, eps=1.0, M=1e-3)

    def test_uncentered_problem_keeps_the_points(self, convex_pair):
        mu0, mu1 = convex_pair
        spec = build_problem(mu0, mu1, eps=1.0, center_measures=False)
        assert not spec.centered
        np.testing.assert_array_equal(spec.mu0.points, mu0.points)


class TestProjection:
    def test_ball_projection(self):
        A = np.array([[3.0, 4.0]])
        projected = project_dm(A, M=2.0)
        assert np.linalg.norm(projected) == pytest.approx(1.0)
        np.testing.assert_allclose(projected, [[0.6, 0.8]])

    def test_interior_points_are_kept(self):
        A = np.array([[0.1, -0.2]])
        np.testing.assert_array_equal(project_dm(A, M=2.0), A)

    def test_projection_is_idempotent(self):
        A = np.random.default_rng(0).normal(size=(3, 2)) * 10
        once = project_dm(A, M=1.5)
        np.testing.assert_allclose(project_dm(once, M=1.5), once)

    def test_box_projection(self):
        np.testing.assert_array_equal(
            project_box(np.array([[2.0, -0.1, -3.0]]), M=2.0), [[1.0, -0.1, -1.0]]
        )


class TestObjective:
    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(1)
        h = 1e-5
        for _ in range(20):
            n0, n1 = rng.integers(2, 11, size=2)
            d0, d1 = rng.integers(1, 4, size=2)
            spec = build_problem(*random_pair(rng, n0, n1, d0, d1), eps=1.0)
            A = rng.normal(0.0, 0.05, spec.shape)

            expected = gradient(spec, A, tight_plan(spec, A))
            numeric = np.zeros(spec.shape)
            for index in np.ndindex(*spec.shape):
                step = np.zeros(spec.shape)
                step[index] = h
                upper = phi(spec, A + step, delta=1e-12).value
                lower = phi(spec, A - step, delta=1e-12).value
                numeric[index] = (upper - lower) / (2.0 * h)

            error = np.linalg.norm(numeric - expected) / np.linalg.norm(expected)
            assert error <= 1e-4

    def test_phi_certificate_respects_delta(self, nonconvex_pair):
        spec = build_problem(*nonconvex_pair, eps=0.5)
        evaluation = phi(spec, np.full(spec.shape, 0.01), delta=1e-6)
        assert evaluation.certificate.converged
        assert evaluation.certificate.delta_sup <= 1e-6 * (1 + 1e-9)

    def test_phi_is_even_for_a_symmetric_target(self, symmetric_pair):
        spec = build_problem(*symmetric_pair, eps=1.0)
        A = np.random.default_rng(6).normal(0.0, 0.05, spec.shape)
        assert phi(spec, -A, delta=1e-12).value == pytest.approx(
            phi(spec, A, delta=1e-12).value, rel=1e-9, abs=1e-12
        )

    def test_clamped_tolerance_is_flagged(self, nonconvex_pair):
        spec = build_problem(*nonconvex_pair, eps=0.5)
        A = np.full(spec.shape, 0.01)
        evaluation = phi(spec, A, delta=1e-6, gamma_floor=0.5)
        assert evaluation.clamped
        assert evaluation.certificate.gamma == pytest.approx(0.5 * spec.mu1.weights.min())
        assert not phi(spec, A, delta=1e-6).clamped

    def test_phi_needs_a_positive_radius(self, two_point):
        spec = build_problem(*two_point, eps=1.0)
        with pytest.raises(ValueError):
            phi(spec, spec.zeros(), delta=0.0)

    def test_stationarity_gap_is_the_scaled_gradient(self, nonconvex_pair):
        spec = build_problem(*nonconvex_pair, eps=0.5)
        A = np.full(spec.shape, 0.02)
        plan = tight_plan(spec, A)
        assert stationarity_gap(spec, A, plan) == pytest.approx(
            np.linalg.norm(gradient(spec, A, plan)) / 64.0
        )

    def test_independent_plan_has_zero_divergence(self):
        a, b = np.array([0.3, 0.7]), np.array([0.5, 0.25, 0.25])
        assert kl_divergence(np.outer(a, b), a, b) == pytest.approx(0.0, abs=1e-15)


class TestDecomposition:
    def test_value_matches_the_quadratic_objective(self):
        rng = np.random.default_rng(17)
        for d0, d1 in [(1, 1), (2, 3), (3, 2)]:
            spec = build_problem(*random_pair(rng, 5, 6, d0, d1), eps=0.8)
            plan = tight_plan(spec, rng.normal(0.0, 0.05, spec.shape))
            # A = E_P[x y^T] / 2 makes the variational form exact for the plan
            A = 0.5 * spec.mu0.points.T @ plan @ spec.mu1.points

            expected = gw_objective(spec.mu0, spec.mu1, plan, spec.eps)
            assert egw_value(spec, A, plan) == pytest.approx(expected, rel=1e-10)

    def test_s1_of_a_point_mass(self):
        m = DiscreteMeasure(points=[[0.0, 0.0]], weights=[1.0])
        assert s1_constant(m, m) == 0.0

    def test_s1_on_the_two_point_measure(self, two_point):
        mu0, mu1 = (center(m) for m in two_point)
        # pairwise term 2 * 1/4 * 1 per marginal, M2 = 1/4 after centering
        assert s1_constant(mu0, mu1) == pytest.approx(0.5 + 0.5 - 4.0 * 0.25 * 0.25)

    def test_uncentered_value_is_refused(self, convex_pair):
        spec = build_problem(*convex_pair, eps=2.0, center_measures=False)
        A = spec.zeros()
        plan = tight_plan(spec, A)
        with pytest.raises(UncenteredMeasureError):
            egw_value(spec, A, plan)
        assert np.isfinite(egw_value(spec, A, plan, allow_uncentered=True))
