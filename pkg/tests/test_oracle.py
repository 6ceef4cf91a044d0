import numpy as np
import pytest

from src.egw.core import two_point_coupling_mass
from src.egw.exceptions import KernelOverflowError, OracleToleranceError
from src.egw.measures import DiscreteMeasure
from src.egw.oracle import (
    Kernel,
    SinkhornOracle,
    build_kernel,
    contraction_coefficient,
    coupling_distance,
    hilbert_distance,
    log_cross_ratio,
    max_iterations_bound,
    norm_bound,
    oracle_tolerance_schedule,
    sinkhorn,
    sinkhorn_log,
    tolerance_alpha,
)


def random_weights(rng: np.random.Generator, n: int) -> np.ndarray:
    weights = rng.uniform(0.1, 1.0, n)
    return weights / weights.sum()


def random_kernel_problem(rng: np.random.Generator, n0: int = 8, n1: int = 8) -> tuple:
    mu0 = DiscreteMeasure(points=rng.normal(0.0, 0.3, (n0, 2)), weights=random_weights(rng, n0))
    mu1 = DiscreteMeasure(points=rng.normal(0.0, 0.3, (n1, 2)), weights=random_weights(rng, n1))
    A = rng.normal(0.0, 0.05, (2, 2))
    eps = rng.uniform(0.5, 2.0)
    return build_kernel(mu0, mu1, A, eps), mu0.weights, mu1.weights


class TestHilbertMetric:
    def test_scale_invariance(self):
        x, y = np.array([1.0, 2.0, 3.0]), np.array([2.0, 2.0, 1.0])
        assert hilbert_distance(3.0 * x, 0.5 * y) == pytest.approx(hilbert_distance(x, y))
        assert hilbert_distance(x, 7.0 * x) == pytest.approx(0.0, abs=1e-15)

    def test_known_value(self):
        assert hilbert_distance([1.0, np.e], [1.0, 1.0]) == pytest.approx(1.0)

    def test_rejects_nonpositive_entries(self):
        with pytest.raises(ValueError):
            hilbert_distance([1.0, 0.0], [1.0, 1.0])

    def test_norm_bound_dominates_distance(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            s, r = random_weights(rng, 6), random_weights(rng, 6)
            assert hilbert_distance(s, r) <= norm_bound(s, r) + 1e-12


class TestKernel:
    def test_rank_one_kernel_contracts_to_a_point(self):
        K = Kernel.from_matrix(np.outer([1.0, 2.0, 3.0], [0.5, 4.0]))
        assert K.log_eta == pytest.approx(0.0, abs=1e-12)
        assert K.contraction == pytest.approx(0.0, abs=1e-12)
        assert K.gap == pytest.approx(1.0)

    def test_two_by_two_cross_ratio(self):
        K = Kernel.from_matrix([[4.0, 1.0], [1.0, 1.0]])
        assert K.log_eta == pytest.approx(np.log(4.0))
        assert K.contraction == pytest.approx((2.0 - 1.0) / (2.0 + 1.0))

    def test_large_kernel_bound_is_conservative(self):
        rng = np.random.default_rng(5)
        L = rng.normal(size=(40, 30))
        exact = log_cross_ratio(L)
        bound = log_cross_ratio(L, exhaustive_threshold=0)
        assert bound >= exact - 1e-12

    def test_overflow_is_detected(self):
        cost = np.array([[-1e4, 0.0], [0.0, 0.0]])
        with pytest.raises(KernelOverflowError):
            Kernel.from_cost(cost, eps=1.0)
        assert not np.all(np.isfinite(Kernel.from_cost(cost, eps=1.0, strict=False).matrix))


class TestTwoPointClosedForm:
    @pytest.mark.parametrize("A", [0.0, 0.1, -0.1])
    @pytest.mark.parametrize("run", [sinkhorn, sinkhorn_log])
    def test_coupling_mass(self, two_point, A, run):
        mu0, mu1 = two_point
        K = build_kernel(mu0, mu1, np.array([[A]]), eps=1.0)
        coupling, certificate = run(K, mu0.weights, mu1.weights, gamma=1e-13)

        assert certificate.converged
        expected = two_point_coupling_mass([1.0], [1.0], np.array([[A]]), eps=1.0)
        assert abs(coupling.plan[1, 1] - expected) <= 1e-8
        assert abs(coupling.plan[0, 0] - expected) <= 1e-8

    def test_zero_matrix_value(self):
        z = 2.0
        assert two_point_coupling_mass([1.0], [1.0], np.zeros((1, 1)), 1.0) == pytest.approx(
            np.exp(z) / (2.0 * (1.0 + np.exp(z)))
        )


class TestCertificate:
    def test_certified_error_bounds_the_true_error(self):
        rng = np.random.default_rng(2024)
        violations = 0
        for _ in range(50):
            K, a, b = random_kernel_problem(rng)
            gamma = 10.0 ** rng.uniform(-8, -3)
            coupling, certificate = sinkhorn(K, a, b, gamma)
            reference, _ = sinkhorn(K, a, b, 1e-14)

            assert certificate.certified
            error = float(np.max(np.abs(coupling.plan - reference.plan)))
            if certificate.converged and error > np.expm1(certificate.delta_hilbert) + 1e-12:
                violations += 1
        assert violations == 0

    def test_certificate_bounds_the_scaling_distance(self):
        rng = np.random.default_rng(9)
        K, a, b = random_kernel_problem(rng, 5, 7)
        coupling, certificate = sinkhorn(K, a, b, 1e-6)
        reference, _ = sinkhorn(K, a, b, 1e-14)
        assert coupling_distance(coupling, reference) <= certificate.delta_hilbert + 1e-10

    def test_tolerance_schedule_meets_the_target(self):
        rng = np.random.default_rng(4)
        K, a, b = random_kernel_problem(rng)
        gamma = oracle_tolerance_schedule(1e-6, K, b)
        _, certificate = sinkhorn(K, a, b, gamma)
        assert certificate.converged
        assert certificate.delta_hilbert <= 1e-6

    def test_marginals(self):
        rng = np.random.default_rng(17)
        K, a, b = random_kernel_problem(rng, 6, 9)
        coupling, certificate = sinkhorn(K, a, b, 1e-9)
        np.testing.assert_allclose(coupling.row_marginal, a, atol=1e-13)
        assert np.linalg.norm(coupling.col_marginal - b) == pytest.approx(
            certificate.marginal_violation
        )
        assert certificate.marginal_violation < 1e-9

    def test_alpha_solves_the_tolerance_equation(self):
        for delta, gap in [(1e-6, 0.3), (0.5, 1.0), (2.0, 1e-3)]:
            alpha = tolerance_alpha(delta, gap)
            assert 0 < alpha < 1
            assert (2 * alpha - alpha**2) / (1 - alpha) == pytest.approx(delta * gap, rel=1e-10)

    def test_unreachable_tolerance(self):
        rng = np.random.default_rng(4)
        K, _, b = random_kernel_problem(rng)
        with pytest.raises(OracleToleranceError) as e:
            oracle_tolerance_schedule(1e-30, K, b)
        assert e.value.suggested_minimum > 1e-30
        assert oracle_tolerance_schedule(1e-30, K, b, floor=1e-15) == 1e-15

    def test_iteration_bound_grows_with_precision(self):
        rng = np.random.default_rng(8)
        K, a, b = random_kernel_problem(rng)
        _, certificate = sinkhorn(K, a, b, 1e-10)
        first = certificate.first_iterate_distance
        loose = max_iterations_bound(K, a, b, 1e-2, first)
        tight = max_iterations_bound(K, a, b, 1e-8, first)
        assert 1 <= loose <= tight

    def test_iteration_bound_on_the_two_point_instance(self, two_point):
        mu0, mu1 = two_point
        K = build_kernel(mu0, mu1, np.zeros((1, 1)), eps=1.0)
        a, b = mu0.weights, mu1.weights
        reference, certificate = sinkhorn(K, a, b, 1e-14)
        bound = max_iterations_bound(K, a, b, 0.1, certificate.first_iterate_distance)

        # the bound is on the true distance, the gamma rule may fire later
        reached = None
        for k in range(1, bound + 1):
            iterate, _ = sinkhorn(K, a, b, 1e-300, k_max=k)
            if coupling_distance(iterate, reference) <= 0.1:
                reached = k
                break
        assert reached is not None

    def test_iterates_contract_geometrically(self):
        rng = np.random.default_rng(28)
        for _ in range(20):
            K, a, b = random_kernel_problem(rng, 5, 5)
            reference, certificate = sinkhorn(K, a, b, 1e-14)
            lam, first = certificate.lambda_K, certificate.first_iterate_distance
            for k in range(2, 9):
                iterate, _ = sinkhorn(K, a, b, 1e-300, k_max=k)
                bound = lam ** (2 * (k - 1)) / (1.0 - lam) * first
                assert coupling_distance(iterate, reference) <= bound + 1e-9

    def test_exhausted_iterations_are_reported(self):
        rng = np.random.default_rng(3)
        K, a, b = random_kernel_problem(rng)
        _, certificate = sinkhorn(K, a, b, 1e-14, k_max=1)
        assert certificate.iterations == 1
        assert not certificate.converged


class TestLogDomain:
    def test_matches_the_scaling_form(self):
        rng = np.random.default_rng(21)
        K, a, b = random_kernel_problem(rng, 6, 4)
        coupling, _ = sinkhorn(K, a, b, 1e-12)
        log_coupling, certificate = sinkhorn_log(K, a, b, 1e-12)
        np.testing.assert_allclose(log_coupling.plan, coupling.plan, atol=1e-10)
        assert not certificate.certified


class TestOracle:
    def test_warm_start_reuses_the_scaling(self):
        rng = np.random.default_rng(13)
        K, a, b = random_kernel_problem(rng)
        oracle = SinkhornOracle()
        _, first = oracle(K, a, b, 1e-10)
        _, second = oracle(K, a, b, 1e-10)
        assert oracle.calls == 2
        assert second.iterations <= first.iterations
        assert oracle.total_iterations == first.iterations + second.iterations

    def test_cold_start_is_repeatable(self):
        rng = np.random.default_rng(13)
        K, a, b = random_kernel_problem(rng)
        oracle = SinkhornOracle(warm_start=False)
        first, _ = oracle(K, a, b, 1e-10)
        second, _ = oracle(K, a, b, 1e-10)
        np.testing.assert_array_equal(first.plan, second.plan)


def test_birkhoff_contraction():
    rng = np.random.default_rng(99)
    violations = 0
    for _ in range(100):
        n, m = rng.integers(2, 8, size=2)
        K = Kernel.from_matrix(np.exp(rng.normal(0.0, 1.0, (n, m))))
        x, y = rng.uniform(0.01, 1.0, m), rng.uniform(0.01, 1.0, m)
        lam = contraction_coefficient(K)
        if hilbert_distance(K.matrix @ x, K.matrix @ y) > lam * hilbert_distance(x, y) + 1e-12:
            violations += 1
    assert violations == 0
