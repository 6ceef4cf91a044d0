import numpy as np
import pytest

from src.egw.core import convex_margin_eps, debiased_egw
from src.egw.exceptions import DebiasError
from src.egw.measures import raster_to_measure, rotate_raster
from src.egw.solvers import SolveConfig


def convex_eps(mu0, mu1) -> float:
    """eps keeping all three terms in the certified convex regime"""
    return max(convex_margin_eps(mu0, mu0), convex_margin_eps(mu1, mu1))


def test_identical_measures_cancel_exactly(convex_pair):
    mu, _ = convex_pair
    result = debiased_egw(mu, mu, convex_eps(mu, mu))
    assert result.value == 0.0
    assert result.s01 == result.s00 == result.s11


def test_quarter_turn_of_a_raster(raster):
    mu = raster_to_measure(raster)
    rotated = raster_to_measure(rotate_raster(raster, 90))
    eps = convex_eps(mu, rotated)

    result = debiased_egw(mu, rotated, eps)
    assert abs(result.value) <= 1e-5 * abs(result.s00) + 1e-8
    assert result.s11 == pytest.approx(result.s00, rel=1e-6)


def test_oblique_turn_shows_interpolation_distortion(raster):
    mu = raster_to_measure(raster)
    quarter = raster_to_measure(rotate_raster(raster, 90))
    oblique = raster_to_measure(rotate_raster(raster, 45))

    exact = debiased_egw(mu, quarter, convex_eps(mu, quarter))
    distorted = debiased_egw(mu, oblique, convex_eps(mu, oblique))
    assert np.isfinite(distorted.value)
    assert abs(distorted.value) > abs(exact.value)
    assert abs(distorted.value) <= 0.5 * abs(distorted.s00)


def test_symmetric_in_its_arguments(convex_pair):
    mu0, mu1 = convex_pair
    eps = convex_eps(mu0, mu1)
    forward = debiased_egw(mu0, mu1, eps)
    backward = debiased_egw(mu1, mu0, eps)
    assert forward.value == pytest.approx(backward.value, rel=1e-6, abs=1e-9)
    assert forward.to_dict().keys() == {"debiased", "s01", "s00", "s11"}


def test_parallel_terms_match(convex_pair):
    mu0, mu1 = convex_pair
    eps = convex_eps(mu0, mu1)
    assert debiased_egw(mu0, mu1, eps, jobs=2).value == debiased_egw(mu0, mu1, eps).value


def test_failed_term_is_named(convex_pair):
    with pytest.raises(DebiasError) as e:
        debiased_egw(*convex_pair, eps=1e-4)
    assert e.value.term == "S(mu0, mu1)"
    assert e.value.exit_code == 3


def test_uncentered_marginals_are_refused(convex_pair):
    mu0, mu1 = convex_pair
    with pytest.raises(DebiasError) as e:
        debiased_egw(mu0, mu1, 2.0, SolveConfig(max_outer_iters=5), center=False)
    assert e.value.exit_code == 2
