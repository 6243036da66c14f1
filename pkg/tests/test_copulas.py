import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from copgof import copulas
from copgof.copulas import (CopulaModel, Family, PseudoObservation, cdf,
                            density, loglik_vec, partial_u1, partial_u2,
                            sample_pairs, score_vec, hessian_vec,
                            tau_to_theta, theta_to_tau)

THETAS = {
    Family.CLAYTON: 2.0,
    Family.FRANK: 5.0,
    Family.JOE: 2.5,
    Family.GAUSSIAN: 0.6,
    Family.GUMBEL: 2.0,
}


def _grid():
    u = np.linspace(0.1, 0.9, 7)
    return np.meshgrid(u, u)


# --- frozen pointwise values -------------------------------------------

def test_clayton_cdf_half_half():
    # C(1/2, 1/2; 2) = (2^2 + 2^2 - 1)^(-1/2) = 7^(-1/2)
    m = CopulaModel(Family.CLAYTON, 2.0)
    assert cdf(m, 0.5, 0.5) == pytest.approx(7.0 ** -0.5, abs=1e-12)


def test_clayton_density_half_half():
    # 3 * 2^6 * 7^(-5/2) evaluated by hand
    m = CopulaModel(Family.CLAYTON, 2.0)
    expect = 3.0 * 64.0 * 7.0 ** -2.5
    assert density(m, 0.5, 0.5) == pytest.approx(expect, rel=1e-12)


def test_clayton_loglik_pieces_frozen():
    u1 = np.array([0.5])
    u2 = np.array([0.5])
    # fully observed pair: log c(1/2,1/2;2) = log 1.48100...
    ll = loglik_vec(Family.CLAYTON, 2.0, u1, u2, np.array([1]), np.array([1]))
    assert ll[0] == pytest.approx(0.39272, abs=1e-5)
    # doubly censored pair: log C(1/2,1/2;2) = -log(7)/2
    ll = loglik_vec(Family.CLAYTON, 2.0, u1, u2, np.array([0]), np.array([0]))
    assert ll[0] == pytest.approx(-0.97295, abs=1e-5)
    assert ll[0] == pytest.approx(-math.log(7.0) / 2.0, abs=1e-12)


def test_gaussian_cdf_closed_median():
    m = CopulaModel(Family.GAUSSIAN, 0.5)
    expect = 0.25 + math.asin(0.5) / (2.0 * math.pi)
    assert cdf(m, 0.5, 0.5) == pytest.approx(expect, rel=1e-9)


def test_frank_independence_limit():
    # small theta approaches the independence copula
    m = CopulaModel(Family.FRANK, 1e-5)
    assert cdf(m, 0.3, 0.7) == pytest.approx(0.21, rel=1e-4)


# --- boundary and copula axioms ---------------------------------------

@pytest.mark.parametrize("family", list(Family))
def test_copula_margins(family):
    m = CopulaModel(family, THETAS[family])
    u = np.array([0.2, 0.5, 0.8])
    near_one = np.full(3, 1.0 - 1e-10)
    np.testing.assert_allclose(cdf(m, u, near_one), u, rtol=1e-6)
    np.testing.assert_allclose(cdf(m, near_one, u), u, rtol=1e-6)
    assert cdf(m, 1e-10, 0.5) == pytest.approx(0.0, abs=1e-8)


@pytest.mark.parametrize("family", list(Family))
def test_partials_match_fd(family):
    m = CopulaModel(family, THETAS[family])
    u1, u2 = _grid()
    eps = 1e-6
    fd1 = (cdf(m, u1 + eps, u2) - cdf(m, u1 - eps, u2)) / (2 * eps)
    fd2 = (cdf(m, u1, u2 + eps) - cdf(m, u1, u2 - eps)) / (2 * eps)
    np.testing.assert_allclose(partial_u1(m, u1, u2), fd1, atol=1e-7, rtol=1e-5)
    np.testing.assert_allclose(partial_u2(m, u1, u2), fd2, atol=1e-7, rtol=1e-5)


@pytest.mark.parametrize("family", list(Family))
def test_density_matches_mixed_fd(family):
    m = CopulaModel(family, THETAS[family])
    u1, u2 = _grid()
    eps = 1e-5
    fd = (cdf(m, u1 + eps, u2 + eps) - cdf(m, u1 + eps, u2 - eps)
          - cdf(m, u1 - eps, u2 + eps) + cdf(m, u1 - eps, u2 - eps)) / (4 * eps * eps)
    np.testing.assert_allclose(density(m, u1, u2), fd, atol=1e-4, rtol=1e-4)


@pytest.mark.parametrize("family", list(Family))
def test_density_integrates_to_one(family):
    m = CopulaModel(family, THETAS[family])
    k = 200
    mid = (np.arange(k) + 0.5) / k
    u1, u2 = np.meshgrid(mid, mid)
    total = density(m, u1.ravel(), u2.ravel()).sum() / (k * k)
    assert total == pytest.approx(1.0, abs=5e-3)


# --- theta-derivatives against finite differences ----------------------

@pytest.mark.parametrize("family", list(Family))
def test_score_hessian_match_fd(family):
    theta = THETAS[family]
    rng = np.random.default_rng(31)
    u1 = rng.uniform(0.05, 0.95, 60)
    u2 = rng.uniform(0.05, 0.95, 60)
    d1 = rng.integers(0, 2, 60)
    d2 = rng.integers(0, 2, 60)
    h1 = 1e-6 * max(1.0, abs(theta))
    h2 = 1e-4 * max(1.0, abs(theta))
    ll = lambda t: loglik_vec(family, t, u1, u2, d1, d2)
    fd1 = (ll(theta + h1) - ll(theta - h1)) / (2 * h1)
    fd2 = (ll(theta + h2) - 2 * ll(theta) + ll(theta - h2)) / h2 ** 2
    np.testing.assert_allclose(score_vec(family, theta, u1, u2, d1, d2),
                               fd1, atol=1e-5, rtol=1e-4)
    np.testing.assert_allclose(hessian_vec(family, theta, u1, u2, d1, d2),
                               fd2, atol=1e-3, rtol=1e-3)


def test_gaussian_cdf_theta_derivative_is_density():
    # dC/dtheta equals the bivariate normal density at the quantiles
    u1, u2 = 0.3, 0.7
    theta = 0.5
    eps = 1e-5
    ma = CopulaModel(Family.GAUSSIAN, theta + eps)
    mb = CopulaModel(Family.GAUSSIAN, theta - eps)
    fd = (cdf(ma, u1, u2) - cdf(mb, u1, u2)) / (2 * eps)
    from copgof import numerics
    from scipy.special import ndtri
    pdf2 = numerics.binorm_pdf(ndtri(u1), ndtri(u2), theta)
    assert fd == pytest.approx(pdf2, rel=1e-5)


# --- tau <-> theta ------------------------------------------------------

@pytest.mark.parametrize("family", list(Family))
def test_tau_round_trip(family):
    taus = (0.2, 0.5, 0.7) if family is not Family.GAUSSIAN else (-0.4, 0.2, 0.5, 0.7)
    for tau in taus:
        theta = tau_to_theta(family, tau)
        assert theta_to_tau(family, theta) == pytest.approx(tau, abs=1e-8)


def test_tau_known_parameter_values():
    assert tau_to_theta(Family.CLAYTON, 0.5) == pytest.approx(2.0, abs=1e-12)
    assert tau_to_theta(Family.GUMBEL, 0.5) == pytest.approx(2.0, abs=1e-12)
    assert tau_to_theta(Family.GAUSSIAN, 0.5) == pytest.approx(math.sin(math.pi / 4), abs=1e-12)
    assert tau_to_theta(Family.FRANK, 0.5) == pytest.approx(5.736283, abs=1e-5)
    assert tau_to_theta(Family.JOE, 0.5) == pytest.approx(2.856257, abs=1e-5)


def test_tau_rejects_out_of_range():
    with pytest.raises(ValueError):
        tau_to_theta(Family.CLAYTON, -0.2)
    with pytest.raises(ValueError):
        tau_to_theta(Family.JOE, 1.0)


# --- sampling -----------------------------------------------------------

@pytest.mark.parametrize("family", list(Family))
def test_sampler_recovers_tau(family):
    from copgof.survival import empirical_kendall_tau
    theta = tau_to_theta(family, 0.5)
    m = CopulaModel(family, theta)
    u1, u2 = sample_pairs(m, np.random.default_rng(77), 5000)
    assert ((u1 > 0) & (u1 < 1) & (u2 > 0) & (u2 < 1)).all()
    assert empirical_kendall_tau(u1, u2) == pytest.approx(0.5, abs=0.025)


def test_sampler_deterministic():
    m = CopulaModel(Family.JOE, 2.5)
    a = sample_pairs(m, np.random.default_rng(5), 100)
    b = sample_pairs(m, np.random.default_rng(5), 100)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])


# --- validation and transforms ------------------------------------------

def test_model_domain_validation():
    with pytest.raises(ValueError):
        CopulaModel(Family.CLAYTON, 0.0)
    with pytest.raises(ValueError):
        CopulaModel(Family.GUMBEL, 1.0)
    with pytest.raises(ValueError):
        CopulaModel(Family.GAUSSIAN, 1.0)


def test_family_parse():
    assert Family.parse(" Clayton ") is Family.CLAYTON
    with pytest.raises(ValueError):
        Family.parse("vine")


def test_pseudo_observation_validation():
    with pytest.raises(ValueError):
        PseudoObservation(0.0, 0.5, 1, 1)
    with pytest.raises(ValueError):
        PseudoObservation(0.3, 0.5, 2, 1)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(list(Family)), st.floats(min_value=-5.0, max_value=5.0))
def test_unconstrained_transform_round_trip(family, x):
    theta = copulas.from_unconstrained(family, x)
    assert copulas.family_ops(family).in_domain(theta)
    assert copulas.to_unconstrained(family, theta) == pytest.approx(x, abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(list(Family)),
       st.floats(min_value=0.05, max_value=0.95),
       st.floats(min_value=0.05, max_value=0.95))
def test_cdf_bounds(family, u1, u2):
    m = CopulaModel(family, THETAS[family])
    v = cdf(m, u1, u2)
    # Frechet-Hoeffding bounds
    assert max(u1 + u2 - 1.0, 0.0) - 1e-9 <= v <= min(u1, u2) + 1e-9
