import math

import numpy as np
import pytest
from scipy import stats

from levylimit import stable
from levylimit.errors import InvalidTripletError, SamplingError
from levylimit.stable import StableParams, stable_log_cf, standard_cdf, standard_cf, tail_constant
from levylimit.stattest import ks_critical, ks_distance, stable_cdf
from levylimit.tails import CallableTails

PARAMS = [StableParams(0.5, 1.0, 0.3), StableParams(0.8, 1.0, 1.0), StableParams(1.0, 0.2, 1.0),
          StableParams(1.0, 1.0, 1.0), StableParams(1.5, 2.0, 0.5), StableParams(1.8, 0.0, 1.0)]
IDS = [f"a{p.alpha}-c{p.c1}-{p.c2}" for p in PARAMS]
X = np.array([-7.0, -1.3, -0.05, 0.2, 1.0, 4.0])


@pytest.mark.parametrize("p", PARAMS, ids=IDS)
def test_log_cf_matches_levy_khintchine_quadrature(p):
    a = p.alpha
    generic = CallableTails(lambda y: p.c1 * np.abs(y) ** -a, lambda y: -p.c2 * y ** -a,
                            lambda y: a * p.c1 * np.abs(y) ** (-a - 1), lambda y: a * p.c2 * y ** (-a - 1))
    for x in X:
        ref = generic.levy_exponent(x)
        assert abs(stable_log_cf(p, 1.0, x) - ref) < 1e-8 * max(1.0, abs(ref))


@pytest.mark.parametrize("p", PARAMS, ids=IDS)
@pytest.mark.parametrize("t", [0.25, 1.0, 3.0])
def test_s1_map(p, t):
    # Y(t) = scale * Z + location (+ the alpha = 1 log correction), Z standard S1
    s, m = p.scale(t), p.location(t)
    shift = m + (2 / math.pi * p.beta * s * math.log(s) if p.alpha == 1.0 else 0.0)
    lhs = standard_cf(s * X, p.alpha, p.beta) * np.exp(1j * shift * X)
    np.testing.assert_allclose(lhs, np.exp(stable_log_cf(p, t, X)), rtol=1e-12, atol=1e-14)


def test_beta_sign_convention():
    # only positive jumps: totally skewed to the right
    assert StableParams(1.5, 0.0, 1.0).beta == 1.0
    assert StableParams(1.5, 1.0, 0.0).beta == -1.0


@pytest.mark.parametrize("alpha,beta", [(0.7, 0.0), (0.7, 0.6), (1.0, -0.4), (1.5, 0.3), (1.9, -1.0)])
def test_standard_cdf_against_scipy(alpha, beta):
    z = np.array([-3.0, -0.5, 0.0, 0.8, 2.5])
    ref = stats.levy_stable.cdf(z, alpha, beta)
    np.testing.assert_allclose(standard_cdf(z, alpha, beta), ref, atol=2e-5)


def test_cauchy_closed_form():
    p = StableParams(1.0, 0.7, 0.7)
    g0 = (p.c1 + p.c2) * math.pi / 2
    y = np.array([-30.0, -2.0, -0.1, 0.0, 0.4, 5.0, 200.0])
    np.testing.assert_allclose(p.cdf(y), 0.5 + np.arctan(y / g0) / math.pi, atol=1e-9)


@pytest.mark.parametrize("alpha,beta", [(0.8, 0.0), (1.5, 0.5)])
def test_tail_slope(alpha, beta):
    z = np.array([1e3, 1e4])
    upper = 1.0 - standard_cdf(z, alpha, beta, exact=True)
    slope = np.diff(np.log(upper))[0] / math.log(10.0)
    assert abs(slope + alpha) < 0.05 * alpha
    assert upper[1] == pytest.approx(tail_constant(alpha) * (1 + beta) * 1e4 ** -alpha, rel=0.02)


@pytest.mark.parametrize("alpha,beta", [(0.8, 0.0), (1.0, 0.5), (1.5, -0.3)])
def test_table_matches_direct_inversion(alpha, beta):
    z = np.sinh(np.linspace(-9.0, 9.0, 301))
    np.testing.assert_allclose(standard_cdf(z, alpha, beta), standard_cdf(z, alpha, beta, exact=True), atol=1e-7)
    assert np.all(np.diff(standard_cdf(z, alpha, beta)) >= -1e-9)


@pytest.mark.parametrize("alpha", [0.6, 1.5])
def test_symmetric_self_similarity(alpha):
    p = StableParams(alpha, 1.0, 1.0)
    y = np.array([-3.0, -0.2, 0.5, 2.0])
    for t in (0.25, 4.0):
        np.testing.assert_allclose(p.cdf(y, t), p.cdf(y / t ** (1 / alpha), 1.0), atol=1e-10)


@pytest.mark.parametrize("p", PARAMS, ids=IDS)
def test_sampler_ks(p):
    gen = np.random.default_rng(7)
    t = 0.5
    draws = p.sample(gen, 10_000, t)
    assert np.all(np.isfinite(draws))
    assert ks_distance(draws, lambda y: p.cdf(y, t)) < ks_critical(10_000, 0.01)


def test_sampler_gives_up(monkeypatch):
    monkeypatch.setattr(stable.kernels, "cms_standard", lambda u, w, a, b: np.full(u.shape, np.nan))
    with pytest.raises(SamplingError):
        stable.sample_standard(np.random.default_rng(0), 5, 1.5, 0.0, max_rounds=3)


def test_parameter_validation():
    for bad in ((2.0, 1, 1), (0.0, 1, 1), (1.5, -1, 1), (1.5, 0, 0)):
        with pytest.raises(InvalidTripletError):
            StableParams(*bad)
    with pytest.raises(ValueError):
        stable_cdf(StableParams(1.5, 1, 1), 0.0, 1.0)
