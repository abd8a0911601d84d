import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate, stats

from levylimit.laws import Normal
from levylimit.levy_core import LevyTriplet
from levylimit.levy_sim import sample_levy_marginal
from levylimit.rng import RngStream
from levylimit.stable import StableParams
from levylimit.stattest import (WeightedSample, cf_distance, cvm_distance, ks_critical, ks_critical_two_sample,
                                ks_critical_weighted, ks_distance, ks_two_sample, stable_cdf)

uniform = stats.uniform.cdf


def test_ks_examples():
    assert ks_distance(WeightedSample([0.5]), uniform) == pytest.approx(0.5)
    m = 100
    q = (np.arange(1, m + 1) - 0.5) / m
    assert ks_distance(q, uniform) == pytest.approx(0.5 / m, abs=1e-15)
    with pytest.raises(ValueError):
        ks_distance([], uniform)


def test_ks_calibration():
    # the 1% critical value is exceeded in about 1% of null runs
    gen = np.random.default_rng(31)
    runs, n = 1000, 10_000
    crit = ks_critical(n, 0.01)
    exceed = sum(ks_distance(gen.random(n), uniform) > crit for _ in range(runs))
    assert exceed <= 10 + 3 * math.sqrt(runs * 0.01 * 0.99)
    assert ks_critical(n, 0.01) == pytest.approx(1.6276 / 100, rel=1e-3)


def test_cvm_examples():
    m = 100
    q = (np.arange(1, m + 1) - 0.5) / m
    assert cvm_distance(q, uniform) == pytest.approx(1.0 / (12 * m * m), rel=1e-10)
    # point mass at the median against direct quadrature of (F_emp - F)^2 dF
    direct = integrate.quad(lambda u: (float(u >= 0.5) - u) ** 2, 0.0, 1.0, points=[0.5])[0]
    assert cvm_distance([0.5], uniform) == pytest.approx(direct, abs=1e-12)
    assert direct == pytest.approx(1.0 / 12.0, abs=1e-12)
    with pytest.raises(ValueError):
        cvm_distance([], uniform)


def test_cvm_weighted_against_quadrature():
    pts, w = np.array([-1.0, 0.2, 0.9]), np.array([0.5, 2.0, 1.5])
    cdf = stats.norm.cdf
    emp = lambda x: w[pts <= x].sum() / w.sum()  # noqa: E731
    direct = integrate.quad(lambda z: (emp(z) - cdf(z)) ** 2 * stats.norm.pdf(z), -12, 12, points=list(pts))[0]
    assert cvm_distance(WeightedSample(pts, w), cdf) == pytest.approx(direct, rel=1e-8)


def test_translation_monotone():
    q = stats.norm.ppf((np.arange(1, 201) - 0.5) / 200)
    shifts = np.linspace(0.0, 6.0, 13)
    for dist in (ks_distance, cvm_distance):
        vals = [dist(q + c, stats.norm.cdf) for c in shifts]
        assert np.all(np.diff(vals) > 0)


points = st.lists(st.integers(-5, 5).map(float), min_size=1, max_size=30)


@given(points, st.data())
def test_invariances(pts, data):
    w = np.array(data.draw(st.lists(st.floats(0.1, 5.0), min_size=len(pts), max_size=len(pts))))
    s = WeightedSample(pts, w)
    u, mw = s.merged()
    perm = np.random.default_rng(len(pts)).permutation(len(pts))
    cdf = stats.norm.cdf
    for dist in (ks_distance, cvm_distance):
        base = dist(s, cdf)
        assert dist(WeightedSample(u, mw), cdf) == pytest.approx(base, abs=1e-12)
        assert dist(WeightedSample(np.array(pts)[perm], w[perm]), cdf) == pytest.approx(base, abs=1e-12)
        assert dist(WeightedSample(pts, 7.5 * w), cdf) == pytest.approx(base, abs=1e-12)
        assert 0.0 <= base <= 1.0


def test_weighted_sample_validation():
    with pytest.raises(ValueError):
        WeightedSample([1.0, 2.0], [1.0])
    with pytest.raises(ValueError):
        WeightedSample([1.0], [0.0])
    with pytest.raises(ValueError):
        WeightedSample([np.inf])
    s = WeightedSample([1.0, 1.0, 2.0], [1.0, 1.0, 2.0])
    assert s.effective_size() == pytest.approx(16.0 / 6.0)
    assert ks_critical_weighted(s) == pytest.approx(ks_critical(16.0 / 6.0))


def test_two_sample_helpers():
    gen = np.random.default_rng(3)
    a, b = gen.normal(size=500), gen.normal(size=800)
    assert ks_two_sample(a, b) == pytest.approx(stats.ks_2samp(a, b).statistic)
    assert ks_critical_two_sample(500, 800) == pytest.approx(ks_critical(500 * 800 / 1300))


def test_stable_cdf_examples():
    p = StableParams(1.3, 0.8, 0.8)
    assert stable_cdf(p, 2.0, 0.0) == pytest.approx(0.5, abs=1e-10)
    cauchy = StableParams(1.0, 0.5, 0.5)
    x = np.array([-4.0, 0.3, 10.0])
    np.testing.assert_allclose(stable_cdf(cauchy, 1.0, x), 0.5 + np.arctan(x / (math.pi / 2)) / math.pi, atol=1e-9)
    grid = np.linspace(-50, 50, 401)
    assert np.all(np.diff(stable_cdf(StableParams(0.9, 1.0, 0.2), 1.5, grid)) >= -1e-9)
    assert stable_cdf(p, 1.0, -1e9) < 1e-9 and stable_cdf(p, 1.0, 1e9) > 1 - 1e-9


def test_stable_cdf_tail_slope():
    a = 1.3
    p = StableParams(a, 1.0, 1.0)
    up = [1.0 - stable_cdf(p, 1.0, x) for x in (1e3, 1e4)]
    assert abs(math.log10(up[1] / up[0]) + a) < 0.05 * a


def test_stable_cdf_self_similar():
    a, t = 1.3, 0.4
    p = StableParams(a, 1.0, 1.0)
    x = np.array([-2.0, -0.1, 0.6, 3.0])
    np.testing.assert_allclose(stable_cdf(p, t, x), stable_cdf(p, 1.0, x / t ** (1 / a)), atol=1e-9)


def test_cf_distance():
    tr = LevyTriplet(0.5, 0.4, LevyTriplet.compound_poisson(2.0, Normal(0.3, 1.0)).tails)
    draws = sample_levy_marginal(tr, 1.0, 0.01, RngStream(41), 10_000)
    grid = np.linspace(-10, 10, 201)
    assert cf_distance(draws, tr, 1.0, grid) < 5 / 100
    gamma = 1.7
    drift = LevyTriplet(gamma, 0.0)
    assert cf_distance([0.0], drift, 1.0, grid) == pytest.approx(np.max(np.abs(1 - np.exp(1j * grid * gamma))))
    assert cf_distance([0.0], drift, 1.0, []) == 0.0
