import csv
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from levylimit.asclt import (Constant, EvalAt, Inf, LogAvgMeasure, PathFunctional, Sup, asclt_distance,
                             build_log_average, check_condition_A, coupled_path, coupling_decay, distance_trace,
                             estimate_lemma1_constants, fit_loglog_slope, log_weights)
from levylimit.errors import HorizonError
from levylimit.laws import ParetoTails
from levylimit.levy_core import LevyTriplet
from levylimit.paths import step_path
from levylimit.rescale import derive_norming, rescale_path, stable_normal_plan
from levylimit.rng import RngStream
from levylimit.scenarios import cp_path
from levylimit.stable import StableParams
from scipy import stats

TRIPLET = LevyTriplet.compound_poisson(1.0, ParetoTails(1.5, 0.5))
TARGET = StableParams(1.5, 0.5, 0.5)


@pytest.fixture(scope="module")
def plan():
    return derive_norming(TRIPLET, TARGET, n_max=4096)


@pytest.fixture(scope="module")
def trajectory():
    return cp_path(TRIPLET, 4096.0, RngStream(77))


def test_condition_A():
    n = np.arange(1, 201, dtype=float)
    assert check_condition_A(n, 1.0)
    assert check_condition_A(n ** 2, 1.0)
    # ln n / n^0.1 peaks at n = e^10
    big = np.arange(2, 200_000, dtype=float)
    assert not check_condition_A(np.log(big), 0.1, n=big)
    assert check_condition_A(np.log(big[:20_000]), 0.1, n=big[:20_000])
    with pytest.raises(ValueError):
        check_condition_A([1.0], 1.0)
    with pytest.raises(ValueError):
        check_condition_A([1.0, 2.0], 0.0)


def test_total_mass(plan, trajectory):
    m = build_log_average(trajectory, plan, EvalAt(1.0), 10)
    assert m.total_mass == pytest.approx(1.27203, abs=5e-6)
    assert m.total_mass == pytest.approx(LogAvgMeasure.expected_mass(10), rel=1e-15)
    big = build_log_average(trajectory, plan, EvalAt(0.5), 4096)
    assert big.total_mass == pytest.approx(LogAvgMeasure.expected_mass(4096), rel=1e-13)
    assert np.all(np.diff(big.weights) < 0)


def test_log_weights_reject_n1():
    with pytest.raises(ValueError):
        log_weights(1)
    np.testing.assert_allclose(log_weights(4), 1.0 / (np.arange(1, 5) * math.log(4)))


def test_constant_functional(plan, trajectory):
    m = build_log_average(trajectory, plan, Constant(2.5), 50)
    assert np.all(m.values == 2.5)
    assert m.total_mass == pytest.approx(LogAvgMeasure.expected_mass(50))


class NoShortcut(PathFunctional):
    def __init__(self, inner):
        self.inner = inner
        self.name = inner.name

    def __call__(self, path):
        return self.inner(path)


@pytest.mark.parametrize("func", [EvalAt(1.0), EvalAt(0.3), Sup(), Inf()], ids=lambda f: f.name)
def test_batch_matches_rescaled_paths(func):
    v = cp_path(TRIPLET, 200.0, RngStream(78))
    plan = stable_normal_plan(1.5, np.arange(1, 201))
    fast = build_log_average(v, plan, func, 200)
    slow = build_log_average(v, plan, NoShortcut(func), 200, grid_points=65)
    np.testing.assert_allclose(fast.values, slow.values, rtol=1e-12, atol=1e-12)


def test_batch_with_centering(plan, trajectory):
    slow = build_log_average(trajectory, plan, NoShortcut(EvalAt(0.75)), 300)
    fast = build_log_average(trajectory, plan, EvalAt(0.75), 300)
    np.testing.assert_allclose(fast.values, slow.values, rtol=1e-12, atol=1e-12)
    # Sup has no shortcut once b is non-zero, but must still work
    assert build_log_average(trajectory, plan, Sup(), 20).values.size == 20


def test_horizon_and_plan_errors(plan):
    short = cp_path(TRIPLET, 100.0, RngStream(1))
    with pytest.raises(HorizonError):
        build_log_average(short, plan, EvalAt(1.0), 200)
    with pytest.raises(ValueError):
        build_log_average(short, stable_normal_plan(1.5, [1, 2, 4]), EvalAt(1.0), 4)


def test_synthetic_discretisation():
    n = 1000
    w = log_weights(n)
    mid = (np.cumsum(w) - 0.5 * w) / w.sum()
    m = LogAvgMeasure(stats.norm.ppf(mid), w, n, "synthetic")
    # each atom sits at the target quantile of its own mid-mass
    harmonic = w.sum() * math.log(n)
    assert asclt_distance(m, stats.norm.cdf) <= 0.5 / harmonic + 1e-12
    assert asclt_distance(m, stats.norm.cdf, mode="CvM") < (0.5 / harmonic) ** 2
    with pytest.raises(ValueError):
        asclt_distance(m, stats.norm.cdf, mode="AD")


@given(st.permutations(list(range(30))))
def test_reorder_invariance(perm):
    w = log_weights(30)
    vals = np.sin(np.arange(30.0)) * 3
    a = LogAvgMeasure(vals, w, 30, "x")
    b = LogAvgMeasure(vals[list(perm)], w[list(perm)], 30, "x")
    for mode in ("KS", "CvM"):
        assert asclt_distance(a, stats.norm.cdf, mode) == pytest.approx(asclt_distance(b, stats.norm.cdf, mode),
                                                                       abs=1e-14)


def test_distance_trace_consistency(plan, trajectory):
    trace = distance_trace(trajectory, plan, EvalAt(1.0), TARGET.cdf, [16, 256, 4096])
    for n, d in trace:
        direct = asclt_distance(build_log_average(trajectory, plan, EvalAt(1.0), n), TARGET.cdf)
        assert d == pytest.approx(direct, abs=1e-15)


def test_mismatched_target_plateaus(plan):
    wrong = StableParams(1.5, 10.0, 10.0)
    z = np.linspace(-30, 30, 6001)
    floor = float(np.max(np.abs(TARGET.cdf(z) - wrong.cdf(z))))
    good, bad = [], []
    for i in range(20):
        v = cp_path(TRIPLET, 4096.0, RngStream(5).child(i))
        good.append(distance_trace(v, plan, EvalAt(1.0), TARGET.cdf, [4096])[0][1])
        bad.append(distance_trace(v, plan, EvalAt(1.0), wrong.cdf, [4096])[0][1])
    assert min(bad) > 0.9 * floor
    assert np.mean(bad) > np.mean(good)


def test_measure_csv(tmp_path, plan, trajectory):
    m = build_log_average(trajectory, plan, EvalAt(1.0), 12)
    m.to_csv(tmp_path / "m.csv")
    with open(tmp_path / "m.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["functional_value", "weight"] and len(rows) == 13
    np.testing.assert_array_equal([float(r[1]) for r in rows[1:]], m.weights)


# -- Lemma 1 -----------------------------------------------------------------

def test_lemma1_bounded_array():
    res = estimate_lemma1_constants(lambda n, g: g.uniform(-0.5, 0.5, n), 1.0, [10, 100], rows=20, rng=1)
    assert res.C1 == 0.0
    assert res.stabilized()


def test_lemma1_scaled_and_unscaled():
    alpha = 0.8
    eta = ParetoTails(alpha, 0.75)
    scaled = estimate_lemma1_constants(lambda n, g: eta.sample(g, n) / n ** (1 / alpha), 1.0,
                                       [100, 1000, 10_000], rows=100, rng=RngStream(3))
    assert scaled.stabilized()
    # k_n P{|xi| >= 1} = n P{|eta| >= n^(1/alpha)} = 1 for this Pareto law; 100 rows give sd 0.1
    np.testing.assert_allclose(scaled.per_n["C1"], 1.0, rtol=0.35)
    unscaled = estimate_lemma1_constants(lambda n, g: eta.sample(g, n), 1.0, [100, 1000, 10_000], rows=20,
                                         rng=RngStream(4))
    assert unscaled.divergent()
    assert unscaled.per_n["C1"][-1] == pytest.approx(10_000, rel=1e-12)
    with pytest.raises(ValueError):
        estimate_lemma1_constants(lambda n, g: g.random(n), 0.0, [10])


# -- coupling ----------------------------------------------------------------

def test_coupling_zero_path():
    zero = lambda horizon, rng: step_path([], [], horizon)  # noqa: E731
    plan = stable_normal_plan(1.5, [2, 8, 64])
    rows = coupling_decay(zero, plan, [(2, 64), (8, 64)], 5, RngStream(0))
    assert [m for _, m in rows] == [0.0, 0.0]
    with pytest.raises(ValueError):
        coupling_decay(zero, plan, [(64, 8)], 5, RngStream(0))


def test_coupled_path_shape():
    v = step_path([1.0, 6.0], [2.0, -1.0], 8.0)
    x = rescale_path(v, 8.0, 2.0, 0.5, grid_points=9)
    c = coupled_path(x, v, 8.0, 2.0, 0.5, 4.0)
    # -b t on [0, 1/2], then X_k(t) - V(4)/a_k
    assert c(0.25) == pytest.approx(-0.125)
    assert c(0.9) == pytest.approx(x(0.9) - 1.0)
    np.testing.assert_allclose(c.jump_times, [0.75])


def test_coupling_near_diagonal_and_decay():
    k = 256
    plan = derive_norming(TRIPLET, TARGET, n_values=[1, 4, 64, k - 1, k])
    sampler = lambda horizon, rng: cp_path(TRIPLET, horizon, rng)  # noqa: E731
    stream = RngStream(8)
    rows = coupling_decay(sampler, plan, [(1, k), (4, k), (64, k), (k - 1, k)], 300, stream)
    means = [m for _, m in rows]
    s_k, a_k, b_k = plan.at(k)
    worst = np.mean([min(rescale_path(sampler(s_k, stream.child(k).child(r)), s_k, a_k, 0.0).sup_abs(), 1.0)
                     for r in range(300)])
    assert means[-1] == pytest.approx(worst, rel=0.1)
    assert means[0] < means[1] < means[2] < means[3]
    assert fit_loglog_slope([r for r, _ in rows[:3]], means[:3]) > 0.0
