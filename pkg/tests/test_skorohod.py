import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from levylimit.laws import Atoms
from levylimit.levy_sim import sample_compound_poisson
from levylimit.paths import build_path, constant_path, linear_path, step_path
from levylimit.rng import RngStream
from levylimit.skorohod import (TimeWarp, compose, metric_j1, metric_rho0, metric_rho1, oscillation_tail,
                                sup_distance)


def unit_jump(at):
    return step_path([at], [1.0], 1.0)


def test_rho1_examples():
    x = step_path([0.3], [2.0], 1.0)
    assert metric_rho1(x, x) == 0.0
    assert metric_rho1(constant_path(0.0), constant_path(0.3)) == pytest.approx(0.3)
    assert metric_rho1(constant_path(0.0), constant_path(5.0)) == 1.0


def test_j1_examples():
    x = unit_jump(0.5)
    assert metric_j1(x, x) == 0.0
    y = unit_jump(0.51)
    assert sup_distance(x, y) == 1.0
    assert metric_j1(x, y) <= 0.01 + 1e-12
    for c in (0.2, 1.0):
        assert metric_j1(constant_path(0.0), constant_path(c)) == pytest.approx(c)
    with pytest.raises(ValueError):
        metric_j1(x, y, warp_resolution=0)


def test_rho0_examples():
    x = unit_jump(0.5)
    assert metric_rho0(x, x) == 0.0
    assert metric_rho0(constant_path(0.0), constant_path(1.0)) == pytest.approx(0.5)
    # two jumps of size 3 far apart in time: no warp within the horizon beats the uniform distance
    far = metric_rho0(constant_path(0.0), constant_path(3.0))
    assert far == pytest.approx(0.75)


def test_sup_includes_left_limits():
    # the paths differ only on [0.4, 0.5), seen at the left limit of 0.5
    x = build_path([0.0, 0.4, 0.5, 1.0], [0.0, 0.0, 0.0, 0.0], [0.4, 0.5], [1.0, -1.0])
    y = step_path([], [], 1.0)
    assert sup_distance(x, y) == 1.0


def test_time_warp():
    w = TimeWarp(np.array([0.0, 0.5, 1.0]), np.array([0.0, 0.6, 1.0]))
    assert w(0.25) == pytest.approx(0.3) and w.inverse(0.3) == pytest.approx(0.25)
    assert w.sup_distance() == pytest.approx(0.1)
    with pytest.raises(ValueError):
        TimeWarp(np.array([0.0, 0.5, 1.0]), np.array([0.0, 0.7, 0.6]))
    with pytest.raises(ValueError):
        TimeWarp(np.array([0.0, 1.0]), np.array([0.1, 1.0]))
    x = unit_jump(0.6)
    xw = compose(x, w).check()
    np.testing.assert_allclose(xw.jump_times, [0.5])
    assert xw(0.49) == 0.0 and xw(0.5) == 1.0


paths = st.lists(st.tuples(st.floats(0.01, 0.99), st.floats(-2.0, 2.0)), max_size=5).map(
    lambda j: step_path([t for t, _ in j], [v for _, v in j], 1.0, grid=np.linspace(0.0, 1.0, 5)))


@given(paths, paths, paths)
def test_metric_properties(x, y, z):
    for d in (metric_rho1, metric_rho0):
        assert d(x, y) == d(y, x)
        assert d(x, z) <= d(x, y) + d(y, z) + 1e-12
        assert 0.0 <= d(x, y) <= 1.0
    assert metric_rho1(x, y) >= metric_rho0(x, y)
    assert metric_j1(x, y) <= sup_distance(x, y)


@given(paths)
def test_vanish_on_equal_skeletons(x):
    assert metric_rho1(x, x) == 0.0 and metric_rho0(x, x) == 0.0


@given(st.floats(0.2, 0.8), st.floats(-0.05, 0.05), st.floats(0.3, 0.7))
def test_common_warp_invariance(tau, shift, knot):
    x = unit_jump(tau)
    y = unit_jump(min(max(tau + shift, 0.01), 0.99))
    w = TimeWarp(np.array([0.0, knot, 1.0]), np.array([0.0, knot + 0.05, 1.0]))
    before = metric_j1(x, y)
    after = metric_j1(compose(x, w), compose(y, w))
    # a common warp moves each path by at most sup |lambda - id| in J1
    assert abs(after - before) <= 2 * w.sup_distance() + 1e-12


def test_oscillation_linear_paths():
    lines = [linear_path(1.0, n=11) for _ in range(5)]
    for mode in ("pointwise", "uniform"):
        assert oscillation_tail(lines, 0.1, 0.2, mode=mode) == 0.0
        assert oscillation_tail(lines, 0.3, 0.2, mode=mode) == 1.0


def test_oscillation_poisson_window():
    stream = RngStream(21)
    h, m = 0.05, 4000
    family = [sample_compound_poisson(1.0, Atoms((1.0,), (1.0,)), 1.0, stream.child(i)) for i in range(m)]
    p = 1.0 - math.exp(-h)
    assert p <= h
    est = oscillation_tail(family, h, 0.5)
    assert abs(est - p) < 5 * math.sqrt(p * (1 - p) / m)
    # some window of width h holds a jump with probability about 1 - e^-1
    assert oscillation_tail(family, h, 0.5, mode="uniform") > est


def test_oscillation_validation():
    with pytest.raises(ValueError):
        oscillation_tail([linear_path(1.0)], 1.0, 0.1)
    with pytest.raises(ValueError):
        oscillation_tail([], 0.1, 0.1)
    with pytest.raises(ValueError):
        oscillation_tail([linear_path(1.0)], 0.1, 0.1, mode="sideways")
