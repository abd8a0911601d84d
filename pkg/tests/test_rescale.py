import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from levylimit.errors import HorizonError, NoNormingError, QuadratureError
from levylimit.laws import Atoms, DoubleExponential, Normal, ParetoTails
from levylimit.levy_core import LevyTriplet
from levylimit.paths import build_path, linear_path, step_path
from levylimit.rescale import (GaussianTarget, NormingPlan, compute_centering_bn, compute_centering_gaussian,
                               derive_norming, gaussian_correction, rescale_path, stable_normal_plan)
from levylimit.stable import StableParams
from levylimit.tails import CallableTails

# K(n, n) for alpha = 1, c1 = 1, c2 = 0, evaluated once with mpmath at 30 digits
ALPHA1_ORACLE = {
    10: 2.302585092994045684,
    100: 4.605170185988091368,
    1000: 6.9077552789821370521,
    4096: 8.317766166719343713,
}
UNIT_CP = LevyTriplet.compound_poisson(1.0, Atoms((1.0,), (1.0,)))


def test_stable_normal_formula():
    plan = derive_norming(LevyTriplet.stable(StableParams(0.5, 1.0, 1.0)), StableParams(0.5, 1.0, 1.0), n_max=16)
    assert plan.regime == "stable-normal"
    s, a, _ = plan.at(16)
    assert s == 16 and a == 256
    np.testing.assert_array_equal(plan.a, plan.s ** 2)
    assert plan.is_monotone()


def test_exact_stable_tail_cp_is_normal_regime():
    tr = LevyTriplet.compound_poisson(2.0, ParetoTails(1.5, 0.5))
    target = StableParams(1.5, 1.0, 1.0)
    plan = derive_norming(tr, target, n_values=[256, 4096])
    assert plan.regime == "stable-normal"
    np.testing.assert_array_equal(plan.a, np.array([256.0, 4096.0]) ** (1 / 1.5))
    # symmetric jumps: no kernel, and gamma from the compensator gives b = s gamma / a
    np.testing.assert_array_equal(plan.kernel, 0.0)
    np.testing.assert_allclose(plan.b, plan.s * tr.gamma / plan.a, rtol=1e-15)


def test_slowly_varying_tails_general_regime():
    alpha, n = 0.8, 1_000_000

    def f(v):
        v = np.maximum(np.abs(v), math.e)
        return (1.0 + 1.0 / np.log(v)) * v ** -alpha

    tr = LevyTriplet(0.0, 0.0, CallableTails(f, lambda y: -f(y), symmetric=True))
    plan = derive_norming(tr, StableParams(alpha, 1.0, 1.0), n_values=[n], regime="stable-general")
    s, a, _ = plan.at(n)
    y = np.geomspace(0.1, 10.0, 21)
    np.testing.assert_allclose(s * tr.tails.L(-a * y), y ** -alpha, rtol=0.02)
    np.testing.assert_allclose(-s * tr.tails.R(a * y), y ** -alpha, rtol=0.02)


@pytest.mark.parametrize("lam", [0.5, 1.0, 3.0])
def test_gaussian_norming_unit_jumps(lam):
    tr = LevyTriplet.compound_poisson(lam, Atoms((1.0,), (1.0,)))
    plan = derive_norming(tr, GaussianTarget(1.0), n_values=[16, 256, 4096])
    np.testing.assert_allclose(plan.a, np.sqrt(lam * plan.s), rtol=1e-10)
    assert plan.regime == "gaussian"


def test_no_norming_errors():
    with pytest.raises(NoNormingError) as info:
        derive_norming(LevyTriplet(0.0, 0.0, CallableTails(lambda y: 0 * y, lambda y: 0 * y)),
                       StableParams(1.5, 1, 1), n_values=[10], regime="stable-general")
    assert info.value.diagnostics["n"] == 10
    with pytest.raises(NoNormingError):
        derive_norming(LevyTriplet(0.0, 1.0), StableParams(1.5, 1, 1), n_values=[10])
    with pytest.raises(ValueError):
        derive_norming(UNIT_CP, GaussianTarget(1.0), n_values=[10], regime="stable-normal")


# -- centering ---------------------------------------------------------------

def test_kernel_vanishes_at_unit_scale():
    tr = LevyTriplet.compound_poisson(1.0, DoubleExponential(1.0, 2.0, 0.8))
    assert compute_centering_bn(tr, 50.0, 1.0) == 0.0
    assert compute_centering_bn(tr, 50.0, 3.0) != 0.0


@pytest.mark.parametrize("tr", [
    LevyTriplet.stable(StableParams(1.3, 2.0, 2.0)),
    LevyTriplet.compound_poisson(1.0, Normal(0.0, 2.0)),
    LevyTriplet.compound_poisson(1.0, Atoms((-2.0, -0.5, 0.5, 2.0), (0.1, 0.4, 0.4, 0.1))),
    LevyTriplet(0.0, 0.0, CallableTails(lambda y: np.abs(y) ** -1.5, lambda y: -np.abs(y) ** -1.5)),
], ids=["stable", "normal-jumps", "atoms", "callable"])
@pytest.mark.parametrize("a", [0.3, 7.0, 4096.0])
def test_symmetric_cancellation(tr, a):
    assert abs(compute_centering_bn(tr, 1000.0, a)) < 1e-10


@pytest.mark.parametrize("a", [0.3, 7.0, 4096.0])
def test_symmetric_cancellation_relative(a):
    # the same measure written two ways cancels to rounding level of one side
    tr = LevyTriplet(0.0, 0.0, CallableTails(lambda y: 1.0 / np.abs(y) ** 1.5, lambda y: -np.exp(-1.5 * np.log(y))))
    one_side = LevyTriplet(0.0, 0.0, CallableTails(lambda y: 0 * y, lambda y: -np.exp(-1.5 * np.log(y))))
    assert abs(compute_centering_bn(tr, 1000.0, a)) < 1e-10 * abs(compute_centering_bn(one_side, 1000.0, a))


@pytest.mark.parametrize("n", sorted(ALPHA1_ORACLE))
def test_alpha_one_oracle(n):
    tr = LevyTriplet.stable(StableParams(1.0, 1.0, 0.0))
    assert compute_centering_bn(tr, n, n) == pytest.approx(ALPHA1_ORACLE[n], rel=1e-6)


def test_kernel_with_atom_by_hand():
    # one atom at y = 2 with mass 3: s (1-a^2)/a * 3 * 8 / ((a^2+4) * 5)
    tr = LevyTriplet.compound_poisson(3.0, Atoms((2.0,), (1.0,)))
    s, a = 10.0, 4.0
    assert compute_centering_bn(tr, s, a) == pytest.approx(s * (1 - a * a) / a * 24 / ((a * a + 4) * 5), rel=1e-14)


def test_gaussian_correction_examples():
    assert gaussian_correction(LevyTriplet.gaussian(1.0), 100.0, 10.0) == 0.0
    assert compute_centering_gaussian(LevyTriplet.gaussian(1.0), 100.0, 10.0) == 0.0
    # shells a * eps <= 0.5 hold no jump mass
    assert gaussian_correction(UNIT_CP, 100.0, 0.5) == 0.0
    for lam in (1.0, 2.5):
        tr = LevyTriplet.compound_poisson(lam, Atoms((1.0,), (1.0,)))
        n = 10_000
        assert gaussian_correction(tr, n, math.sqrt(n)) == pytest.approx(lam, rel=1e-14)
        k = compute_centering_bn(tr, n, math.sqrt(n))
        assert compute_centering_gaussian(tr, n, math.sqrt(n)) == pytest.approx(k - lam, rel=1e-14)
        assert compute_centering_gaussian(tr, n, math.sqrt(n), include_correction=False) == k


def test_gaussian_correction_must_settle():
    # a shell boundary crossing the atom makes the shells disagree
    with pytest.raises(QuadratureError):
        gaussian_correction(UNIT_CP, 100.0, 5.0)


def test_correction_switch_in_plan():
    plain = derive_norming(UNIT_CP, GaussianTarget(1.0), n_values=[4096])
    corr = derive_norming(UNIT_CP, GaussianTarget(1.0), n_values=[4096], gaussian_correction_term=True)
    assert plain.correction is None
    np.testing.assert_allclose(corr.b - plain.b, corr.correction)


# -- rescaled paths ----------------------------------------------------------

def test_identity_rescaling():
    p = step_path([0.2, 0.7], [1.0, -2.5], 1.0)
    x = rescale_path(p, 1.0, 1.0, 0.0, grid_points=11)
    t = np.linspace(0, 1, 101)
    np.testing.assert_array_equal(x(t), p(t))


def test_zero_path_gives_line():
    z = step_path([], [], 5.0)
    x = rescale_path(z, 5.0, 2.0, 0.3, grid_points=17)
    np.testing.assert_allclose(x.values, -0.3 * x.grid, atol=1e-15)
    assert x.values[0] == 0.0


def test_jump_relocation():
    p = step_path([3.0], [2.0], 10.0)
    x = rescale_path(p, 10.0, 4.0, 0.0, grid_points=5)
    np.testing.assert_allclose(x.jump_times, [0.3])
    np.testing.assert_allclose(x.jump_sizes, [0.5])
    assert x(0.3) == pytest.approx(0.5) and x.left_limit(0.3) == 0.0
    x.check()


def test_horizon_error():
    with pytest.raises(HorizonError):
        rescale_path(step_path([], [], 1.0), 2.0, 1.0, 0.0)


step_paths = st.lists(st.tuples(st.floats(0.01, 4.0), st.floats(-3.0, 3.0)), max_size=6)


@given(step_paths, step_paths, st.floats(0.5, 4.0), st.floats(0.1, 10.0))
def test_linearity(j1, j2, s, a):
    horizon = 4.0
    grid = np.linspace(0.0, horizon, 9)
    p1 = step_path([t for t, _ in j1], [v for _, v in j1], horizon, grid=grid)
    p2 = step_path([t for t, _ in j2], [v for _, v in j2], horizon, grid=grid)
    both = step_path([t for t, _ in j1 + j2], [v for _, v in j1 + j2], horizon, grid=grid)
    x1, x2, xs = (rescale_path(p, s, a, 0.0, grid_points=33) for p in (p1, p2, both))
    t = np.linspace(0.0, 1.0, 57)
    np.testing.assert_allclose(xs(t), x1(t) + x2(t), atol=1e-12)


def test_linear_continuous_part():
    x = rescale_path(linear_path(2.0, horizon=8.0), 8.0, 4.0, 1.0, grid_points=9)
    np.testing.assert_allclose(x.values, (16.0 / 4.0 - 1.0) * x.grid, atol=1e-14)
    p = build_path([0.0, 1.0, 2.0], [0.0, 0.5, 1.0], [1.0], [3.0])
    assert rescale_path(p, 2.0, 1.0, 0.0, grid_points=3)(0.5) == pytest.approx(3.5)


def test_plan_round_trip():
    tr = LevyTriplet.compound_poisson(1.0, ParetoTails(1.2, 0.7))
    plan = derive_norming(tr, StableParams(1.2, 0.3, 0.7), n_values=[10, 100, 1000], regime="stable-general")
    back = NormingPlan.from_dict(plan.to_dict())
    for name in ("n", "s", "a", "b", "kernel"):
        np.testing.assert_array_equal(getattr(back, name), getattr(plan, name))
    assert back.regime == plan.regime and back.alpha == plan.alpha
    assert back.to_json() == plan.to_json()
    with pytest.raises(KeyError):
        plan.at(11)


def test_stable_normal_plan_helper():
    plan = stable_normal_plan(1.5, [8, 64], b=0.25)
    np.testing.assert_allclose(plan.a, [4.0, 16.0], rtol=1e-15)
    np.testing.assert_array_equal(plan.b, [0.25, 0.25])
