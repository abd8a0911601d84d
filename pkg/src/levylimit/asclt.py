"""Log-averaged empirical measures along one trajectory and related diagnostics."""
from dataclasses import dataclass, field
import csv
import math

import numpy as np

from .errors import HorizonError
from .paths import CadlagPath
from .rescale import NormingPlan, rescale_path
from .rng import RngStream, as_generator
from .skorohod import metric_rho1
from .stattest import WeightedSample, cvm_distance, ks_distance


def check_condition_A(s, beta, n=None, rtol=1e-12):
    """True iff ``s_n / n^beta`` is non-decreasing over the stored indices.

    ``n`` defaults to ``1, 2, ..., len(s)``.
    """
    s = np.asarray(s, dtype=float)
    if s.size < 2 or np.any(s <= 0):
        raise ValueError("need at least two positive entries")
    if not beta > 0:
        raise ValueError("beta must be positive")
    n = np.arange(1, s.size + 1, dtype=float) if n is None else np.asarray(n, dtype=float)
    r = s / n ** beta
    return bool(np.all(np.diff(r) >= -rtol * np.abs(r[:-1])))


# -- path functionals ---------------------------------------------------------

class PathFunctional:
    name = "functional"

    def __call__(self, path: CadlagPath) -> float:
        raise NotImplementedError

    def batch(self, trajectory: CadlagPath, s, a, b):
        """Values on ``X_k`` for arrays of norming constants; None when no shortcut applies."""
        return None


@dataclass(frozen=True)
class EvalAt(PathFunctional):
    t: float = 1.0

    @property
    def name(self):
        return f"eval@{self.t:g}"

    def __call__(self, path):
        return path(self.t)

    def batch(self, trajectory, s, a, b):
        return trajectory(s * self.t) / a - self.t * b


def _running_extreme(trajectory, s, fn):
    node = fn(trajectory.values, trajectory.left)
    run = fn.accumulate(node)
    i = np.searchsorted(trajectory.grid, s, side="right") - 1
    return fn(run[i], fn(trajectory(s), trajectory.left_limit(s)))


@dataclass(frozen=True)
class Sup(PathFunctional):
    name = "sup"

    def __call__(self, path):
        return float(max(path.values.max(), path.left.max()))

    def batch(self, trajectory, s, a, b):
        if np.any(b != 0):
            return None
        return _running_extreme(trajectory, s, np.maximum) / a


@dataclass(frozen=True)
class Inf(PathFunctional):
    name = "inf"

    def __call__(self, path):
        return float(min(path.values.min(), path.left.min()))

    def batch(self, trajectory, s, a, b):
        if np.any(b != 0):
            return None
        return _running_extreme(trajectory, s, np.minimum) / a


@dataclass(frozen=True)
class Constant(PathFunctional):
    c: float = 0.0
    name = "constant"

    def __call__(self, path):
        return self.c

    def batch(self, trajectory, s, a, b):
        return np.full(np.shape(s), self.c)


# -- log-average measures -----------------------------------------------------

@dataclass(frozen=True, eq=False)
class LogAvgMeasure:
    values: np.ndarray
    weights: np.ndarray
    n: int
    functional_id: str
    k: np.ndarray = field(default=None)

    @property
    def atoms(self):
        return np.column_stack((self.values, self.weights))

    @property
    def total_mass(self):
        return float(self.weights.sum())

    @staticmethod
    def expected_mass(n):
        return float(np.sum(1.0 / np.arange(1, n + 1)) / math.log(n))

    def sample(self):
        return WeightedSample(self.values, self.weights)

    def to_csv(self, fname):
        with open(fname, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(("functional_value", "weight"))
            for v, wt in zip(self.values, self.weights):
                w.writerow((repr(float(v)), repr(float(wt))))


def log_weights(n):
    if n < 2:
        raise ValueError("log averages need n >= 2 (ln 1 = 0)")
    k = np.arange(1, n + 1, dtype=float)
    return 1.0 / (k * math.log(n))


def build_log_average(trajectory: CadlagPath, plan: NormingPlan, functional: PathFunctional, n: int,
                      grid_points=None):
    """Atoms ``(f(X_k), 1/(k ln n))``, ``k = 1..n``, all cut from one trajectory."""
    n = int(n)
    w = log_weights(n)
    idx = np.searchsorted(plan.n, np.arange(1, n + 1))
    if idx[-1] >= plan.n.size or np.any(plan.n[np.minimum(idx, plan.n.size - 1)] != np.arange(1, n + 1)):
        raise ValueError("the plan must contain every index 1..n")
    s, a, b = plan.s[idx], plan.a[idx], plan.b[idx]
    if trajectory.horizon < s.max() * (1 - 1e-12):
        raise HorizonError(f"trajectory horizon {trajectory.horizon:g} is shorter than s_n = {s.max():g}")
    vals = functional.batch(trajectory, s, a, b)
    if vals is None:
        kw = {} if grid_points is None else {"grid_points": grid_points}
        vals = np.array([functional(rescale_path(trajectory, sk, ak, bk, **kw)) for sk, ak, bk in zip(s, a, b)])
    return LogAvgMeasure(np.asarray(vals, dtype=float), w, n, functional.name, np.arange(1, n + 1))


def asclt_distance(measure: LogAvgMeasure, target_cdf, mode="KS"):
    """Distance between the normalised log-average measure and the target law."""
    samp = measure.sample()
    if mode.upper() == "KS":
        return ks_distance(samp, target_cdf)
    if mode.upper() == "CVM":
        return cvm_distance(samp, target_cdf)
    raise ValueError(f"unknown mode {mode!r}")


def distance_trace(trajectory, plan, functional, target_cdf, n_values, mode="KS"):
    """Rows ``(n, distance)`` reusing one evaluation of the functional up to ``max(n_values)``."""
    n_top = int(max(n_values))
    full = build_log_average(trajectory, plan, functional, n_top)
    out = []
    for n in n_values:
        n = int(n)
        m = LogAvgMeasure(full.values[:n], log_weights(n), n, full.functional_id)
        out.append((n, asclt_distance(m, target_cdf, mode)))
    return out


# -- triangular-array constants -----------------------------------------------

@dataclass(frozen=True)
class Lemma1Constants:
    C1: float
    C2: float
    C3: float
    C: float
    n_grid: tuple = ()
    per_n: dict = field(default_factory=dict)

    def stabilized(self, factor=2.0):
        """True when each per-n estimate stays within ``factor`` of its median."""
        return all(self._stable(name, factor) for name in ("C1", "C2", "C3"))

    def _stable(self, name, factor):
        v = np.asarray(self.per_n[name], dtype=float)
        med = np.median(v)
        if np.all(v == 0):
            return True
        return bool(med > 0 and v.max() <= factor * med)

    def divergent(self, factor=2.0):
        return not self.stabilized(factor)


def estimate_lemma1_constants(array_sampler, C, n_grid, rows=100, rng=0):
    """Monte Carlo estimates of ``k_n P{|xi| >= C}``, ``k_n |E xi 1{|xi| < C}|`` and ``k_n Var(xi 1{|xi| < C})``.

    ``array_sampler(n, gen)`` returns one row ``xi_{n1}, ..., xi_{n k_n}``;
    ``rows`` independent rows are pooled per ``n``.  The constants are the
    maxima over ``n_grid``.
    """
    if not C > 0:
        raise ValueError("C must be positive")
    stream = rng if isinstance(rng, RngStream) else None
    gen = None if stream is not None else as_generator(rng)
    per = {"C1": [], "C2": [], "C3": []}
    for j, n in enumerate(n_grid):
        g = stream.child(j).generator() if stream is not None else gen
        draws = [np.asarray(array_sampler(int(n), g), dtype=float) for _ in range(rows)]
        k_n = draws[0].size
        xi = np.concatenate(draws)
        inside = np.abs(xi) < C
        trunc = np.where(inside, xi, 0.0)
        per["C1"].append(k_n * float(np.mean(~inside)))
        per["C2"].append(k_n * abs(float(np.mean(trunc))))
        per["C3"].append(k_n * float(np.var(trunc)))
    return Lemma1Constants(max(per["C1"]), max(per["C2"]), max(per["C3"]), float(C), tuple(int(v) for v in n_grid),
                           per)


# -- coupling -----------------------------------------------------------------

def coupled_path(x_k: CadlagPath, trajectory: CadlagPath, s_k, a_k, b_k, s_l):
    """``X_lk``: ``-b_k t`` on ``[0, s_l/s_k]`` and ``X_k(t) - V(s_l)/a_k`` after it."""
    tau = s_l / s_k
    g = np.union1d(x_k.grid, [tau])
    v_l = trajectory(s_l) / a_k
    after = g > tau
    vals = np.where(after, x_k(g) - v_l, -b_k * g)
    lefts = np.where(after, x_k.left_limit(g) - v_l, -b_k * g)
    keep = x_k.jump_times > tau
    return CadlagPath(g, vals, lefts, x_k.jump_times[keep], x_k.jump_sizes[keep])


def coupling_decay(V_sampler, plan: NormingPlan, pairs, replicates, stream: RngStream, grid_points=None):
    """Rows ``(l/k, mean rho1(X_k, X_lk))`` for each ``(l, k)`` pair.

    ``V_sampler(horizon, rng_stream)`` returns a trajectory on ``[0, horizon]``.
    Pairs sharing a ``k`` reuse the same trajectories.
    """
    pairs = [(int(l), int(k)) for l, k in pairs]
    if any(not l < k for l, k in pairs):
        raise ValueError("need l < k in every pair")
    kw = {} if grid_points is None else {"grid_points": grid_points}
    sums = {p: 0.0 for p in pairs}
    by_k = {}
    for l, k in pairs:
        by_k.setdefault(k, []).append(l)
    for k, ls in by_k.items():
        s_k, a_k, b_k = plan.at(k)
        for r in range(replicates):
            v = V_sampler(s_k, stream.child(k).child(r))
            x_k = rescale_path(v, s_k, a_k, b_k, **kw)
            for l in ls:
                s_l = plan.at(l)[0]
                sums[(l, k)] += metric_rho1(x_k, coupled_path(x_k, v, s_k, a_k, b_k, s_l))
    return [(l / k, sums[(l, k)] / replicates) for l, k in pairs]


def fit_loglog_slope(ratios, means):
    r = np.log(np.asarray(ratios, dtype=float))
    m = np.log(np.asarray(means, dtype=float))
    return float(np.polyfit(r, m, 1)[0])
