"""Goodness-of-fit distances for weighted samples."""
from dataclasses import dataclass

import numpy as np
from scipy import special, stats

from .levy_core import LevyTriplet, eval_char_fn
from .stable import StableParams


@dataclass(frozen=True, eq=False)
class WeightedSample:
    points: np.ndarray
    weights: np.ndarray | None = None

    def __post_init__(self):
        p = np.asarray(self.points, dtype=float).ravel()
        w = np.ones_like(p) if self.weights is None else np.asarray(self.weights, dtype=float).ravel()
        if p.shape != w.shape:
            raise ValueError("points and weights must have equal length")
        if not np.all(np.isfinite(p)):
            raise ValueError("points must be finite")
        if np.any(w <= 0) or not np.all(np.isfinite(w)):
            raise ValueError("weights must be positive and finite")
        object.__setattr__(self, "points", p)
        object.__setattr__(self, "weights", w)

    def __len__(self):
        return self.points.size

    @property
    def total(self):
        return float(self.weights.sum())

    def merged(self):
        """Sorted distinct points with their summed weights."""
        u, inv = np.unique(self.points, return_inverse=True)
        return u, np.bincount(inv, weights=self.weights, minlength=u.size)

    def effective_size(self):
        """``(sum w)^2 / sum w^2``."""
        return float(self.weights.sum() ** 2 / np.sum(self.weights ** 2))


def _as_sample(sample):
    return sample if isinstance(sample, WeightedSample) else WeightedSample(sample)


def _ecdf(sample):
    s = _as_sample(sample)
    if len(s) == 0:
        raise ValueError("empty sample")
    x, w = s.merged()
    cw = np.cumsum(w)
    cw /= cw[-1]
    return x, cw


def ks_distance(sample, cdf):
    """``sup |F_emp - F|`` with the weighted empirical CDF normalised to mass 1."""
    x, after = _ecdf(sample)
    before = np.concatenate(([0.0], after[:-1]))
    f = np.asarray(cdf(x), dtype=float)
    return float(max(np.max(after - f), np.max(f - before), 0.0))


def cvm_distance(sample, cdf):
    """``int (F_emp - F)^2 dF`` computed exactly between the sorted points.

    With ``u_i = F(x_i)`` and ``W_i`` the empirical CDF on ``[x_i, x_{i+1})``
    the integral is ``sum_i ((u_{i+1} - W_i)^3 - (u_i - W_i)^3) / 3``.
    """
    x, after = _ecdf(sample)
    u = np.concatenate(([0.0], np.asarray(cdf(x), dtype=float), [1.0]))
    w = np.concatenate(([0.0], after))
    return float(np.sum(((u[1:] - w) ** 3 - (u[:-1] - w) ** 3) / 3.0))


def stable_cdf(params: StableParams, t_scale, x):
    """CDF of the stable process at time ``t_scale``."""
    if not t_scale > 0:
        raise ValueError("t_scale must be positive")
    return params.cdf(x, t_scale)


def empirical_cf(sample, x_grid):
    s = _as_sample(sample)
    x = np.asarray(x_grid, dtype=float)
    w = s.weights / s.total
    return np.exp(1j * np.multiply.outer(x, s.points)) @ w


def cf_distance(sample, triplet: LevyTriplet, t, x_grid):
    """``max_x |weighted empirical CF - CF of V(t)|`` over ``x_grid`` (0 for an empty grid)."""
    x = np.asarray(x_grid, dtype=float).ravel()
    if x.size == 0:
        return 0.0
    emp = empirical_cf(sample, x)
    ref = eval_char_fn(triplet, t, x)
    return float(np.max(np.abs(emp - ref)))


def ks_two_sample(a, b):
    return float(stats.ks_2samp(np.asarray(a, dtype=float), np.asarray(b, dtype=float), method="asymp").statistic)


def ks_critical(n, level=0.01):
    """Asymptotic one-sample KS critical value ``K^-1(level) / sqrt(n)``."""
    return float(special.kolmogi(level) / np.sqrt(n))


def ks_critical_two_sample(n, m, level=0.01):
    return float(special.kolmogi(level) * np.sqrt((n + m) / (n * m)))


def ks_critical_weighted(sample, level=0.01):
    """Kolmogorov critical value at the effective sample size.

    Approximate: with weights the null law of the statistic is not the
    Kolmogorov law, and for harmonic weights (``1/k``) no single weight is
    negligible, so this only indicates the scale of sampling noise.
    """
    return ks_critical(_as_sample(sample).effective_size(), level)
