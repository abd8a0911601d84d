"""Distances between cadlag paths on [0, 1] and an oscillation diagnostic.

Paths are piecewise linear between their grid points with jumps on grid
points, so the difference of two paths is piecewise linear on the union of
their grids; its supremum is attained at a node, either at the right value
or at the left limit.  Uniform distances here are therefore exact.
"""
from dataclasses import dataclass

import numpy as np

from . import kernels
from .paths import CadlagPath


@dataclass(frozen=True)
class TimeWarp:
    """Strictly increasing piecewise-linear map of [0, 1] onto itself."""

    t: np.ndarray
    lam: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        lam = np.asarray(self.lam, dtype=float)
        if t[0] != 0.0 or t[-1] != 1.0 or lam[0] != 0.0 or lam[-1] != 1.0:
            raise ValueError("a time warp fixes 0 and 1")
        if np.any(np.diff(t) <= 0) or np.any(np.diff(lam) <= 0):
            raise ValueError("a time warp must be strictly increasing")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "lam", lam)

    @classmethod
    def identity(cls):
        return cls(np.array([0.0, 1.0]), np.array([0.0, 1.0]))

    def __call__(self, s):
        return np.interp(s, self.t, self.lam)

    def inverse(self, u):
        return np.interp(u, self.lam, self.t)

    def sup_distance(self):
        """``sup |lambda(t) - t|``, attained at a knot."""
        return float(np.max(np.abs(self.lam - self.t)))


def _union_nodes(x: CadlagPath, y: CadlagPath):
    return np.union1d(x.grid, y.grid)


def sup_distance(x: CadlagPath, y: CadlagPath):
    """Uncapped ``sup_t |x(t) - y(t)|`` over the union of both skeletons, left limits included."""
    g = _union_nodes(x, y)
    d_right = np.abs(x(g) - y(g))
    d_left = np.abs(x.left_limit(g) - y.left_limit(g))
    return float(max(d_right.max(), d_left.max()))


def metric_rho1(x: CadlagPath, y: CadlagPath):
    """``min(sup |x - y|, 1)``."""
    return min(sup_distance(x, y), 1.0)


def compose(x: CadlagPath, warp: TimeWarp):
    """The path ``t -> x(lambda(t))`` as an exact skeleton."""
    g = np.union1d(warp.inverse(x.grid), warp.t)
    g[0], g[-1] = 0.0, 1.0
    u = warp(g)
    # keep grid hits exact so jumps of x land on the composed grid
    hi = np.minimum(np.searchsorted(x.grid, u), x.grid.size - 1)
    lo = np.maximum(hi - 1, 0)
    hit = np.where(np.abs(x.grid[lo] - u) < np.abs(x.grid[hi] - u), lo, hi)
    near = np.isclose(x.grid[hit], u, rtol=0, atol=1e-13)
    u = np.where(near, x.grid[hit], u)
    vals = x(u)
    lefts = x.left_limit(u)
    lefts[0] = vals[0]
    jt = warp.inverse(x.jump_times)
    idx = np.searchsorted(g, jt)
    idx = np.minimum(idx, g.size - 1)
    jt = g[idx]
    return CadlagPath(g, vals, lefts, jt, x.jump_sizes)


def _significant_jumps(p: CadlagPath, top):
    gaps = p.values - p.left
    idx = np.flatnonzero(gaps != 0)
    idx = idx[(p.grid[idx] > 0) & (p.grid[idx] < 1)]
    if idx.size > top:
        keep = np.argsort(-np.abs(gaps[idx]), kind="stable")[:top]
        idx = np.sort(idx[keep])
    return p.grid[idx], gaps[idx]


def _match(tx, zx, ty, zy, delta):
    """Order-preserving greedy matching of y-jumps to x-jumps within ``delta`` in time."""
    pairs = []
    start = 0
    for j in range(ty.size):
        best, best_i = None, None
        for i in range(start, tx.size):
            if tx[i] < ty[j] - delta:
                continue
            if tx[i] > ty[j] + delta:
                break
            score = abs(zx[i] - zy[j])
            if best is None or score < best:
                best, best_i = score, i
        if best_i is not None:
            pairs.append((ty[j], tx[best_i]))
            start = best_i + 1
    return pairs


def _warp_from_pairs(pairs):
    t = [0.0] + [p[0] for p in pairs] + [1.0]
    lam = [0.0] + [p[1] for p in pairs] + [1.0]
    t, lam = np.asarray(t), np.asarray(lam)
    if np.any(np.diff(t) <= 0) or np.any(np.diff(lam) <= 0):
        return None
    return TimeWarp(t, lam)


def _one_way(x, y, warp_resolution, top):
    best = sup_distance(x, y)
    tx, zx = _significant_jumps(x, top)
    ty, zy = _significant_jumps(y, top)
    if tx.size == 0 or ty.size == 0:
        return best
    gaps = np.abs(np.subtract.outer(ty, tx)).ravel()
    gaps = np.unique(gaps[gaps < best])
    if gaps.size == 0:
        return best
    if gaps.size > warp_resolution:
        gaps = gaps[np.unique(np.linspace(0, gaps.size - 1, warp_resolution).round().astype(int))]
    for delta in gaps:
        warp = _warp_from_pairs(_match(tx, zx, ty, zy, delta))
        if warp is None:
            continue
        lag = warp.sup_distance()
        if lag >= best:
            continue
        best = min(best, max(lag, sup_distance(compose(x, warp), y)))
    return best


def metric_j1(x: CadlagPath, y: CadlagPath, warp_resolution=32, max_jumps=64):
    """Upper bound on the Skorohod J1 distance.

    Minimises ``max(sup |lambda - id|, sup |x o lambda - y|)`` over the identity
    and piecewise-linear warps that align jumps of ``y`` with jumps of ``x``
    (greedy, order preserving, within a time tolerance taken from up to
    ``warp_resolution`` candidate values), in both directions.
    """
    if warp_resolution < 1:
        raise ValueError("warp_resolution must be at least 1")
    return min(_one_way(x, y, warp_resolution, max_jumps), _one_way(y, x, warp_resolution, max_jumps))


def metric_rho0(x: CadlagPath, y: CadlagPath, **kw):
    """``rho / (1 + rho)`` with ``rho`` from :func:`metric_j1`."""
    d = metric_j1(x, y, **kw)
    return d / (1.0 + d)


# -- oscillation --------------------------------------------------------------

def oscillation_tail(paths, h, eps, mode="pointwise", resolution=None):
    """Tightness diagnostic for a family of paths on [0, 1].

    ``mode="pointwise"`` returns ``max over |t' - t''| <= h of the fraction of
    paths with |X(t') - X(t'')| > eps`` on a uniform evaluation grid of step
    ``h / resolution`` (default ``resolution`` gives at least 256 steps).
    ``mode="uniform"`` returns the fraction of paths whose range over some
    window of width ``h`` exceeds ``eps``, on exact skeletons.
    """
    if not (0.0 < h < 1.0) or not eps > 0:
        raise ValueError("need 0 < h < 1 and eps > 0")
    paths = list(paths)
    if not paths:
        raise ValueError("no paths")
    if mode == "pointwise":
        per_h = resolution or max(1, int(np.ceil(256 * h)))
        m = max(int(np.ceil(per_h / h)), 1)
        t = np.linspace(0.0, 1.0, m + 1)
        vals = np.vstack([p(t) for p in paths])
        return float(kernels.lag_exceedance(vals, float(eps), per_h))
    if mode == "uniform":
        hits = 0
        for p in paths:
            times = np.repeat(p.grid, 2)
            vals = np.column_stack((p.left, p.values)).ravel()
            if kernels.window_range(times, vals, float(h)) > eps:
                hits += 1
        return hits / len(paths)
    raise ValueError(f"unknown mode {mode!r}")
