"""Hot inner loops, each in a numba and a pure-numpy flavour.

The public names (``segment_sums``, ``eval_right`` ...) are bound at import
time to the numba versions when :data:`levylimit._accel.USE_NUMBA` is true.
Both flavours are importable as ``<name>_numpy`` / ``<name>_numba`` so tests
and the benchmark can compare them directly.
"""
import math

import numpy as np

from ._accel import USE_NUMBA, njit


# ---------------------------------------------------------------------------
# segmented sums: sum of ``counts[i]`` consecutive entries of ``values``

def segment_sums_numpy(values, counts):
    counts = np.asarray(counts, dtype=np.int64)
    out = np.zeros(counts.shape[0])
    nz = counts > 0
    if not nz.any():
        return out
    starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
    out[nz] = np.add.reduceat(np.asarray(values, dtype=float), starts[nz])
    return out


@njit(cache=True, nogil=True)
def segment_sums_numba(values, counts):
    out = np.zeros(counts.shape[0])
    pos = 0
    for i in range(counts.shape[0]):
        acc = 0.0
        for _ in range(counts[i]):
            acc += values[pos]
            pos += 1
        out[i] = acc
    return out


# ---------------------------------------------------------------------------
# evaluation of a cadlag skeleton: linear between grid points, jumps on grid
# points; ``left`` holds the left limits at grid points.

def eval_right_numpy(grid, values, left, query):
    m = grid.shape[0]
    i = np.searchsorted(grid, query, side="right") - 1
    i = np.clip(i, 0, m - 1)
    j = np.minimum(i + 1, m - 1)
    span = grid[j] - grid[i]
    with np.errstate(invalid="ignore", divide="ignore"):
        frac = np.where(span > 0, (query - grid[i]) / np.where(span > 0, span, 1.0), 0.0)
    out = values[i] + frac * (left[j] - values[i])
    return np.where(query >= grid[m - 1], values[m - 1], out)


@njit(cache=True, nogil=True)
def eval_right_numba(grid, values, left, query):
    m = grid.shape[0]
    out = np.empty(query.shape[0])
    for k in range(query.shape[0]):
        q = query[k]
        if q >= grid[m - 1]:
            out[k] = values[m - 1]
            continue
        i = np.searchsorted(grid, q, side="right") - 1
        if i < 0:
            i = 0
        span = grid[i + 1] - grid[i]
        frac = (q - grid[i]) / span if span > 0 else 0.0
        out[k] = values[i] + frac * (left[i + 1] - values[i])
    return out


def eval_left_numpy(grid, values, left, query):
    m = grid.shape[0]
    i = np.searchsorted(grid, query, side="left")
    i = np.clip(i, 0, m - 1)
    hit = grid[i] == query
    lo = np.maximum(i - 1, 0)
    span = grid[i] - grid[lo]
    with np.errstate(invalid="ignore", divide="ignore"):
        frac = np.where(span > 0, (query - grid[lo]) / np.where(span > 0, span, 1.0), 0.0)
    inner = values[lo] + frac * (left[i] - values[lo])
    out = np.where(hit, left[i], inner)
    return np.where(query > grid[m - 1], values[m - 1], out)


@njit(cache=True, nogil=True)
def eval_left_numba(grid, values, left, query):
    m = grid.shape[0]
    out = np.empty(query.shape[0])
    for k in range(query.shape[0]):
        q = query[k]
        if q > grid[m - 1]:
            out[k] = values[m - 1]
            continue
        i = np.searchsorted(grid, q, side="left")
        if i >= m:
            i = m - 1
        if grid[i] == q:
            out[k] = left[i]
            continue
        lo = i - 1 if i > 0 else 0
        span = grid[i] - grid[lo]
        frac = (q - grid[lo]) / span if span > 0 else 0.0
        out[k] = values[lo] + frac * (left[i] - values[lo])
    return out


# ---------------------------------------------------------------------------
# Chambers-Mallows-Stuck transform to a standard S1(alpha, beta, 1, 0) variate;
# ``u`` uniform on (-pi/2, pi/2), ``w`` standard exponential.

def cms_standard_numpy(u, w, alpha, beta):
    u = np.asarray(u, dtype=float)
    w = np.asarray(w, dtype=float)
    if alpha == 1.0:
        half_pi = 0.5 * np.pi
        hb = half_pi + beta * u
        return (hb * np.tan(u) - beta * np.log(half_pi * w * np.cos(u) / hb)) / half_pi
    zeta = beta * np.tan(0.5 * np.pi * alpha)
    xi = np.arctan(zeta) / alpha
    scale = (1.0 + zeta * zeta) ** (0.5 / alpha)
    a = np.sin(alpha * (u + xi)) / np.cos(u) ** (1.0 / alpha)
    b = (np.cos(u - alpha * (u + xi)) / w) ** ((1.0 - alpha) / alpha)
    return scale * a * b


@njit(cache=True, nogil=True)
def cms_standard_numba(u, w, alpha, beta):
    n = u.shape[0]
    out = np.empty(n)
    if alpha == 1.0:
        half_pi = 0.5 * math.pi
        for k in range(n):
            hb = half_pi + beta * u[k]
            out[k] = (hb * math.tan(u[k]) - beta * math.log(half_pi * w[k] * math.cos(u[k]) / hb)) / half_pi
        return out
    zeta = beta * math.tan(0.5 * math.pi * alpha)
    xi = math.atan(zeta) / alpha
    scale = (1.0 + zeta * zeta) ** (0.5 / alpha)
    for k in range(n):
        a = math.sin(alpha * (u[k] + xi)) / math.cos(u[k]) ** (1.0 / alpha)
        b = (math.cos(u[k] - alpha * (u[k] + xi)) / w[k]) ** ((1.0 - alpha) / alpha)
        out[k] = scale * a * b
    return out


# ---------------------------------------------------------------------------
# largest exceedance frequency of |X(t_j + lag) - X(t_j)| > eps across rows of
# a (paths x grid) matrix, over lags 1..max_lag grid steps

def lag_exceedance_numpy(values, eps, max_lag):
    best = 0.0
    n_rows, n_cols = values.shape
    for k in range(1, min(max_lag, n_cols - 1) + 1):
        hits = np.abs(values[:, k:] - values[:, :-k]) > eps
        frac = hits.mean(axis=0).max()
        if frac > best:
            best = frac
    return float(best)


@njit(cache=True, nogil=True)
def lag_exceedance_numba(values, eps, max_lag):
    n_rows, n_cols = values.shape
    best = 0.0
    top = max_lag if max_lag < n_cols - 1 else n_cols - 1
    for k in range(1, top + 1):
        for j in range(n_cols - k):
            cnt = 0
            for r in range(n_rows):
                if abs(values[r, j + k] - values[r, j]) > eps:
                    cnt += 1
            frac = cnt / n_rows
            if frac > best:
                best = frac
    return best


# ---------------------------------------------------------------------------
# max over windows [s, s + h] of (max - min) for one path sampled at sorted
# ``times`` (left limits may appear as repeated times)

def window_range_numpy(times, values, h):
    best = 0.0
    n = times.shape[0]
    for k in range(1, n):
        ok = (times[k:] - times[:-k]) <= h
        if not ok.any():
            break
        d = np.abs(values[k:] - values[:-k])[ok]
        best = max(best, float(d.max()))
    return best


@njit(cache=True, nogil=True)
def window_range_numba(times, values, h):
    n = times.shape[0]
    best = 0.0
    for i in range(n):
        lo = values[i]
        hi = values[i]
        j = i + 1
        while j < n and times[j] - times[i] <= h:
            v = values[j]
            if v < lo:
                lo = v
            if v > hi:
                hi = v
            j += 1
        if hi - lo > best:
            best = hi - lo
    return best


if USE_NUMBA:
    segment_sums = segment_sums_numba
    eval_right = eval_right_numba
    eval_left = eval_left_numba
    cms_standard = cms_standard_numba
    lag_exceedance = lag_exceedance_numba
    window_range = window_range_numba
else:
    segment_sums = segment_sums_numpy
    eval_right = eval_right_numpy
    eval_left = eval_left_numpy
    cms_standard = cms_standard_numpy
    lag_exceedance = lag_exceedance_numpy
    window_range = window_range_numpy

KERNELS = ("segment_sums", "eval_right", "eval_left", "cms_standard", "lag_exceedance", "window_range")
