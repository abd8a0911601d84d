"""Cadlag path skeletons."""
from dataclasses import dataclass
import csv

import numpy as np

from . import kernels


@dataclass(frozen=True, eq=False)
class CadlagPath:
    """Right-continuous path on ``[0, horizon]``.

    ``values[i]`` is the value at ``grid[i]`` and ``left[i]`` the left limit
    there; between grid points the path is linear from ``values[i]`` to
    ``left[i+1]``.  Jumps sit on grid points: ``values[i] - left[i]`` is the
    sum of the jumps recorded at ``grid[i]``.
    """

    grid: np.ndarray
    values: np.ndarray
    left: np.ndarray
    jump_times: np.ndarray
    jump_sizes: np.ndarray

    def __post_init__(self):
        for name in ("grid", "values", "left", "jump_times", "jump_sizes"):
            object.__setattr__(self, name, np.ascontiguousarray(getattr(self, name), dtype=float))
        g = self.grid
        if g.ndim != 1 or g.size < 2 or g[0] != 0.0 or np.any(np.diff(g) <= 0):
            raise ValueError("grid must be strictly increasing from 0 with at least two points")
        if self.values.shape != g.shape or self.left.shape != g.shape:
            raise ValueError("values and left limits need one entry per grid point")
        if self.jump_times.shape != self.jump_sizes.shape:
            raise ValueError("jump times and sizes must have equal length")

    @property
    def horizon(self):
        return float(self.grid[-1])

    @property
    def jumps(self):
        return np.column_stack((self.jump_times, self.jump_sizes))

    def __call__(self, t):
        q = np.atleast_1d(np.asarray(t, dtype=float))
        out = kernels.eval_right(self.grid, self.values, self.left, q)
        return out if np.ndim(t) else float(out[0])

    def left_limit(self, t):
        q = np.atleast_1d(np.asarray(t, dtype=float))
        out = kernels.eval_left(self.grid, self.values, self.left, q)
        return out if np.ndim(t) else float(out[0])

    def check(self, atol=1e-9):
        """Verify the skeleton invariants; returns self."""
        if self.values[0] != 0.0 or self.left[0] != 0.0:
            raise ValueError("path must start at 0")
        jt = self.jump_times
        if jt.size:
            if np.any(np.diff(jt) < 0) or jt[0] <= 0 or jt[-1] > self.horizon:
                raise ValueError("jump times must be sorted within (0, horizon]")
            idx = np.searchsorted(self.grid, jt)
            if np.any(idx >= self.grid.size) or np.any(self.grid[np.minimum(idx, self.grid.size - 1)] != jt):
                raise ValueError("every jump time must be a grid point")
        gaps = self.values - self.left
        expect = np.zeros_like(gaps)
        if jt.size:
            np.add.at(expect, np.searchsorted(self.grid, jt), self.jump_sizes)
        if not np.allclose(gaps, expect, atol=atol, rtol=0):
            raise ValueError("value gaps at grid points must equal the recorded jumps")
        return self

    def sup_abs(self):
        return float(max(np.abs(self.values).max(), np.abs(self.left).max()))

    def to_csv(self, fname):
        with open(fname, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(("time", "value"))
            for t, l, v in zip(self.grid, self.left, self.values):
                if l != v:
                    w.writerow((repr(float(t)), repr(float(l))))
                w.writerow((repr(float(t)), repr(float(v))))

    def jumps_to_csv(self, fname):
        with open(fname, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(("time", "size"))
            for t, s in zip(self.jump_times, self.jump_sizes):
                w.writerow((repr(float(t)), repr(float(s))))


def build_path(grid, continuous, jump_times, jump_sizes):
    """Assemble a path from continuous-part values on ``grid`` and jumps on grid points.

    ``continuous`` is the drift/diffusion part at the grid points (starting
    at 0); ``jump_times`` must be grid points, sorted.
    """
    grid = np.asarray(grid, dtype=float)
    jt = np.asarray(jump_times, dtype=float)
    js = np.asarray(jump_sizes, dtype=float)
    jump_at = np.zeros(grid.size)
    if jt.size:
        np.add.at(jump_at, np.searchsorted(grid, jt), js)
    cum = np.cumsum(jump_at)
    values = np.asarray(continuous, dtype=float) + cum
    left = values - jump_at
    return CadlagPath(grid, values, left, jt, js)


def step_path(jump_times, jump_sizes, horizon, grid=None):
    """Piecewise-constant path with the given jumps (times need not be sorted)."""
    jt = np.asarray(jump_times, dtype=float)
    js = np.asarray(jump_sizes, dtype=float)
    order = np.argsort(jt, kind="stable")
    jt, js = jt[order], js[order]
    base = np.array([0.0, float(horizon)]) if grid is None else np.asarray(grid, dtype=float)
    g = np.union1d(base, jt)
    return build_path(g, np.zeros(g.size), jt, js)


def linear_path(slope, horizon=1.0, n=2):
    g = np.linspace(0.0, horizon, n)
    return CadlagPath(g, slope * g, slope * g, np.zeros(0), np.zeros(0))


def constant_path(c, horizon=1.0):
    """Path equal to ``c`` on ``(0, horizon]`` with ``X(0) = c`` as well (not a Levy path)."""
    g = np.array([0.0, horizon])
    return CadlagPath(g, np.full(2, float(c)), np.full(2, float(c)), np.zeros(0), np.zeros(0))
