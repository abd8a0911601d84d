"""Samplers for Levy paths and marginals.

General triplets are simulated by jump truncation: jumps larger than a
cutoff come from the (finite) restricted measure as a compound Poisson
process, smaller ones are replaced by a Brownian motion with the same
variance, and the compensator is absorbed into the drift.
"""
import math
import warnings

import numpy as np

from . import kernels
from .errors import InvalidTripletError
from .levy_core import LevyTriplet, check_integrability
from .paths import CadlagPath, build_path
from .rng import as_generator
from .stable import StableParams
from .tails import SIDES, CompoundPoissonTails, NoJumps

SMALL_JUMP_RATIO = 5.0


def sample_compound_poisson(intensity, jump_law, horizon, rng):
    """Path of ``sum_{i <= N(t)} xi_i`` on ``[0, horizon]``."""
    if not intensity > 0 or not horizon > 0:
        raise ValueError("intensity and horizon must be positive")
    gen = as_generator(rng)
    n = gen.poisson(intensity * horizon)
    times = np.sort(gen.uniform(0.0, horizon, n))
    # a uniform draw of exactly 0 cannot carry a jump at V(0)
    times[times == 0.0] = np.nextafter(0.0, 1.0)
    sizes = np.asarray(jump_law.sample(gen, n), dtype=float)
    grid = np.union1d([0.0, horizon], times)
    return build_path(grid, np.zeros(grid.size), times, sizes)


def sample_compound_poisson_marginals(intensity, jump_law, times, size, rng, max_jumps=4_000_000):
    """Joint values ``V(t_1), ..., V(t_m)`` of a compound Poisson process, ``size`` rows.

    Uses Poisson counts on the successive increments and segmented sums of
    the jump sizes, without building paths.  Rows are generated in blocks
    holding about ``max_jumps`` jumps.
    """
    gen = as_generator(rng)
    t = np.asarray(times, dtype=float)
    dt = np.diff(np.concatenate(([0.0], t)))
    if np.any(dt < 0):
        raise ValueError("times must be non-decreasing")
    counts = gen.poisson(intensity * dt, size=(size, dt.size))
    out = np.empty((size, dt.size))
    per_row = max(1.0, intensity * float(t[-1]) if t.size else 1.0)
    block = max(1, int(max_jumps / per_row))
    for lo in range(0, size, block):
        c = counts[lo:lo + block]
        jumps = np.asarray(jump_law.sample(gen, int(c.sum())), dtype=float)
        incr = kernels.segment_sums(jumps, c.ravel().astype(np.int64)).reshape(c.shape)
        out[lo:lo + block] = np.cumsum(incr, axis=1)
    return out


def sample_stable_increment(params: StableParams, dt, rng, size=None):
    """Increment over ``dt`` of the stable process with tails ``c1|y|^-alpha``, ``c2 y^-alpha``.

    The tail weights map to an S1 law with ``beta = (c2 - c1)/(c1 + c2)``,
    scale ``(dt (c1+c2) Gamma(1-alpha) cos(pi alpha/2))^(1/alpha)``
    (``dt (c1+c2) pi/2`` for ``alpha = 1``) and the location implied by the
    ``y/(1+y^2)`` compensator; see :class:`levylimit.stable.StableParams`.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    gen = as_generator(rng)
    out = params.sample(gen, 1 if size is None else size, t=dt)
    return float(out[0]) if size is None else out


class TruncationPlan:
    """Pieces of a triplet split at ``jump_cutoff``."""

    def __init__(self, triplet: LevyTriplet, jump_cutoff, warn=True):
        if not jump_cutoff > 0:
            raise ValueError("jump_cutoff must be positive")
        self.triplet = triplet
        self.cutoff = float(jump_cutoff)
        tails = triplet.tails
        if isinstance(tails, NoJumps):
            self.rates = {1: 0.0, -1: 0.0}
            self.small_var = 0.0
            self.drift = triplet.gamma
        elif isinstance(tails, CompoundPoissonTails):
            # finite measure: every jump is simulated exactly
            self.cutoff = 0.0
            self.small_var = 0.0
            self.rates = {s: float(tails.tail(s, 0.0)) for s in SIDES}
            self.drift = triplet.gamma - tails.compensator_drift()
        else:
            c = self.cutoff
            self.small_var = check_integrability(triplet, c)
            self.rates = {s: float(tails.tail(s, c)) for s in SIDES}
            comp_big = sum(s * tails.integrate(s, lambda v: v / (1.0 + v * v), c, math.inf) for s in SIDES)
            comp_small = sum(s * tails.integrate(s, lambda v: v ** 3 / (1.0 + v * v), 0.0, c) for s in SIDES)
            self.drift = triplet.gamma - comp_big + comp_small
            if not all(np.isfinite(r) for r in self.rates.values()):
                raise InvalidTripletError("jump measure has infinite mass beyond the cutoff")
        if warn and self.small_var > 0 and math.sqrt(self.small_var) / self.cutoff < SMALL_JUMP_RATIO:
            warnings.warn(
                f"small-jump Gaussian approximation is poor: sigma_small/cutoff = "
                f"{math.sqrt(self.small_var) / self.cutoff:.3g} < {SMALL_JUMP_RATIO}",
                stacklevel=3,
            )
        self.diffusion_var = triplet.sigma ** 2 + self.small_var

    def sample_big_jumps(self, gen, horizon):
        tails = self.triplet.tails
        times, sizes = [], []
        for s in SIDES:
            lam = self.rates[s]
            if lam <= 0:
                continue
            n = gen.poisson(lam * horizon)
            times.append(gen.uniform(0.0, horizon, n))
            sizes.append(s * tails.sample_beyond(gen, s, self.cutoff, n))
        if not times:
            return np.zeros(0), np.zeros(0)
        t = np.concatenate(times)
        z = np.concatenate(sizes)
        order = np.argsort(t, kind="stable")
        t = t[order]
        t[t == 0.0] = np.nextafter(0.0, 1.0)
        return t, z[order]


def sample_levy_path(triplet: LevyTriplet, horizon, grid_step, jump_cutoff, rng, warn=True):
    """Approximate path of the Levy process on ``[0, horizon]``.

    The continuous part (drift, Gaussian component and small-jump Brownian
    substitute) is sampled exactly on the union of a uniform grid of step
    ``grid_step`` and the big-jump times.
    """
    if not horizon > 0 or not grid_step > 0:
        raise ValueError("horizon and grid_step must be positive")
    gen = as_generator(rng)
    plan = TruncationPlan(triplet, jump_cutoff, warn=warn)
    times, sizes = plan.sample_big_jumps(gen, horizon)
    m = max(1, int(math.ceil(horizon / grid_step - 1e-9)))
    grid = np.union1d(np.linspace(0.0, horizon, m + 1), times)
    dt = np.diff(grid)
    cont = plan.drift * grid
    if plan.diffusion_var > 0:
        cont = cont + np.concatenate(([0.0], np.cumsum(gen.normal(0.0, 1.0, dt.size) * np.sqrt(plan.diffusion_var * dt))))
    return build_path(grid, cont, times, sizes)


def sample_levy_marginal(triplet: LevyTriplet, t, jump_cutoff, rng, size, warn=True):
    """``size`` draws of V(t) under the same truncation scheme as :func:`sample_levy_path`."""
    gen = as_generator(rng)
    tails = triplet.tails
    if isinstance(tails, CompoundPoissonTails) and triplet.sigma == 0:
        v = sample_compound_poisson_marginals(tails.intensity, tails.law, [t], size, gen)[:, 0]
        return v + t * (triplet.gamma - tails.compensator_drift())
    plan = TruncationPlan(triplet, jump_cutoff, warn=warn)
    out = plan.drift * t + gen.normal(0.0, math.sqrt(plan.diffusion_var * t), size)
    for s in SIDES:
        lam = plan.rates[s]
        if lam <= 0:
            continue
        counts = gen.poisson(lam * t, size)
        mags = tails.sample_beyond(gen, s, plan.cutoff, int(counts.sum()))
        out += s * kernels.segment_sums(mags, counts.astype(np.int64))
    return out


def sample_paths(sampler, n_paths, stream):
    """Paths ``sampler(stream.child(i))`` for ``i < n_paths``."""
    return [sampler(stream.child(i)) for i in range(n_paths)]


__all__ = [
    "CadlagPath",
    "TruncationPlan",
    "sample_compound_poisson",
    "sample_compound_poisson_marginals",
    "sample_levy_marginal",
    "sample_levy_path",
    "sample_paths",
    "sample_stable_increment",
]
