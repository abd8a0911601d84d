"""Levy tail functions L (negative axis) and R (positive axis).

``L(y) = nu((-inf, y))`` for ``y < 0`` and ``R(y) = -nu((y, inf))`` for
``y > 0``, so ``L >= 0`` increases from 0 and ``R <= 0`` increases to 0.

Internally both axes are handled through magnitudes ``v > 0`` and a side
``+1`` (positive jumps) or ``-1`` (negative jumps).  Integrals against the
measure are atoms (summed exactly) plus an absolutely continuous part
(adaptive quadrature split at 1, with ``u = 1/v`` on the outer piece).
"""
from dataclasses import dataclass
import math
import warnings

import numpy as np
from scipy import integrate

from .errors import InvalidTripletError, QuadratureError
from .laws import JumpLaw

SIDES = (1, -1)
_EMPTY = np.zeros(0)


@dataclass(frozen=True)
class QuadConfig:
    epsabs: float = 1e-10
    epsrel: float = 1e-10
    limit: int = 200
    # upper end of the grid used to invert generic tails when sampling
    cutoff: float = 1e8
    # an integral is rejected when its error estimate exceeds this
    fail_abs: float = 1e-6


DEFAULT_QUAD = QuadConfig()


def _quad(f, a, b, cfg, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(f, a, b, epsabs=cfg.epsabs, epsrel=cfg.epsrel, limit=cfg.limit, **kw)
    if not np.isfinite(val) or err > max(cfg.fail_abs, cfg.fail_abs * abs(val)):
        raise QuadratureError(f"quadrature on [{a:.3g}, {b:.3g}] did not converge", err)
    return val


def sin_minus_id(z):
    """``sin(z) - z`` without cancellation near 0."""
    z = np.asarray(z, dtype=float)
    z2 = z * z
    series = -z * z2 / 6.0 * (1.0 - z2 / 20.0 * (1.0 - z2 / 42.0 * (1.0 - z2 / 72.0)))
    return np.where(np.abs(z) < 0.1, series, np.sin(z) - z)


class TailMeasure:
    """A Levy measure given through its tail functions.

    Subclasses implement ``tail(side, v)`` (mass of jumps beyond ``v`` on a
    side), ``density(side, v)`` and ``atoms(side)``.
    """

    kind = "abstract"
    symmetric = False

    # -- primitive interface -------------------------------------------------
    def tail(self, side, v):
        raise NotImplementedError

    def density(self, side, v):
        return np.zeros_like(np.asarray(v, dtype=float))

    def atoms(self, side):
        return _EMPTY, _EMPTY

    def breakpoints(self, side):
        """Magnitudes where the density is not smooth."""
        return ()

    @property
    def has_density(self):
        return True

    # -- tail functions: L >= 0 on the negative axis, R <= 0 on the positive
    def L(self, y):
        y = np.asarray(y, dtype=float)
        if np.any(y >= 0):
            raise ValueError("L is defined on y < 0")
        return self.tail(-1, -y)

    def R(self, y):
        y = np.asarray(y, dtype=float)
        if np.any(y <= 0):
            raise ValueError("R is defined on y > 0")
        return -self.tail(1, y)

    def dL(self, y):
        return self.density(-1, -np.asarray(y, dtype=float))

    def dR(self, y):
        return self.density(1, np.asarray(y, dtype=float))

    def total_tail(self, v):
        """L(-v) + |R(v)|."""
        return self.tail(-1, v) + self.tail(1, v)

    # -- integration ---------------------------------------------------------
    def integrate(self, side, f, lo=0.0, hi=math.inf, cfg=DEFAULT_QUAD, points=()):
        """``int f(v) nu_side(dv)`` over magnitudes in ``(lo, hi]``.

        ``f`` takes a float magnitude; ``points`` are extra magnitudes where
        ``f`` changes scale.  Raises :class:`QuadratureError` when the adaptive
        rule cannot reach the configured accuracy (for instance because the
        integral diverges).
        """
        pos, mass = self.atoms(side)
        total = 0.0
        if pos.size:
            keep = (pos > lo) & (pos <= hi)
            if keep.any():
                total += float(sum(m * f(p) for p, m in zip(pos[keep], mass[keep])))
        if not self.has_density:
            return total
        return total + self._integrate_density(side, f, lo, hi, cfg, points)

    def check_small_jumps(self, side):
        """Raise :class:`QuadratureError` when ``int_0^1 v^2 nu_side(dv)`` visibly diverges.

        Adaptive quadrature can extrapolate a divergent integral to a finite
        (even negative) value, so the per-decade mass ``v^3 density(v)`` is
        required to shrink towards 0.
        """
        if not self.has_density:
            return
        g = [v ** 3 * float(self.density(side, v)) for v in (1e-8, 1e-12)]
        if g[1] > 0 and g[1] >= g[0]:
            raise QuadratureError("small-jump second moment diverges at 0", math.inf)

    def _integrate_density(self, side, f, lo, hi, cfg, points=()):
        if lo == 0.0:
            self.check_small_jumps(side)
        dens = lambda v: self.density(side, v)  # noqa: E731
        total = 0.0
        cuts = sorted({lo, hi, *[b for b in (1.0, *self.breakpoints(side), *points) if lo < b < hi]})
        for a, b in zip(cuts[:-1], cuts[1:]):
            if b <= 1.0:
                total += _quad(lambda v: f(v) * float(dens(v)), a, b, cfg)
            else:
                # u = 1/v on the outer pieces, down to u = 0 for an infinite upper end
                total += _quad(lambda u: f(1.0 / u) * float(dens(1.0 / u)) / (u * u) if u > 0 else 0.0,
                               1.0 / b, 1.0 / a, cfg)
        return total

    def levy_exponent(self, x, cfg=DEFAULT_QUAD):
        """``int (e^{ixy} - 1 - ixy/(1+y^2)) nu(dy)`` by quadrature."""
        return levy_exponent_quad(self, x, cfg)

    def truncated_second_moment(self, eps, cfg=DEFAULT_QUAD):
        """``int_{|y| <= eps} y^2 nu(dy)``."""
        return sum(self.integrate(s, lambda v: v * v, 0.0, eps, cfg) for s in SIDES)

    def sample_beyond(self, gen, side, cutoff, size):
        """Magnitudes of jumps on ``side`` drawn from nu restricted to ``(cutoff, inf)``."""
        return _sample_by_inversion(self, gen, side, cutoff, size)

    def check_monotone(self, v_grid):
        """Raise unless both tails are non-increasing and non-negative in the magnitude."""
        v = np.sort(np.asarray(v_grid, dtype=float))
        for side in SIDES:
            t = np.asarray(self.tail(side, v), dtype=float)
            if np.any(t < 0) or np.any(np.diff(t) > 1e-12 * (1.0 + np.abs(t[:-1]))):
                name = "R" if side == 1 else "L"
                raise InvalidTripletError(f"tail function {name} is not monotone with the right sign")


def levy_exponent_quad(measure, x, cfg=DEFAULT_QUAD):
    x = float(x)
    if x == 0.0:
        return 0.0 + 0.0j
    total = 0.0 + 0.0j
    for side in SIDES:
        xs = side * x  # e^{i x y} with y = side * v
        pos, mass = measure.atoms(side)
        if pos.size:
            total += np.sum(mass * (np.expm1(1j * xs * pos) - 1j * xs * pos / (1.0 + pos * pos)))
        if measure.has_density:
            total += _density_exponent(measure, side, xs, cfg)
    return complex(total)


def _density_exponent(measure, side, x, cfg):
    measure.check_small_jumps(side)
    dens = lambda v: float(measure.density(side, v))  # noqa: E731
    ax = abs(x)
    sgn = 1.0 if x > 0 else -1.0
    brk = sorted(b for b in measure.breakpoints(side) if b > 0)
    # inner piece (0, 1]: stable forms of the kernel near 0
    inner_pts = [b for b in brk if b < 1.0]
    if ax > 2 * np.pi:
        n_osc = min(int(ax / np.pi), 60)
        inner_pts += list(np.linspace(0.0, 1.0, n_osc + 1)[1:-1])
    inner_pts = sorted(set(inner_pts)) or None
    re_in = _quad(lambda v: -2.0 * math.sin(0.5 * x * v) ** 2 * dens(v), 0.0, 1.0, cfg, points=inner_pts)
    im_in = _quad(lambda v: (float(sin_minus_id(x * v)) + x * v ** 3 / (1.0 + v * v)) * dens(v),
                  0.0, 1.0, cfg, points=inner_pts)
    # outer piece (1, inf): oscillatory parts with Fourier weights
    outer = [1.0] + [b for b in brk if b > 1.0]
    cos_part = sin_part = 0.0
    for a, b in zip(outer[:-1], outer[1:]):
        cos_part += _quad(dens, a, b, cfg, weight="cos", wvar=ax)
        sin_part += _quad(dens, a, b, cfg, weight="sin", wvar=ax)
    cos_part += _quad_fourier(dens, outer[-1], "cos", ax, cfg)
    sin_part += _quad_fourier(dens, outer[-1], "sin", ax, cfg)
    mass_out = measure.integrate(side, lambda v: 1.0, 1.0, math.inf, cfg) - _atom_sum(
        measure, side, lambda v: 1.0, 1.0)
    comp_out = measure.integrate(side, lambda v: v / (1.0 + v * v), 1.0, math.inf, cfg) - _atom_sum(
        measure, side, lambda v: v / (1.0 + v * v), 1.0)
    return (re_in + cos_part - mass_out) + 1j * (im_in + sgn * sin_part - x * comp_out)


def _atom_sum(measure, side, f, lo):
    pos, mass = measure.atoms(side)
    keep = pos > lo
    return float(sum(m * f(p) for p, m in zip(pos[keep], mass[keep])))


def _quad_fourier(f, a, weight, omega, cfg):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(f, a, np.inf, weight=weight, wvar=omega, limlst=200, limit=cfg.limit)
    if not np.isfinite(val) or err > max(cfg.fail_abs, cfg.fail_abs * abs(val)):
        raise QuadratureError("Fourier integral over the outer tail did not converge", err)
    return val


def _sample_by_inversion(measure, gen, side, cutoff, size):
    lam = float(measure.tail(side, cutoff))
    if size == 0 or lam <= 0:
        return np.zeros(0)
    top = DEFAULT_QUAD.cutoff
    grid = np.geomspace(cutoff, top, 4001)
    t = np.asarray(measure.tail(side, grid), dtype=float) / lam
    # t decreases from 1 to ~0; invert u -> v by interpolation in log v
    u = gen.random(size)
    t_rev, g_rev = t[::-1], np.log(grid[::-1])
    return np.exp(np.interp(u, t_rev, g_rev))


# -- concrete measures --------------------------------------------------------

class NoJumps(TailMeasure):
    kind = "none"
    symmetric = True

    def tail(self, side, v):
        return np.zeros_like(np.asarray(v, dtype=float))

    @property
    def has_density(self):
        return False

    def levy_exponent(self, x, cfg=DEFAULT_QUAD):
        return 0.0 + 0.0j

    def to_dict(self):
        return {}


@dataclass(frozen=True)
class StableTails(TailMeasure):
    """L(y) = c1 |y|^-alpha, R(y) = -c2 y^-alpha."""

    alpha: float
    c1: float
    c2: float
    kind = "parametric-stable"

    def __post_init__(self):
        if not (0.0 < self.alpha < 2.0):
            raise InvalidTripletError("stable tails need 0 < alpha < 2")
        if self.c1 < 0 or self.c2 < 0 or self.c1 + self.c2 <= 0:
            raise InvalidTripletError("need c1, c2 >= 0 with c1 + c2 > 0")

    @property
    def symmetric(self):
        return self.c1 == self.c2

    def _c(self, side):
        return self.c2 if side == 1 else self.c1

    def tail(self, side, v):
        v = np.asarray(v, dtype=float)
        return self._c(side) * v ** -self.alpha

    def density(self, side, v):
        v = np.asarray(v, dtype=float)
        return self.alpha * self._c(side) * v ** (-self.alpha - 1.0)

    def levy_exponent(self, x, cfg=DEFAULT_QUAD):
        from .stable import StableParams, stable_log_cf

        return complex(stable_log_cf(StableParams(self.alpha, self.c1, self.c2), 1.0, x))

    def sample_beyond(self, gen, side, cutoff, size):
        return cutoff * (1.0 - gen.random(size)) ** (-1.0 / self.alpha)

    def to_dict(self):
        return {"alpha": self.alpha, "c1": self.c1, "c2": self.c2}


@dataclass(frozen=True)
class CompoundPoissonTails(TailMeasure):
    """nu = intensity * (law of one jump)."""

    intensity: float
    law: JumpLaw
    kind = "compound-poisson"

    def __post_init__(self):
        if not self.intensity > 0:
            raise InvalidTripletError("intensity must be positive")
        s, _ = self.law.atoms()
        if np.any(s == 0):
            raise InvalidTripletError("jump law has an atom at 0")

    @property
    def symmetric(self):
        return self.law.symmetric

    @property
    def has_density(self):
        s, p = self.law.atoms()
        return not (p.size and np.isclose(p.sum(), 1.0))

    def tail(self, side, v):
        v = np.asarray(v, dtype=float)
        if side == 1:
            return self.intensity * self.law.sf(v)
        return self.intensity * self.law.cdf_left(-v)

    def density(self, side, v):
        return self.intensity * self.law.density(side * np.asarray(v, dtype=float))

    def atoms(self, side):
        s, p = self.law.atoms()
        keep = (s > 0) if side == 1 else (s < 0)
        return np.abs(s[keep]), self.intensity * p[keep]

    def breakpoints(self, side):
        y0 = getattr(self.law, "y0", None)
        pts = [] if y0 is None else [y0]
        shift = getattr(self.law, "shift", 0.0)
        if shift and side * shift < 0:
            pts.append(abs(shift))
        return tuple(pts)

    def compensator_drift(self, cfg=DEFAULT_QUAD):
        """``int y/(1+y^2) nu(dy)``: the drift that makes the triplet the raw compound sum."""
        return sum(s * self.integrate(s, lambda v: v / (1.0 + v * v), cfg=cfg) for s in SIDES)

    def levy_exponent(self, x, cfg=DEFAULT_QUAD):
        x = float(x)
        if x == 0.0:
            return 0.0 + 0.0j
        c = self.law.cf(x)
        if c is None:
            return levy_exponent_quad(self, x, cfg)
        return complex(self.intensity * (complex(c) - 1.0) - 1j * x * self.compensator_drift(cfg))

    def sample_beyond(self, gen, side, cutoff, size):
        out = np.empty(0)
        while out.size < size:
            draw = self.law.sample(gen, max(64, 2 * (size - out.size)))
            draw = side * draw
            out = np.concatenate((out, draw[draw > cutoff]))
        return out[:size]

    def to_dict(self):
        return {"intensity": self.intensity, "jump_law": self.law.to_dict()}


class TabulatedTails(TailMeasure):
    """Tails given as ``(y, value)`` pairs, linear in between.

    Beyond the outermost node the tail is zero (its remaining mass sits as an
    atom on that node); inside the innermost node there is no mass.
    """

    kind = "tabulated"

    def __init__(self, neg, pos):
        self.neg = np.asarray(neg, dtype=float).reshape(-1, 2) if len(neg) else np.zeros((0, 2))
        self.pos = np.asarray(pos, dtype=float).reshape(-1, 2) if len(pos) else np.zeros((0, 2))
        if self.neg.size and (np.any(self.neg[:, 0] >= 0) or np.any(np.diff(self.neg[:, 0]) <= 0)):
            raise InvalidTripletError("negative tail nodes must be increasing and < 0")
        if self.pos.size and (np.any(self.pos[:, 0] <= 0) or np.any(np.diff(self.pos[:, 0]) <= 0)):
            raise InvalidTripletError("positive tail nodes must be increasing and > 0")
        if self.neg.size and (np.any(self.neg[:, 1] < 0) or np.any(np.diff(self.neg[:, 1]) < 0)):
            raise InvalidTripletError("L must be non-negative and non-decreasing")
        if self.pos.size and (np.any(self.pos[:, 1] > 0) or np.any(np.diff(self.pos[:, 1]) < 0)):
            raise InvalidTripletError("R must be non-positive and non-decreasing")
        # per side: magnitudes ascending, tail masses
        self._tab = {
            -1: (-self.neg[::-1, 0], self.neg[::-1, 1]),
            1: (self.pos[:, 0], -self.pos[:, 1]),
        }

    @property
    def symmetric(self):
        a, b = self._tab[-1], self._tab[1]
        return a[0].shape == b[0].shape and np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])

    def tail(self, side, v):
        v = np.asarray(v, dtype=float)
        mags, vals = self._tab[side]
        if mags.size == 0:
            return np.zeros_like(v)
        out = np.interp(v, mags, vals)
        return np.where(v >= mags[-1], 0.0, out)

    def density(self, side, v):
        v = np.asarray(v, dtype=float)
        mags, vals = self._tab[side]
        if mags.size < 2:
            return np.zeros_like(v)
        slopes = -np.diff(vals) / np.diff(mags)
        i = np.clip(np.searchsorted(mags, v, side="right") - 1, 0, mags.size - 2)
        inside = (v > mags[0]) & (v < mags[-1])
        return np.where(inside, slopes[i], 0.0)

    def atoms(self, side):
        mags, vals = self._tab[side]
        if mags.size == 0 or vals[-1] == 0:
            return _EMPTY, _EMPTY
        return mags[-1:], vals[-1:]

    def breakpoints(self, side):
        return tuple(self._tab[side][0])

    def to_dict(self):
        return {"neg": self.neg.tolist(), "pos": self.pos.tolist()}


class CallableTails(TailMeasure):
    """Tails given by Python callables ``L(y)`` (y < 0) and ``R(y)`` (y > 0).

    Densities default to central differences when not supplied.
    """

    kind = "analytic-callable"

    def __init__(self, L, R, dL=None, dR=None, symmetric=False, breakpoints=()):
        self._L, self._R, self._dL, self._dR = L, R, dL, dR
        self.symmetric = symmetric
        self._brk = tuple(breakpoints)

    def tail(self, side, v):
        v = np.asarray(v, dtype=float)
        if side == 1:
            return -np.asarray(self._R(v), dtype=float)
        return np.asarray(self._L(-v), dtype=float)

    def density(self, side, v):
        v = np.asarray(v, dtype=float)
        given = self._dR if side == 1 else self._dL
        if given is not None:
            return np.asarray(given(side * v), dtype=float)
        h = 1e-6 * np.maximum(v, 1e-300)
        return (self.tail(side, v - h) - self.tail(side, v + h)) / (2 * h)

    def breakpoints(self, side):
        return self._brk
