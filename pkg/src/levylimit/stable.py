"""Strictly-parametrised alpha-stable laws of Levy processes.

A stable Levy process with tails ``L(y) = c1 |y|^-alpha`` and
``R(y) = -c2 y^-alpha`` (and no Gaussian part or drift other than the one the
compensator ``y/(1+y^2)`` implies) has, at time ``t``, an S1 stable law
``S1(alpha, beta, sigma_t, mu_t)`` with ``beta = (c2 - c1)/(c1 + c2)``.
This module provides that map, the exponent, CMS sampling and the CDF.
"""
from dataclasses import dataclass
from functools import lru_cache
import math
import warnings

import numpy as np
from scipy import integrate, interpolate, special

from . import kernels
from .errors import InvalidTripletError, SamplingError

EULER_GAMMA = float(np.euler_gamma)
TABLE_Z_MAX = 1e4
TABLE_NODES = 257
TABLE_TOL = 1e-8


@dataclass(frozen=True)
class StableParams:
    alpha: float
    c1: float
    c2: float

    def __post_init__(self):
        if not (0.0 < self.alpha < 2.0):
            raise InvalidTripletError("alpha must lie in (0, 2)")
        if self.c1 < 0 or self.c2 < 0 or self.c1 + self.c2 <= 0:
            raise InvalidTripletError("need c1, c2 >= 0 with c1 + c2 > 0")

    @property
    def beta(self):
        return (self.c2 - self.c1) / (self.c1 + self.c2)

    def scale(self, t=1.0):
        """S1 scale of the process at time ``t``."""
        a, c = self.alpha, self.c1 + self.c2
        if a == 1.0:
            return t * c * 0.5 * math.pi
        return (t * c * special.gamma(1.0 - a) * math.cos(0.5 * math.pi * a)) ** (1.0 / a)

    def location(self, t=1.0):
        """S1 location of the process at time ``t``."""
        a = self.alpha
        if a == 1.0:
            return t * (self.c2 - self.c1) * (1.0 - EULER_GAMMA)
        return -t * (self.c2 - self.c1) * a * math.pi / (2.0 * math.cos(0.5 * math.pi * a))

    def standardize(self, y, t=1.0):
        """Map values of Y(t) to the standard S1(alpha, beta, 1, 0) scale."""
        s, m = self.scale(t), self.location(t)
        y = np.asarray(y, dtype=float)
        if self.alpha == 1.0:
            return (y - m - 2.0 / math.pi * self.beta * s * math.log(s)) / s
        return (y - m) / s

    def cdf(self, y, t=1.0):
        return standard_cdf(self.standardize(y, t), self.alpha, self.beta)

    def sample(self, gen, size, t=1.0):
        z = sample_standard(gen, size, self.alpha, self.beta)
        s, m = self.scale(t), self.location(t)
        if self.alpha == 1.0:
            return s * z + 2.0 / math.pi * self.beta * s * math.log(s) + m
        return s * z + m

    def to_dict(self):
        return {"alpha": self.alpha, "c1": self.c1, "c2": self.c2}


def stable_log_cf(params, t, x):
    """``log E exp(i x Y(t))`` in closed form."""
    x = np.asarray(x, dtype=float)
    a, c = params.alpha, params.c1 + params.c2
    ax = np.abs(x)
    if a == 1.0:
        with np.errstate(divide="ignore", invalid="ignore"):
            lg = np.where(ax > 0, np.log(np.where(ax > 0, ax, 1.0)), 0.0)
        out = -c * 0.5 * math.pi * ax + 1j * (params.c2 - params.c1) * x * (1.0 - EULER_GAMMA - lg)
        return t * out
    k = c * special.gamma(1.0 - a) * math.cos(0.5 * math.pi * a)
    skew = 1.0 - 1j * params.beta * np.sign(x) * math.tan(0.5 * math.pi * a)
    return t * (-k * ax ** a * skew + 1j * params.location(1.0) * x)


def standard_cf(u, alpha, beta):
    u = np.asarray(u, dtype=float)
    au = np.abs(u)
    if alpha == 1.0:
        with np.errstate(divide="ignore", invalid="ignore"):
            lg = np.where(au > 0, np.log(np.where(au > 0, au, 1.0)), 0.0)
        return np.exp(-au * (1.0 + 1j * beta * 2.0 / math.pi * np.sign(u) * lg))
    return np.exp(-au ** alpha * (1.0 - 1j * beta * np.sign(u) * math.tan(0.5 * math.pi * alpha)))


# -- sampling -----------------------------------------------------------------

def sample_standard(gen, size, alpha, beta, max_rounds=100):
    """S1(alpha, beta, 1, 0) variates by the Chambers-Mallows-Stuck transform."""
    out = np.empty(size)
    todo = np.arange(size)
    for _ in range(max_rounds):
        if todo.size == 0:
            return out
        u = gen.uniform(-0.5 * math.pi, 0.5 * math.pi, todo.size)
        w = gen.standard_exponential(todo.size)
        z = kernels.cms_standard(u, w, float(alpha), float(beta))
        ok = np.isfinite(z)
        out[todo[ok]] = z[ok]
        todo = todo[~ok]
    if todo.size:
        raise SamplingError("stable sampler kept producing non-finite values")
    return out


# -- distribution function ----------------------------------------------------

def _cdf_exact(z, alpha, beta):
    u_max = math.log(1e12) ** (1.0 / alpha)

    def im_part(u):
        if u == 0.0:
            return 0.0
        return (np.exp(-1j * u * z) * standard_cf(u, alpha, beta)).imag / u

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        if abs(z) * u_max < 60.0:
            val = integrate.quad(im_part, 0.0, u_max, limit=500, epsabs=1e-12, epsrel=1e-10)[0]
        else:
            u0 = min(u_max, 2.0 * math.pi / abs(z))
            val = integrate.quad(im_part, 0.0, u0, limit=500, epsabs=1e-13, epsrel=1e-10)[0]
            re = lambda u: standard_cf(u, alpha, beta).real / u  # noqa: E731
            im = lambda u: standard_cf(u, alpha, beta).imag / u  # noqa: E731
            val += integrate.quad(im, u0, np.inf, weight="cos", wvar=abs(z), limlst=200)[0]
            val -= math.copysign(1.0, z) * integrate.quad(re, u0, np.inf, weight="sin", wvar=abs(z), limlst=200)[0]
    return min(1.0, max(0.0, 0.5 - val / math.pi))


@lru_cache(maxsize=32)
def _cdf_table(alpha, beta, tol=TABLE_TOL, max_rounds=6):
    w = np.linspace(-math.asinh(TABLE_Z_MAX), math.asinh(TABLE_Z_MAX), TABLE_NODES)
    f = np.array([_cdf_exact(float(z), alpha, beta) for z in np.sinh(w)])
    # check the spline at midpoints, keep them as nodes, and refine where it missed
    cand = 0.5 * (w[1:] + w[:-1])
    for _ in range(max_rounds):
        spline = interpolate.CubicSpline(w, f)
        fc = np.array([_cdf_exact(float(z), alpha, beta) for z in np.sinh(cand)])
        bad = cand[np.abs(spline(cand) - fc) > tol]
        w, order = np.unique(np.concatenate((w, cand)), return_index=True)
        f = np.concatenate((f, fc))[order]
        if bad.size == 0:
            break
        i = np.searchsorted(w, bad)
        lo = np.unique(np.clip(np.concatenate((i - 2, i - 1, i, i + 1)), 0, w.size - 2))
        cand = 0.5 * (w[lo] + w[lo + 1])
    spline = interpolate.CubicSpline(w, f)
    fine = np.linspace(w[0], w[-1], 8 * w.size)
    if np.any(np.diff(spline(fine)) < -tol):
        return interpolate.PchipInterpolator(w, f)
    return spline


def standard_cdf(z, alpha, beta, exact=False):
    """CDF of S1(alpha, beta, 1, 0).

    Scalars and short arrays are integrated directly (Gil-Pelaez inversion);
    longer arrays use a cached spline table in ``asinh(z)`` built on first use.
    """
    alpha, beta = float(alpha), float(beta)
    z = np.asarray(z, dtype=float)
    if z.ndim == 0:
        return _cdf_exact(float(z), alpha, beta)
    flat = z.ravel()
    if exact or flat.size <= 64:
        return np.array([_cdf_exact(float(v), alpha, beta) for v in flat]).reshape(z.shape)
    table = _cdf_table(alpha, beta)
    out = np.clip(table(np.arcsinh(flat)), 0.0, 1.0)
    far = np.abs(flat) > TABLE_Z_MAX
    for i in np.flatnonzero(far):
        out[i] = _cdf_exact(float(flat[i]), alpha, beta)
    return out.reshape(z.shape)


def tail_constant(alpha):
    """``C_alpha`` with ``P{Z > z} ~ C_alpha (1 + beta) z^-alpha`` for standard S1."""
    return special.gamma(alpha) * math.sin(0.5 * math.pi * alpha) / math.pi
