"""Norming sequences, centering constants and rescaled processes.

For a Levy process V the rescaled process is ``X_n(t) = V(s_n t)/a_n - t b_n``.
Substituting ``y = a z`` in the exponent of ``V(s t)/a`` gives

    t * [ int (e^{ixz} - 1 - ixz/(1+z^2)) d(s nu(a z))
          + i x (s gamma / a + int z^3 (a^2 - 1)/((1+z^2)(1+a^2 z^2)) d(s nu(a z))) ]

so the drift that has to be removed is ``s gamma / a - K(s, a)`` where
``K(s, a) = int z^3 (1 - a^2)/((1+z^2)(1+a^2 z^2)) d(s nu(a z))`` is the
kernel integral returned by :func:`compute_centering_bn`.
"""
from dataclasses import dataclass, field
import json
import math

import numpy as np
from scipy import optimize

from .errors import HorizonError, NoNormingError, QuadratureError
from .levy_core import LevyTriplet, check_normal_attraction
from .paths import CadlagPath
from .stable import StableParams
from .tails import DEFAULT_QUAD, SIDES

DEFAULT_GRID_POINTS = 2 ** 10 + 1
CORRECTION_SHELLS = (1.0, 0.5, 0.25, 0.125)


@dataclass(frozen=True)
class GaussianTarget:
    """The limit ``sigma_w * W``."""

    sigma_w: float = 1.0

    def __post_init__(self):
        if not self.sigma_w > 0:
            raise ValueError("sigma_w must be positive")

    def to_dict(self):
        return {"kind": "gaussian", "sigma_w": self.sigma_w}


@dataclass
class NormingPlan:
    """Norming ``s``, ``a`` and the centering ``b`` actually subtracted, per index ``n``.

    ``kernel`` keeps the raw kernel integral ``K(s_n, a_n)`` and ``correction``
    the small-jump correction term (gaussian regime only) for reference.
    """

    n: np.ndarray
    s: np.ndarray
    a: np.ndarray
    b: np.ndarray
    regime: str
    alpha: float | None = None
    kernel: np.ndarray | None = None
    correction: np.ndarray | None = None
    notes: dict = field(default_factory=dict)

    def __post_init__(self):
        self.n = np.asarray(self.n, dtype=np.int64)
        for name in ("s", "a", "b"):
            setattr(self, name, np.asarray(getattr(self, name), dtype=float))
        if not (self.n.shape == self.s.shape == self.a.shape == self.b.shape):
            raise ValueError("n, s, a and b must have equal length")
        if self.regime not in ("stable-normal", "stable-general", "gaussian"):
            raise ValueError(f"unknown regime {self.regime!r}")

    def index(self, n):
        i = np.searchsorted(self.n, n)
        if i >= self.n.size or self.n[i] != n:
            raise KeyError(f"n = {n} is not in the plan")
        return int(i)

    def at(self, n):
        """``(s_n, a_n, b_n)``."""
        i = self.index(n)
        return float(self.s[i]), float(self.a[i]), float(self.b[i])

    def is_monotone(self):
        return bool(np.all(np.diff(self.s) > 0) and np.all(np.diff(self.a) > 0))

    def to_dict(self):
        doc = {
            "regime": self.regime,
            "alpha": self.alpha,
            "n": self.n.tolist(),
            "s": self.s.tolist(),
            "a": self.a.tolist(),
            "b": self.b.tolist(),
            "notes": self.notes,
        }
        if self.kernel is not None:
            doc["kernel"] = np.asarray(self.kernel).tolist()
        if self.correction is not None:
            doc["correction"] = np.asarray(self.correction).tolist()
        return doc

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, doc):
        return cls(doc["n"], doc["s"], doc["a"], doc["b"], doc["regime"], doc.get("alpha"),
                   doc.get("kernel"), doc.get("correction"), dict(doc.get("notes", {})))


# -- centering ----------------------------------------------------------------

def compute_centering_bn(triplet: LevyTriplet, s_n, a_n, cfg=DEFAULT_QUAD):
    """``int z^3 (1 - a^2)/((1+z^2)(1+a^2 z^2)) d(s nu(a z))``.

    Computed against the original measure with ``y = a z``:
    ``s (1 - a^2)/a * int y^3/((a^2 + y^2)(1 + y^2)) nu(dy)``.  Atoms are summed
    exactly.  The kernel is odd, so a symmetric measure gives exactly 0.
    """
    a = float(a_n)
    if a == 1.0 or not triplet.has_jumps:
        return 0.0
    tails = triplet.tails
    a2 = a * a
    g = lambda v: v ** 3 / ((a2 + v * v) * (1.0 + v * v))  # noqa: E731
    parts = [tails.integrate(side, g, cfg=cfg, points=(a,)) for side in SIDES]
    return float(s_n) * (1.0 - a2) / a * (parts[0] - parts[1])


def gaussian_correction(triplet: LevyTriplet, s_n, a_n, shells=CORRECTION_SHELLS, rtol=0.05, atol=1e-12,
                        cfg=DEFAULT_QUAD):
    """Small-jump term ``lim_eps int_{|z| <= eps} z^2 d(s nu(a z)) = s/a^2 int_{|y| <= a eps} y^2 nu(dy)``.

    The value at the smallest shell is returned after checking that the last
    shells agree (a two-step Richardson check on the power-law fit).
    """
    if not triplet.has_jumps:
        return 0.0
    s, a = float(s_n), float(a_n)
    vals = np.array([s / (a * a) * triplet.tails.truncated_second_moment(a * e, cfg) for e in shells])
    last, prev = vals[-1], vals[-2]
    if abs(last - prev) > max(atol, rtol * abs(last)):
        # extrapolate c0 + c1 eps^p from the last three shells and compare
        d1, d2 = vals[-3] - prev, prev - last
        ok = False
        if d1 != 0 and d2 != 0 and (d2 / d1) > 0:
            limit = last - d2 * (d2 / d1) / (1.0 - d2 / d1) if d2 / d1 < 1 else math.nan
            ok = np.isfinite(limit) and abs(limit - last) <= max(atol, rtol * abs(last))
        if not ok:
            raise QuadratureError("small-jump correction does not settle as the shell shrinks", abs(last - prev))
    return float(last)


def compute_centering_gaussian(triplet: LevyTriplet, s_n, a_n, include_correction=True, cfg=DEFAULT_QUAD):
    """Kernel integral minus the (real) small-jump correction term.

    With ``include_correction=False`` only the kernel integral is returned.
    """
    k = compute_centering_bn(triplet, s_n, a_n, cfg)
    if not include_correction:
        return k
    return k - gaussian_correction(triplet, s_n, a_n, cfg=cfg)


def drift_centering(triplet: LevyTriplet, s_n, a_n, kernel):
    """Centering that removes the drift of ``V(s t)/a``: ``s gamma/a - kernel``."""
    return float(s_n) * triplet.gamma / float(a_n) - kernel


# -- norming ------------------------------------------------------------------

def _index_array(n_max=None, n_values=None):
    if n_values is not None:
        n = np.asarray(sorted(set(int(v) for v in n_values)), dtype=np.int64)
    elif n_max is not None:
        n = np.arange(1, int(n_max) + 1, dtype=np.int64)
    else:
        raise ValueError("give n_max or n_values")
    if n.size == 0 or n[0] < 1:
        raise ValueError("indices must be positive integers")
    return n


def _solve_log(fun, target, n, hi=1e6, label="a_n"):
    """Largest root of ``fun(a) = target``, with ``fun`` eventually decreasing.

    Brackets by scanning down from a point where ``fun < target`` in steps of
    a factor 2, then refines with Brent's method in ``log a``.
    """
    g = lambda la: math.log(max(fun(math.exp(la)), 1e-300)) - math.log(target)  # noqa: E731
    lhi = math.log(hi)
    step = math.log(2.0)
    try:
        for _ in range(200):
            if g(lhi) < 0:
                break
            lhi += 10 * step
        else:
            raise ValueError("function stays above the target")
        llo = lhi - step
        for _ in range(400):
            if g(llo) > 0:
                break
            llo -= step
        else:
            raise ValueError("function stays below the target")
        return math.exp(optimize.brentq(g, llo, llo + step, xtol=1e-14, rtol=1e-13, maxiter=200))
    except (ValueError, RuntimeError, QuadratureError) as exc:
        raise NoNormingError(f"could not solve for {label} at n = {n}",
                             {"n": int(n), "reason": str(exc)}) from exc


def _kernels(triplet, s, a, cfg):
    # the kernel is odd, so a symmetric measure contributes exactly 0
    if not triplet.has_jumps or getattr(triplet.tails, "symmetric", False):
        return np.zeros(s.size)
    return np.array([compute_centering_bn(triplet, sn, an, cfg) for sn, an in zip(s, a)])


def derive_norming(triplet: LevyTriplet, target, n_max=None, n_values=None, regime="auto",
                   gaussian_correction_term=False, cfg=DEFAULT_QUAD):
    """Norming plan for ``triplet`` towards ``target`` (:class:`StableParams` or :class:`GaussianTarget`).

    Stable targets use ``s_n = n``.  In the ``stable-normal`` regime
    ``a_n = n^(1/alpha)``; in ``stable-general`` ``a_n`` solves
    ``n (L(-a_n) + |R(a_n)|) = c1 + c2``.  ``regime="auto"`` picks
    ``stable-normal`` when the tails match the target's power laws.

    Gaussian targets also use ``s_n = n`` and solve
    ``s_n (sigma^2 + int_{|y| <= a_n} y^2 nu(dy)) = sigma_w^2 a_n^2``.
    ``gaussian_correction_term`` adds the small-jump correction to the
    centering (off by default).
    """
    n = _index_array(n_max, n_values)
    s = n.astype(float)
    notes = {}
    if isinstance(target, StableParams):
        if triplet.sigma != 0:
            raise NoNormingError("stable limits need a triplet without Gaussian part", {"sigma": triplet.sigma})
        alpha = target.alpha
        c = target.c1 + target.c2
        if regime == "auto":
            y = np.geomspace(1e2, 1e8, 25)
            res = check_normal_attraction(triplet, alpha, y, target.c1, target.c2)
            regime = "stable-normal" if res.accepted() else "stable-general"
        if regime == "stable-normal":
            a = s ** (1.0 / alpha)
        elif regime == "stable-general":
            tot = lambda v: float(triplet.tails.total_tail(v))  # noqa: E731
            a = np.array([_solve_log(tot, c / nn, nn, hi=max(1.0, nn)) for nn in s])
        else:
            raise ValueError(f"regime {regime!r} does not fit a stable target")
        kernel = _kernels(triplet, s, a, cfg)
        b = np.array([drift_centering(triplet, sn, an, k) for sn, an, k in zip(s, a, kernel)])
        return NormingPlan(n, s, a, b, regime, alpha, kernel, None, notes)
    if isinstance(target, GaussianTarget):
        if regime not in ("auto", "gaussian"):
            raise ValueError(f"regime {regime!r} does not fit a gaussian target")
        sw2 = target.sigma_w ** 2
        m2 = lambda v: triplet.sigma ** 2 + (triplet.tails.truncated_second_moment(v, cfg)  # noqa: E731
                                            if triplet.has_jumps else 0.0)
        a = []
        for nn in s:
            # a -> s (sigma^2 + M2(a)) / a^2 is decreasing in a
            a.append(_solve_log(lambda v: nn * m2(v) / (v * v), sw2, nn, hi=max(1.0, 10 * math.sqrt(nn))))
        a = np.array(a)
        kernel = _kernels(triplet, s, a, cfg)
        corr = None
        b = np.array([drift_centering(triplet, sn, an, k) for sn, an, k in zip(s, a, kernel)])
        if gaussian_correction_term:
            corr = np.array([gaussian_correction(triplet, sn, an, cfg=cfg) for sn, an in zip(s, a)])
            b = b + corr
        notes["sigma_w"] = target.sigma_w
        return NormingPlan(n, s, a, b, "gaussian", 2.0, kernel, corr, notes)
    raise TypeError("target must be StableParams or GaussianTarget")


def stable_normal_plan(alpha, n_values, b=None):
    """Plan with ``s_n = n``, ``a_n = n^(1/alpha)`` and the given (default zero) centering."""
    n = _index_array(n_values=n_values)
    s = n.astype(float)
    b = np.zeros(n.size) if b is None else np.broadcast_to(np.asarray(b, dtype=float), n.shape)
    return NormingPlan(n, s, s ** (1.0 / alpha), b, "stable-normal", alpha)


# -- rescaled paths -----------------------------------------------------------

def rescale_path(path: CadlagPath, s_n, a_n, b_n, grid_points=DEFAULT_GRID_POINTS, rtol=1e-12):
    """``X(t) = V(s t)/a - t b`` on a uniform grid of ``[0, 1]`` plus the jump times.

    Jumps of V in ``(0, s]`` move to ``tau/s`` with size ``size/a``.  Between
    grid points the result is linear, which approximates the continuous part
    of V at the resolution of the new grid.
    """
    s, a, b = float(s_n), float(a_n), float(b_n)
    if not (s > 0 and a > 0):
        raise ValueError("s_n and a_n must be positive")
    if path.horizon < s * (1.0 - rtol):
        raise HorizonError(f"path horizon {path.horizon:g} is shorter than s_n = {s:g}")
    s_eff = min(s, path.horizon)
    u = np.linspace(0.0, 1.0, int(grid_points))
    keep = path.jump_times <= s_eff
    jt, js = path.jump_times[keep], path.jump_sizes[keep]
    # evaluate V at the original jump times so no jump is missed by rounding t * s
    t_new = np.concatenate((u, jt / s))
    q = np.concatenate((u * s_eff, jt))
    is_jump = np.concatenate((np.zeros(u.size, bool), np.ones(jt.size, bool)))
    order = np.lexsort((~is_jump, t_new))
    t_new, q = t_new[order], q[order]
    first = np.concatenate(([True], np.diff(t_new) > 0))
    t_new, q = t_new[first], q[first]
    right = path(q)
    left = path.left_limit(q)
    values = right / a - t_new * b
    lefts = left / a - t_new * b
    return CadlagPath(t_new, values, lefts, jt / s, js / a)
