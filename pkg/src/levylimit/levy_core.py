"""Levy triplets, characteristic functions and domain-of-attraction checks."""
from dataclasses import dataclass, field
import math

import numpy as np

from .errors import DegenerateTailError, InvalidTripletError, QuadratureError
from .laws import JumpLaw
from .stable import StableParams
from .tails import DEFAULT_QUAD, SIDES, CompoundPoissonTails, NoJumps, StableTails, TailMeasure


@dataclass(frozen=True)
class LevyTriplet:
    """Drift ``gamma``, Gaussian coefficient ``sigma`` and a jump measure.

    The characteristic function of V(t) is
    ``exp(t * (i x gamma - sigma^2 x^2 / 2 + int (e^{ixy} - 1 - ixy/(1+y^2)) nu(dy)))``.
    """

    gamma: float = 0.0
    sigma: float = 0.0
    tails: TailMeasure = field(default_factory=NoJumps)

    def __post_init__(self):
        if not (np.isfinite(self.gamma) and np.isfinite(self.sigma)):
            raise InvalidTripletError("gamma and sigma must be finite")
        if self.sigma < 0:
            raise InvalidTripletError("sigma must be non-negative")

    @property
    def tail_kind(self):
        return self.tails.kind

    def neg_tail(self, y):
        """L(y) for y < 0."""
        return self.tails.L(y)

    def pos_tail(self, y):
        """R(y) for y > 0."""
        return self.tails.R(y)

    @property
    def has_jumps(self):
        return not isinstance(self.tails, NoJumps)

    # -- constructors --------------------------------------------------------
    @classmethod
    def stable(cls, params: StableParams):
        return cls(0.0, 0.0, StableTails(params.alpha, params.c1, params.c2))

    @classmethod
    def gaussian(cls, sigma, gamma=0.0):
        return cls(gamma, sigma, NoJumps())

    @classmethod
    def compound_poisson(cls, intensity, law: JumpLaw, gamma=None):
        """Triplet of ``sum_{i <= N(t)} xi_i``.

        With ``gamma=None`` the drift is the compensator
        ``intensity * E[xi/(1+xi^2)]`` so that the process is the raw sum with
        no extra linear term.
        """
        tails = CompoundPoissonTails(float(intensity), law)
        if gamma is None:
            gamma = tails.compensator_drift()
        return cls(float(gamma), 0.0, tails)

    def levy_exponent(self, x, cfg=DEFAULT_QUAD):
        x = float(x)
        if x == 0.0:
            return 0.0 + 0.0j
        jump = self.tails.levy_exponent(x, cfg) if self.has_jumps else 0.0
        return 1j * x * self.gamma - 0.5 * (self.sigma * x) ** 2 + jump


def eval_char_fn(triplet: LevyTriplet, t, x, cfg=DEFAULT_QUAD):
    """Characteristic function of V(t) at ``x`` (scalar or array).

    Raises
    ------
    QuadratureError
        When the jump integral does not converge; carries the residual.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    xs = np.asarray(x, dtype=float)
    vals = np.empty(xs.shape, dtype=complex)
    for idx, xv in np.ndenumerate(xs):
        vals[idx] = 1.0 if xv == 0.0 else np.exp(t * triplet.levy_exponent(xv, cfg))
    return complex(vals) if xs.ndim == 0 else vals


def check_integrability(triplet: LevyTriplet, eps, cfg=DEFAULT_QUAD):
    """``int_{|y| <= eps} y^2 nu(dy)``; raises InvalidTripletError when it diverges."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    if not triplet.has_jumps:
        return 0.0
    try:
        val = triplet.tails.truncated_second_moment(eps, cfg)
    except QuadratureError as exc:
        raise InvalidTripletError(f"small-jump second moment diverges: {exc}") from exc
    if not np.isfinite(val):
        raise InvalidTripletError("small-jump second moment is not finite")
    return val


# -- attraction diagnostics ---------------------------------------------------

@dataclass(frozen=True)
class Verdict:
    kind: str  # "stable", "gaussian" or "inconclusive"
    alpha: float = math.nan
    ratio: float = math.nan  # c1/c2, +inf for a one-sided (negative) law

    def __str__(self):
        if self.kind == "stable":
            return f"stable({self.alpha:.6g}, {self.ratio:.6g})"
        return self.kind


@dataclass(frozen=True)
class AttractionReport:
    tail_ratio_estimates: np.ndarray  # rows (y, L(-y)/|R(y)|)
    rv_index_estimates: np.ndarray  # rows (y, x, T(y)/T(yx))
    gaussian_ratio_estimates: np.ndarray  # rows (x, ratio)
    verdict: Verdict
    degenerate_side: str | None = None  # "pos" when R vanishes on the grid, "neg" for L


def _spread(values):
    values = values[np.isfinite(values)]
    if values.size == 0:
        return math.inf
    centre = np.median(values)
    if centre == 0:
        return math.inf
    return float((values.max() - values.min()) / abs(centre))


def check_attraction_stable(triplet: LevyTriplet, y_grid, x_probe=(2.0, 4.0, 10.0), tol=0.05,
                            require_two_sided=False):
    """Tail-ratio and regular-variation diagnostics for a stable domain of attraction.

    The verdict is ``stable`` when, over the last decade of ``y_grid``, both the
    ratio ``L(-y)/|R(y)|`` and the implied index ``log(T(y)/T(yx))/log(x)``
    (``T = L(-.) + |R(.)|``) vary by at most ``tol`` relative to their median.
    """
    y = np.asarray(y_grid, dtype=float)
    if y.ndim != 1 or np.any(y <= 0) or np.any(np.diff(y) <= 0):
        raise ValueError("y_grid must be increasing and positive")
    if y[-1] / y[0] < 100.0:
        raise ValueError("y_grid must span at least two decades")
    x_probe = np.asarray(x_probe, dtype=float)
    tails = triplet.tails
    neg = np.asarray(tails.tail(-1, y), dtype=float)
    pos = np.asarray(tails.tail(1, y), dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(pos > 0, neg / np.where(pos > 0, pos, 1.0), np.where(neg > 0, np.inf, np.nan))
    rows = []
    for x in x_probe:
        tot = np.asarray(tails.total_tail(y), dtype=float)
        tot_x = np.asarray(tails.total_tail(y * x), dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            r = np.where(tot_x > 0, tot / np.where(tot_x > 0, tot_x, 1.0), np.nan)
        rows.extend(zip(y, np.full_like(y, x), r))
    rv = np.array(rows, dtype=float).reshape(-1, 3)
    try:
        gauss = check_gaussian_domain(triplet, y)
    except (DegenerateTailError, QuadratureError):
        # tails given only asymptotically may not be integrable near 0
        gauss = np.column_stack((y, np.full_like(y, np.nan)))

    degenerate = None
    if np.all(pos == 0) and np.any(neg > 0):
        degenerate = "pos"
    elif np.all(neg == 0) and np.any(pos > 0):
        degenerate = "neg"
    if degenerate == "pos" and require_two_sided:
        raise DegenerateTailError("R vanishes on the whole grid (one-sided law, c1/c2 = +inf)")

    last = y >= y[-1] / 10.0
    with np.errstate(divide="ignore", invalid="ignore"):
        alpha_hat = np.log(rv[:, 2]) / np.log(rv[:, 1])
    alpha_last = alpha_hat[np.tile(last, x_probe.size)]
    ratio_last = ratio[last]
    verdict = Verdict("inconclusive")
    if np.all(np.isfinite(alpha_last)) and alpha_last.size and _spread(alpha_last) <= tol:
        a = float(np.median(alpha_last))
        if degenerate == "pos":
            rho, ok = math.inf, True
        elif degenerate == "neg":
            rho, ok = 0.0, True
        else:
            rho = float(np.median(ratio_last))
            ok = np.all(np.isfinite(ratio_last)) and _spread(ratio_last) <= tol
        if ok and 0.0 < a < 2.0:
            verdict = Verdict("stable", a, rho)
    if verdict.kind == "inconclusive":
        g = gauss[last, 1]
        if np.all(np.isfinite(g)) and g.size and (np.all(g == 0) or (np.all(np.diff(gauss[:, 1]) <= 1e-12)
                                                                     and g[-1] < tol)):
            verdict = Verdict("gaussian")
    return AttractionReport(np.column_stack((y, ratio)), rv, gauss, verdict, degenerate)


@dataclass(frozen=True)
class NormalAttractionResiduals:
    """``alpha1(y) = L(y)|y|^alpha - c1`` (y < 0) and ``alpha2(y) = -R(y) y^alpha - c2`` (y > 0).

    Iterating yields the two residual tables, each with rows ``(y, residual)``.
    """

    alpha1: np.ndarray
    alpha2: np.ndarray
    c1: float
    c2: float

    def __iter__(self):
        return iter((self.alpha1, self.alpha2))

    def accepted(self, tol=0.05):
        """True when both residuals stay within ``tol * (c1 + c2)`` over the last decade."""
        scale = tol * max(self.c1 + self.c2, 1e-300)
        for tab in (self.alpha1, self.alpha2):
            mag = np.abs(tab[:, 0])
            last = mag >= mag.max() / 10.0
            if np.any(~np.isfinite(tab[last, 1])) or np.max(np.abs(tab[last, 1])) > scale:
                return False
        return True


def check_normal_attraction(triplet: LevyTriplet, alpha, y_grid, c1=None, c2=None):
    """Residuals of the tails against the exact power laws ``c1|y|^-alpha``, ``c2 y^-alpha``.

    ``y_grid`` may hold magnitudes (all positive) or signed points; negative
    entries feed ``alpha1`` and positive ones ``alpha2``.  When ``c1`` or ``c2``
    is omitted it is taken from the outermost grid point.
    """
    if not (0.0 < alpha < 2.0):
        raise ValueError("alpha must lie in (0, 2)")
    y = np.asarray(y_grid, dtype=float)
    if np.all(y > 0):
        y_neg, y_pos = -y[::-1], y
    else:
        y_neg, y_pos = np.sort(y[y < 0]), np.sort(y[y > 0])
    lv = triplet.tails.tail(-1, -y_neg) * np.abs(y_neg) ** alpha
    rv = triplet.tails.tail(1, y_pos) * y_pos ** alpha
    c1 = float(lv[0]) if c1 is None else float(c1)
    c2 = float(rv[-1]) if c2 is None else float(c2)
    return NormalAttractionResiduals(np.column_stack((y_neg, lv - c1)), np.column_stack((y_pos, rv - c2)), c1, c2)


def check_gaussian_domain(triplet: LevyTriplet, x_grid, cfg=DEFAULT_QUAD):
    """Rows ``(x, x^2 nu(|y| > x) / int_{|y| <= x} y^2 nu(dy))``.

    Points where the denominator vanishes get ``nan``; an empty jump measure
    raises :class:`DegenerateTailError`.
    """
    x = np.asarray(x_grid, dtype=float)
    if np.any(x <= 0) or np.any(np.diff(x) <= 0):
        raise ValueError("x_grid must be increasing and positive")
    if not triplet.has_jumps:
        raise DegenerateTailError("no jump mass: the truncated second moment is identically 0")
    tails = triplet.tails
    out = np.empty(x.size)
    # cumulative second moments over successive shells keep the cost linear
    acc = 0.0
    prev = 0.0
    for i, xv in enumerate(x):
        acc += sum(tails.integrate(s, lambda v: v * v, prev, xv, cfg) for s in SIDES)
        prev = xv
        num = xv * xv * float(tails.total_tail(xv))
        out[i] = num / acc if acc > 0 else math.nan
    return np.column_stack((x, out))
