"""Jump-size laws for compound Poisson processes."""
from dataclasses import dataclass, field

import numpy as np
from scipy import special

_EMPTY = np.zeros(0)


class JumpLaw:
    """Distribution of a single jump.

    Subclasses provide ``sample``, ``cdf`` (P{xi <= y}), ``cdf_left``
    (P{xi < y}), ``density`` of the absolutely continuous part and the
    atoms as ``(positions, probabilities)``.
    """

    kind = "abstract"
    symmetric = False

    def sample(self, gen, size):
        raise NotImplementedError

    def cdf(self, y):
        raise NotImplementedError

    def cdf_left(self, y):
        return self.cdf(y)

    def sf(self, y):
        return 1.0 - self.cdf(y)

    def density(self, y):
        return np.zeros_like(np.asarray(y, dtype=float))

    def atoms(self):
        return _EMPTY, _EMPTY

    def cf(self, x):
        """Closed-form characteristic function, or None when unavailable."""
        return None

    def to_dict(self):
        raise NotImplementedError


@dataclass(frozen=True)
class Atoms(JumpLaw):
    sizes: tuple
    probs: tuple
    kind = "atoms"

    def __post_init__(self):
        s = np.asarray(self.sizes, dtype=float)
        p = np.asarray(self.probs, dtype=float)
        if s.shape != p.shape or s.ndim != 1 or s.size == 0:
            raise ValueError("sizes and probs must be equal-length 1-d sequences")
        if np.any(p < 0) or not np.isclose(p.sum(), 1.0, atol=1e-12):
            raise ValueError("probs must be non-negative and sum to 1")
        if np.any(s == 0):
            raise ValueError("a jump of size 0 is not a jump")
        order = np.argsort(s)
        object.__setattr__(self, "sizes", tuple(s[order]))
        object.__setattr__(self, "probs", tuple(p[order]))

    @property
    def symmetric(self):
        s, p = self.atoms()
        return np.array_equal(s, -s[::-1]) and np.array_equal(p, p[::-1])

    def atoms(self):
        return np.asarray(self.sizes), np.asarray(self.probs)

    def sample(self, gen, size):
        s, p = self.atoms()
        if s.size == 1:
            return np.full(size, s[0])
        return s[gen.choice(s.size, size=size, p=p)]

    def cdf(self, y):
        s, p = self.atoms()
        c = np.concatenate(([0.0], np.cumsum(p)))
        return c[np.searchsorted(s, y, side="right")]

    def cdf_left(self, y):
        s, p = self.atoms()
        c = np.concatenate(([0.0], np.cumsum(p)))
        return c[np.searchsorted(s, y, side="left")]

    def cf(self, x):
        s, p = self.atoms()
        x = np.asarray(x, dtype=float)
        return np.sum(p * np.exp(1j * np.multiply.outer(x, s)), axis=-1)

    def to_dict(self):
        return {"kind": self.kind, "sizes": list(self.sizes), "probs": list(self.probs)}


@dataclass(frozen=True)
class Normal(JumpLaw):
    mean: float = 0.0
    sd: float = 1.0
    kind = "normal"

    def __post_init__(self):
        if self.sd <= 0:
            raise ValueError("sd must be positive")

    @property
    def symmetric(self):
        return self.mean == 0.0

    def sample(self, gen, size):
        return gen.normal(self.mean, self.sd, size)

    def cdf(self, y):
        return special.ndtr((np.asarray(y, dtype=float) - self.mean) / self.sd)

    def sf(self, y):
        return special.ndtr((self.mean - np.asarray(y, dtype=float)) / self.sd)

    def density(self, y):
        z = (np.asarray(y, dtype=float) - self.mean) / self.sd
        return np.exp(-0.5 * z * z) / (self.sd * np.sqrt(2 * np.pi))

    def cf(self, x):
        x = np.asarray(x, dtype=float)
        return np.exp(1j * self.mean * x - 0.5 * (self.sd * x) ** 2)

    def to_dict(self):
        return {"kind": self.kind, "mean": self.mean, "sd": self.sd}


@dataclass(frozen=True)
class ParetoTails(JumpLaw):
    """Two-sided Pareto: P{xi > y} = p_pos (y/y0)^-alpha, P{xi < -y} = p_neg (y/y0)^-alpha, y >= y0."""

    alpha: float
    p_pos: float = 0.5
    y0: float = 1.0
    kind = "pareto"

    def __post_init__(self):
        if not (self.alpha > 0 and self.y0 > 0 and 0.0 <= self.p_pos <= 1.0):
            raise ValueError("need alpha > 0, y0 > 0 and 0 <= p_pos <= 1")

    @property
    def p_neg(self):
        return 1.0 - self.p_pos

    @property
    def symmetric(self):
        return self.p_pos == 0.5

    def sample(self, gen, size):
        mag = self.y0 * (1.0 - gen.random(size)) ** (-1.0 / self.alpha)
        sign = np.where(gen.random(size) < self.p_pos, 1.0, -1.0)
        return sign * mag

    def _tail(self, v):
        v = np.asarray(v, dtype=float)
        return np.where(v >= self.y0, (np.maximum(v, self.y0) / self.y0) ** -self.alpha, 1.0)

    def cdf(self, y):
        y = np.asarray(y, dtype=float)
        neg = self.p_neg * self._tail(-y)
        pos = 1.0 - self.p_pos * self._tail(y)
        return np.where(y < 0, np.where(-y >= self.y0, neg, self.p_neg), pos)

    def sf(self, y):
        y = np.asarray(y, dtype=float)
        return np.where(y > 0, self.p_pos * self._tail(y), 1.0 - self.cdf(y))

    def density(self, y):
        y = np.asarray(y, dtype=float)
        v = np.abs(y)
        base = self.alpha / self.y0 * (np.maximum(v, self.y0) / self.y0) ** (-self.alpha - 1)
        w = np.where(y > 0, self.p_pos, self.p_neg)
        return np.where(v >= self.y0, w * base, 0.0)

    def to_dict(self):
        return {"kind": self.kind, "alpha": self.alpha, "p_pos": self.p_pos, "y0": self.y0}


@dataclass(frozen=True)
class DoubleExponential(JumpLaw):
    rate_neg: float = 1.0
    rate_pos: float = 1.0
    p_pos: float = 0.5
    kind = "double_exponential"

    def __post_init__(self):
        if not (self.rate_neg > 0 and self.rate_pos > 0 and 0.0 <= self.p_pos <= 1.0):
            raise ValueError("rates must be positive and 0 <= p_pos <= 1")

    @property
    def symmetric(self):
        return self.p_pos == 0.5 and self.rate_neg == self.rate_pos

    def sample(self, gen, size):
        pos = gen.random(size) < self.p_pos
        e = gen.standard_exponential(size)
        return np.where(pos, e / self.rate_pos, -e / self.rate_neg)

    def cdf(self, y):
        y = np.asarray(y, dtype=float)
        q = 1.0 - self.p_pos
        neg = q * np.exp(self.rate_neg * np.minimum(y, 0.0))
        pos = q + self.p_pos * -np.expm1(-self.rate_pos * np.maximum(y, 0.0))
        return np.where(y < 0, neg, pos)

    def sf(self, y):
        y = np.asarray(y, dtype=float)
        return np.where(y < 0, 1.0 - self.cdf(y), self.p_pos * np.exp(-self.rate_pos * np.maximum(y, 0.0)))

    def density(self, y):
        y = np.asarray(y, dtype=float)
        q = 1.0 - self.p_pos
        neg = q * self.rate_neg * np.exp(self.rate_neg * np.minimum(y, 0.0))
        pos = self.p_pos * self.rate_pos * np.exp(-self.rate_pos * np.maximum(y, 0.0))
        return np.where(y < 0, neg, pos)

    def cf(self, x):
        x = np.asarray(x, dtype=float)
        q = 1.0 - self.p_pos
        return self.p_pos * self.rate_pos / (self.rate_pos - 1j * x) + q * self.rate_neg / (self.rate_neg + 1j * x)

    def to_dict(self):
        return {"kind": self.kind, "rate_neg": self.rate_neg, "rate_pos": self.rate_pos, "p_pos": self.p_pos}


@dataclass(frozen=True)
class Shifted(JumpLaw):
    """``base + shift``; used for perturbed jump arrays."""

    base: JumpLaw = field(default_factory=Normal)
    shift: float = 0.0
    kind = "shifted"

    @property
    def symmetric(self):
        return self.shift == 0.0 and self.base.symmetric

    def sample(self, gen, size):
        return self.base.sample(gen, size) + self.shift

    def cdf(self, y):
        return self.base.cdf(np.asarray(y, dtype=float) - self.shift)

    def cdf_left(self, y):
        return self.base.cdf_left(np.asarray(y, dtype=float) - self.shift)

    def sf(self, y):
        return self.base.sf(np.asarray(y, dtype=float) - self.shift)

    def density(self, y):
        return self.base.density(np.asarray(y, dtype=float) - self.shift)

    def atoms(self):
        s, p = self.base.atoms()
        return s + self.shift, p

    def cf(self, x):
        c = self.base.cf(x)
        if c is None:
            return None
        return c * np.exp(1j * self.shift * np.asarray(x, dtype=float))

    def to_dict(self):
        return {"kind": self.kind, "base": self.base.to_dict(), "shift": self.shift}


def law_from_dict(doc):
    kind = doc.get("kind")
    if kind == "atoms":
        return Atoms(tuple(doc["sizes"]), tuple(doc["probs"]))
    if kind == "normal":
        return Normal(float(doc.get("mean", 0.0)), float(doc.get("sd", 1.0)))
    if kind == "pareto":
        return ParetoTails(float(doc["alpha"]), float(doc.get("p_pos", 0.5)), float(doc.get("y0", 1.0)))
    if kind == "double_exponential":
        return DoubleExponential(float(doc.get("rate_neg", 1.0)), float(doc.get("rate_pos", 1.0)),
                                 float(doc.get("p_pos", 0.5)))
    if kind == "shifted":
        return Shifted(law_from_dict(doc["base"]), float(doc.get("shift", 0.0)))
    raise ValueError(f"unknown jump law kind {kind!r}")
