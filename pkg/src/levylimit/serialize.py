"""JSON documents for triplets and targets, CSV writers for distance tables.

A triplet document is ``{"gamma", "sigma", "tail_kind", "parameters"}``:

* ``"none"``: no parameters;
* ``"parametric-stable"``: ``{"alpha", "c1", "c2"}``;
* ``"compound-poisson"``: ``{"intensity", "jump_law": {"kind", ...}}``;
* ``"tabulated"``: ``{"neg": [[y, L(y)], ...], "pos": [[y, R(y)], ...]}``.

Callable tails have no text form.  For compound Poisson documents ``gamma``
may be omitted, meaning the drift of the plain sum of jumps.
"""
import csv
import json

from .errors import ConfigError
from .laws import law_from_dict
from .levy_core import LevyTriplet
from .rescale import GaussianTarget
from .stable import StableParams
from .tails import CompoundPoissonTails, NoJumps, StableTails, TabulatedTails

TAIL_KINDS = ("none", "parametric-stable", "compound-poisson", "tabulated")


def triplet_to_dict(triplet: LevyTriplet):
    kind = triplet.tail_kind
    if kind not in TAIL_KINDS:
        raise TypeError(f"tails of kind {kind!r} cannot be serialised")
    params = {} if kind == "none" else triplet.tails.to_dict()
    return {"gamma": float(triplet.gamma), "sigma": float(triplet.sigma), "tail_kind": kind, "parameters": params}


def triplet_from_dict(doc):
    """Inverse of :func:`triplet_to_dict`; raises :class:`ConfigError` with field names."""
    if not isinstance(doc, dict):
        raise ConfigError(["triplet: expected an object"])
    kind = doc.get("tail_kind", "none")
    p = doc.get("parameters", {}) or {}
    sigma = float(doc.get("sigma", 0.0))
    gamma = doc.get("gamma")
    try:
        if kind == "none":
            tails = NoJumps()
        elif kind == "parametric-stable":
            missing = [k for k in ("alpha", "c1", "c2") if k not in p]
            if missing:
                raise ConfigError([f"triplet.parameters.{k}: required" for k in missing])
            tails = StableTails(float(p["alpha"]), float(p["c1"]), float(p["c2"]))
        elif kind == "compound-poisson":
            missing = [k for k in ("intensity", "jump_law") if k not in p]
            if missing:
                raise ConfigError([f"triplet.parameters.{k}: required" for k in missing])
            tails = CompoundPoissonTails(float(p["intensity"]), law_from_dict(p["jump_law"]))
            if gamma is None:
                gamma = tails.compensator_drift()
        elif kind == "tabulated":
            tails = TabulatedTails(p.get("neg", []), p.get("pos", []))
        else:
            raise ConfigError([f"triplet.tail_kind: unknown kind {kind!r}, expected one of {', '.join(TAIL_KINDS)}"])
        return LevyTriplet(0.0 if gamma is None else float(gamma), sigma, tails)
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError([f"triplet.parameters: {exc}"]) from exc


def target_to_dict(target):
    if isinstance(target, StableParams):
        return {"kind": "stable", **target.to_dict()}
    if isinstance(target, GaussianTarget):
        return target.to_dict()
    raise TypeError("unknown target type")


def target_from_dict(doc):
    if not isinstance(doc, dict):
        raise ConfigError(["target: expected an object"])
    kind = doc.get("kind")
    if kind == "stable":
        missing = [k for k in ("alpha", "c1", "c2") if k not in doc]
        if missing:
            raise ConfigError([f"target.{k}: required for a stable target" for k in missing])
        return StableParams(float(doc["alpha"]), float(doc["c1"]), float(doc["c2"]))
    if kind == "gaussian":
        return GaussianTarget(float(doc.get("sigma_w", 1.0)))
    raise ConfigError([f"target.kind: expected 'stable' or 'gaussian', got {kind!r}"])


def dumps(doc):
    """Canonical JSON text (sorted keys, fixed indent) so equal documents give equal bytes."""
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=True) + "\n"


def write_json(fname, doc):
    with open(fname, "w") as fh:
        fh.write(dumps(doc))


def write_distances_csv(fname, rows):
    """Rows ``(n, statistic, value)``."""
    with open(fname, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(("n", "statistic", "value"))
        for n, stat, value in rows:
            w.writerow((int(n), stat, repr(float(value))))


def write_trace_csv(fname, rows):
    """Rows ``(n, distance)``."""
    with open(fname, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(("n", "distance"))
        for n, d in rows:
            w.writerow((int(n), repr(float(d))))
