"""Experiment configuration: JSON documents with a versioned schema.

A document looks like::

    {"schema_version": 1, "scenario": "theorem3-normal",
     "triplet": {...}, "target": {"kind": "stable", "alpha": 1.5, "c1": 0.5, "c2": 0.5},
     "n_grid": [256, 1024, 4096], "replicates": 10000, "seed": 20240611,
     "tolerances": {"ks_max": 0.02}, "out": "results", "threads": 1,
     "options": {"times": [1.0]}}

Everything except ``scenario`` has a per-scenario default.
"""
from dataclasses import dataclass, field
import copy
import json

from .errors import ConfigError
from .laws import law_from_dict
from .levy_core import LevyTriplet
from .rescale import GaussianTarget
from .serialize import target_from_dict, target_to_dict, triplet_from_dict, triplet_to_dict
from .stable import StableParams
from .tails import CompoundPoissonTails, StableTails

SCHEMA_VERSION = 1
SCENARIOS = (
    "theorem1-compound",
    "corollary2-array",
    "theorem2-stable",
    "theorem3-normal",
    "theorem4-gaussian",
    "theorem5-asclt",
    "lemma1-constants",
    "coupling-decay",
)
TOP_LEVEL = ("schema_version", "scenario", "triplet", "target", "n_grid", "replicates", "seed", "tolerances",
             "out", "threads", "options")
DEFAULT_SEED = 20240611


def _cp(alpha, p_pos=0.5, intensity=1.0):
    return {"tail_kind": "compound-poisson",
            "parameters": {"intensity": intensity, "jump_law": {"kind": "pareto", "alpha": alpha, "p_pos": p_pos,
                                                                "y0": 1.0}}}


_UNIT_JUMPS = {"tail_kind": "compound-poisson",
               "parameters": {"intensity": 1.0, "jump_law": {"kind": "atoms", "sizes": [-1.0, 1.0],
                                                             "probs": [0.5, 0.5]}}}

DEFAULTS = {
    "theorem1-compound": dict(triplet=_cp(1.5), n_grid=[256, 1024, 4096], replicates=10_000,
                              tolerances={"ks_max": 0.02, "marginal_ks_max": 0.03},
                              options={"times": [0.25, 0.5, 0.75, 1.0]}),
    "corollary2-array": dict(triplet=None, n_grid=[256, 1024, 4096], replicates=10_000,
                             tolerances={"ks_max": 0.02, "level": 0.01},
                             options={"array": "scaled", "alpha": 1.5,
                                      "eta": {"kind": "pareto", "alpha": 1.5, "p_pos": 0.5, "y0": 1.0},
                                      "base_law": {"kind": "normal", "mean": 0.0, "sd": 1.0},
                                      "shift": 1.0, "coupled": True}),
    "theorem2-stable": dict(triplet=_cp(1.2, p_pos=0.7), n_grid=[256, 1024, 4096], replicates=10_000,
                            tolerances={"ks_max": 0.02, "marginal_ks_max": 0.03},
                            options={"times": [1.0], "regime": "stable-general"}),
    "theorem3-normal": dict(triplet=_cp(1.5), n_grid=[256, 1024, 4096], replicates=10_000,
                            tolerances={"ks_max": 0.02, "marginal_ks_max": 0.03},
                            options={"times": [1.0], "regime": "stable-normal"}),
    "theorem4-gaussian": dict(triplet=_UNIT_JUMPS, target={"kind": "gaussian", "sigma_w": 1.0},
                              n_grid=[256, 1024, 4096], replicates=10_000, tolerances={"level": 0.01},
                              options={"x_grid": [1.5, 2.0, 5.0, 10.0, 100.0], "correction_term": False}),
    "theorem5-asclt": dict(triplet=_cp(1.5), n_grid=[256, 16384], replicates=20,
                           tolerances={"min_wins": 18}, options={"functional": "eval@1", "mode": "KS"}),
    "lemma1-constants": dict(triplet=None, n_grid=[100, 1000, 10_000, 100_000], replicates=100,
                             tolerances={"factor": 2.0},
                             options={"alpha": 0.8, "C": 1.0,
                                      "eta": {"kind": "pareto", "alpha": 0.8, "p_pos": 0.75, "y0": 1.0}}),
    "coupling-decay": dict(triplet=_cp(1.5), n_grid=[16, 32, 64, 128, 256, 512], replicates=1000,
                           tolerances={"slope_margin": 0.15}, options={"k": 1024, "beta": 1.0}),
}

STABLE_SCENARIOS = ("theorem1-compound", "theorem2-stable", "theorem3-normal", "theorem5-asclt", "coupling-decay")


@dataclass
class ExperimentConfig:
    scenario: str
    triplet: LevyTriplet | None
    target: StableParams | GaussianTarget | None
    n_grid: tuple
    replicates: int
    seed: int = DEFAULT_SEED
    tolerances: dict = field(default_factory=dict)
    out: str = "results"
    threads: int = 1
    options: dict = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION

    def to_dict(self):
        """The fully resolved document, defaults filled in."""
        return {
            "schema_version": self.schema_version,
            "scenario": self.scenario,
            "triplet": None if self.triplet is None else triplet_to_dict(self.triplet),
            "target": None if self.target is None else target_to_dict(self.target),
            "n_grid": list(self.n_grid),
            "replicates": self.replicates,
            "seed": self.seed,
            "tolerances": dict(self.tolerances),
            "out": self.out,
            "threads": self.threads,
            "options": copy.deepcopy(self.options),
        }


def default_target(triplet: LevyTriplet):
    """Stable law whose tails the triplet's tails match at infinity, when that is read off directly."""
    tails = triplet.tails
    if isinstance(tails, StableTails):
        return StableParams(tails.alpha, tails.c1, tails.c2)
    if isinstance(tails, CompoundPoissonTails) and tails.law.kind == "pareto":
        law = tails.law
        w = tails.intensity * law.y0 ** law.alpha
        return StableParams(law.alpha, w * (1.0 - law.p_pos), w * law.p_pos)
    return None


def _is_int(v):
    return isinstance(v, int) and not isinstance(v, bool)


def _is_num(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _check_options(scenario, opts, errors):
    if scenario in ("theorem1-compound", "theorem2-stable", "theorem3-normal"):
        t = opts.get("times")
        if not isinstance(t, list) or not t or not all(_is_num(v) and 0 < v <= 1 for v in t):
            errors.append("options.times: expected a non-empty list of times in (0, 1]")
        if opts.get("regime", "stable-normal") not in ("auto", "stable-normal", "stable-general"):
            errors.append("options.regime: expected 'auto', 'stable-normal' or 'stable-general'")
    elif scenario == "corollary2-array":
        if opts.get("array") not in ("scaled", "perturbed"):
            errors.append("options.array: expected 'scaled' or 'perturbed'")
        for key in ("eta", "base_law"):
            try:
                law_from_dict(opts.get(key, {}))
            except (KeyError, TypeError, ValueError) as exc:
                errors.append(f"options.{key}: {exc}")
        if not (_is_num(opts.get("alpha")) and 0 < opts["alpha"] < 2):
            errors.append("options.alpha: expected a number in (0, 2)")
        if not _is_num(opts.get("shift")):
            errors.append("options.shift: expected a number")
    elif scenario == "theorem4-gaussian":
        x = opts.get("x_grid")
        if not isinstance(x, list) or not x or not all(_is_num(v) and v > 0 for v in x):
            errors.append("options.x_grid: expected a non-empty list of positive numbers")
    elif scenario == "theorem5-asclt":
        f = opts.get("functional")
        # the scenario needs the limit law of the functional; it is known for evaluations
        if not isinstance(f, str) or not f.startswith("eval@"):
            errors.append("options.functional: expected 'eval@<t>'")
        else:
            try:
                if not 0 < float(f[5:]) <= 1:
                    raise ValueError
            except ValueError:
                errors.append("options.functional: evaluation time must lie in (0, 1]")
        if str(opts.get("mode", "")).upper() not in ("KS", "CVM"):
            errors.append("options.mode: expected 'KS' or 'CvM'")
    elif scenario == "lemma1-constants":
        if not (_is_num(opts.get("alpha")) and 0 < opts["alpha"] < 2):
            errors.append("options.alpha: expected a number in (0, 2)")
        if not (_is_num(opts.get("C")) and opts["C"] > 0):
            errors.append("options.C: expected a positive number")
        try:
            law_from_dict(opts.get("eta", {}))
        except (KeyError, TypeError, ValueError) as exc:
            errors.append(f"options.eta: {exc}")
    elif scenario == "coupling-decay":
        if not (_is_int(opts.get("k")) and opts["k"] > 1):
            errors.append("options.k: expected an integer > 1")
        if not (_is_num(opts.get("beta")) and opts["beta"] > 0):
            errors.append("options.beta: expected a positive number")


def validate_config(document) -> ExperimentConfig:
    """Parse and check a config document (dict or JSON text).

    Raises :class:`ConfigError` listing every problem with its field path.
    """
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ConfigError([f"<document>: not valid JSON ({exc})"]) from exc
    if not isinstance(document, dict):
        raise ConfigError(["<document>: expected a JSON object"])
    errors = [f"{k}: unknown field" for k in document if k not in TOP_LEVEL]
    version = document.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        errors.append(f"schema_version: expected {SCHEMA_VERSION}, got {version!r}")
    scenario = document.get("scenario")
    if scenario not in SCENARIOS:
        errors.append(f"scenario: expected one of {', '.join(SCENARIOS)}, got {scenario!r}")
        raise ConfigError(errors)
    d = DEFAULTS[scenario]

    triplet = None
    tdoc = document.get("triplet", d["triplet"])
    if tdoc is not None:
        try:
            triplet = triplet_from_dict(tdoc)
        except ConfigError as exc:
            errors.extend(exc.errors)
        except Exception as exc:  # invalid parameter values
            errors.append(f"triplet: {exc}")

    target = None
    gdoc = document.get("target", d.get("target"))
    if gdoc is not None:
        try:
            target = target_from_dict(gdoc)
        except ConfigError as exc:
            errors.extend(exc.errors)
        except Exception as exc:
            errors.append(f"target: {exc}")
    elif scenario in STABLE_SCENARIOS and triplet is not None:
        target = default_target(triplet)
        if target is None:
            errors.append("target: required, it cannot be read off this triplet")
    if scenario in STABLE_SCENARIOS and target is not None and not isinstance(target, StableParams):
        errors.append("target.kind: this scenario needs a stable target")
    if scenario in STABLE_SCENARIOS and triplet is not None and triplet.sigma != 0:
        errors.append("triplet.sigma: stable limits need sigma = 0")
    if scenario == "theorem4-gaussian" and target is not None and not isinstance(target, GaussianTarget):
        errors.append("target.kind: this scenario needs a gaussian target")

    n_grid = document.get("n_grid", d["n_grid"])
    if not isinstance(n_grid, list) or not n_grid or not all(_is_int(v) and v >= 1 for v in n_grid):
        errors.append("n_grid: expected a non-empty list of positive integers")
    elif any(b <= a for a, b in zip(n_grid, n_grid[1:])):
        errors.append("n_grid: must be strictly increasing")
    elif scenario == "theorem5-asclt" and (n_grid[0] < 2 or len(n_grid) < 2):
        errors.append("n_grid: log averages need at least two values, all >= 2")

    replicates = document.get("replicates", d["replicates"])
    if not (_is_int(replicates) and replicates >= 1):
        errors.append("replicates: expected a positive integer")
    seed = document.get("seed", DEFAULT_SEED)
    if not (_is_int(seed) and 0 <= seed < 2 ** 64):
        errors.append("seed: expected an unsigned 64-bit integer")
    threads = document.get("threads", 1)
    if not (_is_int(threads) and threads >= 1):
        errors.append("threads: expected a positive integer")
    out = document.get("out", "results")
    if not isinstance(out, str) or not out:
        errors.append("out: expected a non-empty path")

    tol = dict(d["tolerances"])
    given = document.get("tolerances", {})
    if not isinstance(given, dict):
        errors.append("tolerances: expected an object")
        given = {}
    for k, v in given.items():
        if k not in tol:
            errors.append(f"tolerances.{k}: unknown tolerance for {scenario}")
        elif not _is_num(v) or v < 0:
            errors.append(f"tolerances.{k}: expected a non-negative number")
        else:
            tol[k] = v

    opts = copy.deepcopy(d["options"])
    given = document.get("options", {})
    if not isinstance(given, dict):
        errors.append("options: expected an object")
        given = {}
    for k, v in given.items():
        if k not in opts:
            errors.append(f"options.{k}: unknown option for {scenario}")
        else:
            opts[k] = v
    _check_options(scenario, opts, errors)

    if errors:
        raise ConfigError(errors)
    return ExperimentConfig(scenario, triplet, target, tuple(n_grid), replicates, seed, tol, out, threads, opts,
                            version)


def load_config(fname) -> ExperimentConfig:
    with open(fname) as fh:
        return validate_config(fh.read())
