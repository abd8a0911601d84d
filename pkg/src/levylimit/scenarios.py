"""Verification scenarios: simulate, rescale, measure distances and apply pass/fail rules.

Every scenario draws its randomness from ``RngStream(config.seed)`` through
fixed sub-streams (one per grid value and per block of replicates), so a
report depends only on the config and not on the number of threads.
"""
from dataclasses import dataclass, field
import math
import os
import time

import numpy as np
from scipy import stats

from . import __version__
from ._accel import USE_NUMBA
from .asclt import EvalAt, distance_trace, estimate_lemma1_constants, coupling_decay, check_condition_A, \
    fit_loglog_slope
from .config import ExperimentConfig, default_target
from .errors import ConfigError
from .kernels import segment_sums
from .laws import law_from_dict
from .levy_core import LevyTriplet, check_gaussian_domain
from .levy_sim import sample_compound_poisson, sample_compound_poisson_marginals
from .paths import build_path
from .rescale import derive_norming
from .rng import RngStream, map_indexed
from .serialize import write_distances_csv, write_json
from .stable import StableParams
from .stattest import ks_critical, ks_critical_two_sample, ks_distance, ks_two_sample
from .tails import CompoundPoissonTails, StableTails

BLOCK = 1000


@dataclass
class Rule:
    name: str
    value: float
    threshold: float
    passed: bool
    required: bool = True

    def to_dict(self):
        return {"name": self.name, "value": _clean(self.value), "threshold": _clean(self.threshold),
                "passed": bool(self.passed), "required": self.required}


@dataclass
class Report:
    scenario: str
    seed: int
    config: dict
    tables: dict
    rules: list
    distances: list = field(default_factory=list)

    @property
    def passed(self):
        return all(r.passed for r in self.rules if r.required)

    def rule(self, name):
        for r in self.rules:
            if r.name == name:
                return r
        raise KeyError(name)

    def to_dict(self):
        return {
            "scenario": self.scenario,
            "seed": self.seed,
            "passed": self.passed,
            "rules": [r.to_dict() for r in self.rules],
            "tables": _clean(self.tables),
            "config": self.config,
            "runtime": {"package_version": __version__, "numba": USE_NUMBA, "threads": self.config.get("threads", 1)},
        }

    def write(self, out_dir, elapsed=None):
        os.makedirs(out_dir, exist_ok=True)
        write_json(os.path.join(out_dir, "report.json"), self.to_dict())
        write_distances_csv(os.path.join(out_dir, "distances.csv"), self.distances)
        if elapsed is not None:
            # wall time lives apart from the report so reports stay byte-identical
            write_json(os.path.join(out_dir, "timing.json"), {"seconds": round(float(elapsed), 3)})


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _decreasing(values):
    return bool(all(b < a for a, b in zip(values, values[1:])))


# -- samplers -----------------------------------------------------------------

def _marginals(triplet: LevyTriplet, times, size, stream: RngStream, threads=1):
    """``size`` rows of ``(V(t_1), ..., V(t_m))`` in blocks of :data:`BLOCK` rows, one sub-stream per block."""
    times = np.asarray(times, dtype=float)
    tails = triplet.tails
    n_blocks = -(-size // BLOCK)

    if isinstance(tails, CompoundPoissonTails) and triplet.sigma == 0:
        drift = triplet.gamma - tails.compensator_drift()

        def block(i, child):
            m = min(BLOCK, size - i * BLOCK)
            v = sample_compound_poisson_marginals(tails.intensity, tails.law, times, m, child.generator())
            return v + times * drift
    elif isinstance(tails, StableTails) and triplet.sigma == 0 and triplet.gamma == 0:
        params = StableParams(tails.alpha, tails.c1, tails.c2)
        dt = np.diff(np.concatenate(([0.0], times)))

        def block(i, child):
            m = min(BLOCK, size - i * BLOCK)
            gen = child.generator()
            inc = np.column_stack([params.sample(gen, m, t=d) if d > 0 else np.zeros(m) for d in dt])
            return np.cumsum(inc, axis=1)
    else:
        raise ConfigError(["triplet.tail_kind: marginal scenarios need compound-poisson or parametric-stable "
                           "tails without Gaussian part"])
    return np.vstack(map_indexed(block, n_blocks, stream, threads, chunk=1))


def cp_path(triplet: LevyTriplet, horizon, rng):
    """Path of a compound Poisson triplet, plain sum of jumps plus its residual drift."""
    tails = triplet.tails
    if not isinstance(tails, CompoundPoissonTails) or triplet.sigma != 0:
        raise ConfigError(["triplet.tail_kind: path scenarios need compound-poisson tails without Gaussian part"])
    p = sample_compound_poisson(tails.intensity, tails.law, horizon, rng)
    drift = triplet.gamma - tails.compensator_drift()
    if drift == 0.0:
        return p
    return build_path(p.grid, drift * p.grid, p.jump_times, p.jump_sizes)


# -- scenarios ----------------------------------------------------------------

def _run_marginal_scenario(cfg: ExperimentConfig, stream):
    tr, target = cfg.triplet, cfg.target
    times = sorted(float(t) for t in cfg.options["times"])
    plan = derive_norming(tr, target, n_values=cfg.n_grid, regime=cfg.options.get("regime", "auto"))
    rows, dist = [], []
    for j, n in enumerate(cfg.n_grid):
        s, a, b = plan.at(n)
        x = _marginals(tr, s * np.asarray(times), cfg.replicates, stream.child(j), cfg.threads)
        x = x / a - np.asarray(times) * b
        for i, t in enumerate(times):
            d = ks_distance(x[:, i], lambda y, t=t: target.cdf(y, t))
            rows.append({"n": int(n), "t": t, "ks": d})
            dist.append((n, f"ks@t={t:g}", d))
    final = [r for r in rows if r["n"] == cfg.n_grid[-1]]
    rules = []
    for r in final:
        if r["t"] == 1.0:
            rules.append(Rule("ks_final@t=1", r["ks"], cfg.tolerances["ks_max"], r["ks"] <= cfg.tolerances["ks_max"]))
        else:
            tol = cfg.tolerances["marginal_ks_max"]
            rules.append(Rule(f"ks_final@t={r['t']:g}", r["ks"], tol, r["ks"] <= tol))
    for t in times:
        seq = [r["ks"] for r in rows if r["t"] == t]
        if len(seq) > 1:
            rules.append(Rule(f"ks_decreasing@t={t:g}", seq[-1], seq[0], _decreasing(seq), required=False))
    tables = {"ks": rows, "plan": plan.to_dict(), "target": target.to_dict()}
    return tables, rules, dist


def _run_gaussian(cfg: ExperimentConfig, stream):
    tr, target = cfg.triplet, cfg.target
    plan = derive_norming(tr, target, n_values=cfg.n_grid, gaussian_correction_term=cfg.options["correction_term"])
    crit = ks_critical(cfg.replicates, cfg.tolerances["level"])
    cdf = stats.norm(0.0, target.sigma_w).cdf
    rows, dist = [], []
    for j, n in enumerate(cfg.n_grid):
        s, a, b = plan.at(n)
        x = _marginals(tr, [s], cfg.replicates, stream.child(j), cfg.threads)[:, 0] / a - b
        d = ks_distance(x, cdf)
        rows.append({"n": int(n), "ks": d, "critical": crit})
        dist.append((n, "ks@t=1", d))
    rules = [Rule("ks_final_below_critical", rows[-1]["ks"], crit, rows[-1]["ks"] <= crit)]
    ratio = check_gaussian_domain(tr, cfg.options["x_grid"])
    beyond = [(x, r) for x, r in ratio if float(tr.tails.total_tail(x)) == 0.0]
    if beyond:
        worst = max(abs(r) for _, r in beyond)
        rules.append(Rule("tail_ratio_zero_beyond_jumps", worst, 0.0, worst == 0.0))
    tables = {"ks": rows, "tail_ratio": [{"x": x, "ratio": r} for x, r in ratio], "plan": plan.to_dict()}
    return tables, rules, dist


def _run_array(cfg: ExperimentConfig, stream):
    o = cfg.options
    rows, dist = [], []
    if o["array"] == "scaled":
        eta = law_from_dict(o["eta"])
        alpha = float(o["alpha"])
        target = default_target(LevyTriplet.compound_poisson(1.0, eta))
        if target is None or target.alpha != alpha:
            raise ConfigError(["options.eta: the scaled array needs a pareto law with the given alpha"])
        tr = LevyTriplet(0.0, 0.0, CompoundPoissonTails(1.0, eta))
        for j, n in enumerate(cfg.n_grid):
            # row sums over pi(k_n) terms with k_n = n, each term eta / n^(1/alpha)
            x = _marginals(tr, [float(n)], cfg.replicates, stream.child(j), cfg.threads)[:, 0] / n ** (1.0 / alpha)
            d = ks_distance(x, target.cdf)
            rows.append({"n": int(n), "ks": d})
            dist.append((n, "ks@t=1", d))
        tol = cfg.tolerances["ks_max"]
        rules = [Rule("ks_final", rows[-1]["ks"], tol, rows[-1]["ks"] <= tol),
                 Rule("ks_decreasing", rows[-1]["ks"], rows[0]["ks"], _decreasing([r["ks"] for r in rows]),
                      required=False)]
        return {"ks": rows, "target": target.to_dict()}, rules, dist

    base = law_from_dict(o["base_law"])
    shift = float(o["shift"])
    R = cfg.replicates
    n_blocks = -(-R // BLOCK)

    def draw(i, child):
        gen = child.generator()
        m = min(BLOCK, R - i * BLOCK)
        counts = gen.poisson(1.0, m)
        return counts, segment_sums(np.asarray(base.sample(gen, int(counts.sum())), float), counts.astype(np.int64))

    parts = map_indexed(draw, n_blocks, stream.child(0), cfg.threads, chunk=1)
    counts = np.concatenate([p[0] for p in parts])
    limit = np.concatenate([p[1] for p in parts])
    for j, n in enumerate(cfg.n_grid):
        if o["coupled"]:
            # same Poisson clock and same xi_i, every jump moved by shift / n
            xn = limit + shift * counts / n
        else:
            parts = map_indexed(draw, n_blocks, stream.child(j + 1), cfg.threads, chunk=1)
            xn = np.concatenate([p[1] for p in parts]) + shift * np.concatenate([p[0] for p in parts]) / n
        d = ks_two_sample(xn, limit)
        rows.append({"n": int(n), "ks": d})
        dist.append((n, "ks2@t=1", d))
    crit = ks_critical_two_sample(R, R, cfg.tolerances["level"])
    seq = [r["ks"] for r in rows]
    rules = [Rule("ks_decreasing", seq[-1], seq[0], _decreasing(seq)),
             Rule("ks_final_below_critical", seq[-1], crit, seq[-1] <= crit)]
    return {"ks": rows, "critical": crit}, rules, dist


def _run_asclt(cfg: ExperimentConfig, stream):
    tr, target = cfg.triplet, cfg.target
    t = float(cfg.options["functional"][5:])
    functional = EvalAt(t)
    mode = cfg.options["mode"]
    n_top = int(cfg.n_grid[-1])
    plan = derive_norming(tr, target, n_max=n_top)
    cond_a = check_condition_A(plan.s, 1.0, plan.n)
    cdf = lambda y: target.cdf(y, t)  # noqa: E731

    def one(i, child):
        v = cp_path(tr, plan.s[-1], child)
        return distance_trace(v, plan, functional, cdf, cfg.n_grid, mode)

    traces = map_indexed(one, cfg.replicates, stream, cfg.threads, chunk=1)
    rows, dist = [], []
    wins = 0
    for i, tr_rows in enumerate(traces):
        d = [v for _, v in tr_rows]
        won = d[-1] < d[0]
        wins += won
        rows.append({"trajectory": i, "distances": d, "decreased": won})
        dist.extend((n, f"{mode.lower()}@traj={i}", v) for n, v in tr_rows)
    rules = [Rule("condition_A_beta1", float(cond_a), 1.0, cond_a),
             Rule("trajectories_decreased", wins, cfg.tolerances["min_wins"], wins >= cfg.tolerances["min_wins"])]
    tables = {"n_grid": list(cfg.n_grid), "trajectories": rows, "wins": wins, "regime": plan.regime,
              "functional": functional.name, "mode": mode}
    return tables, rules, dist


def _run_lemma1(cfg: ExperimentConfig, stream):
    o = cfg.options
    eta = law_from_dict(o["eta"])
    alpha, C = float(o["alpha"]), float(o["C"])
    scaled = estimate_lemma1_constants(lambda n, g: eta.sample(g, n) / n ** (1.0 / alpha), C, cfg.n_grid,
                                       rows=cfg.replicates, rng=stream.child(0))
    plain = estimate_lemma1_constants(lambda n, g: eta.sample(g, n), C, cfg.n_grid, rows=cfg.replicates,
                                      rng=stream.child(1))
    f = cfg.tolerances["factor"]
    dist = []
    for name, est in (("scaled", scaled), ("unscaled", plain)):
        for key in ("C1", "C2", "C3"):
            dist.extend((n, f"{name}.{key}", v) for n, v in zip(cfg.n_grid, est.per_n[key]))
    rules = [Rule("scaled_stabilized", _spread(scaled), f, scaled.stabilized(f)),
             Rule("unscaled_divergent", _spread(plain), f, plain.divergent(f))]
    tables = {"scaled": _lemma_table(scaled), "unscaled": _lemma_table(plain)}
    return tables, rules, dist


def _spread(est):
    # largest max/median ratio among the three constants
    out = 0.0
    for key in ("C1", "C2", "C3"):
        v = np.asarray(est.per_n[key], dtype=float)
        med = float(np.median(v))
        out = max(out, float(v.max()) / med if med > 0 else (0.0 if v.max() == 0 else math.inf))
    return out


def _lemma_table(est):
    return {"C1": est.C1, "C2": est.C2, "C3": est.C3, "C": est.C, "n_grid": list(est.n_grid),
            "per_n": {k: list(v) for k, v in est.per_n.items()}}


def _run_coupling(cfg: ExperimentConfig, stream):
    tr, target = cfg.triplet, cfg.target
    k = int(cfg.options["k"])
    beta = float(cfg.options["beta"])
    ls = [int(l) for l in cfg.n_grid]
    if any(l >= k for l in ls):
        raise ConfigError([f"n_grid: every l must be below options.k = {k}"])
    plan = derive_norming(tr, target, n_values=sorted(set(ls) | {k}))
    cond_a = check_condition_A(plan.s, beta, plan.n)
    means = coupling_decay(lambda h, st: cp_path(tr, h, st), plan, [(l, k) for l in ls], cfg.replicates, stream)
    slope = fit_loglog_slope([r for r, _ in means], [m for _, m in means])
    thr = beta / 2.0 - cfg.tolerances["slope_margin"]
    rules = [Rule("condition_A", float(cond_a), 1.0, cond_a), Rule("loglog_slope", slope, thr, slope >= thr)]
    dist = [(l, "mean_rho1", m) for l, (_, m) in zip(ls, means)]
    tables = {"k": k, "pairs": [{"l": l, "ratio": r, "mean_rho1": m} for l, (r, m) in zip(ls, means)],
              "slope": slope}
    return tables, rules, dist


RUNNERS = {
    "theorem1-compound": _run_marginal_scenario,
    "theorem2-stable": _run_marginal_scenario,
    "theorem3-normal": _run_marginal_scenario,
    "theorem4-gaussian": _run_gaussian,
    "corollary2-array": _run_array,
    "theorem5-asclt": _run_asclt,
    "lemma1-constants": _run_lemma1,
    "coupling-decay": _run_coupling,
}


def run_experiment(cfg: ExperimentConfig, out_dir=None) -> Report:
    """Run the configured scenario; write ``report.json`` and ``distances.csv`` when ``out_dir`` is given."""
    t0 = time.perf_counter()
    stream = RngStream(cfg.seed)
    tables, rules, dist = RUNNERS[cfg.scenario](cfg, stream)
    report = Report(cfg.scenario, cfg.seed, cfg.to_dict(), tables, rules, dist)
    if out_dir is not None:
        report.write(out_dir, time.perf_counter() - t0)
    return report
