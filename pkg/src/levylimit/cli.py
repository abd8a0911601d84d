"""Command line entry point: ``levylimit {simulate,rescale,verify,asclt}``."""
import argparse
import json
import os
import sys
import time

from .asclt import EvalAt, build_log_average
from .config import SCENARIOS, validate_config
from .errors import ConfigError, LevyLimitError
from .levy_sim import sample_levy_path
from .rescale import derive_norming, rescale_path
from .rng import RngStream
from .scenarios import cp_path, run_experiment
from .serialize import triplet_from_dict, write_trace_csv


def _read_doc(path):
    if path is None:
        return {}
    with open(path) as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError([f"{path}: not valid JSON ({exc})"]) from exc


def _overrides(doc, args):
    doc = dict(doc)
    if args.seed is not None:
        doc["seed"] = args.seed
    if args.out is not None:
        doc["out"] = args.out
    if args.threads is not None:
        doc["threads"] = args.threads
    return doc


def _load(args, scenario=None, default_scenario="theorem3-normal"):
    doc = _overrides(_read_doc(args.config), args)
    if scenario is not None:
        if doc.get("scenario", scenario) != scenario:
            raise ConfigError([f"scenario: config says {doc['scenario']!r} but {scenario!r} was requested"])
        doc["scenario"] = scenario
    doc.setdefault("scenario", default_scenario)
    return validate_config(doc)


def _print_report(report, stream=None):
    stream = stream or sys.stdout
    for r in report.rules:
        tag = "PASS" if r.passed else "FAIL"
        opt = "" if r.required else " (informational)"
        print(f"{tag}  {report.scenario}: {r.name} = {r.value:.6g} (threshold {r.threshold:.6g}){opt}", file=stream)
    print(f"{'PASS' if report.passed else 'FAIL'}  {report.scenario}", file=stream)


def cmd_simulate(args):
    doc = _overrides(_read_doc(args.config), args)
    if "scenario" in doc:
        cfg = validate_config(doc)
        triplet, seed, out = cfg.triplet, cfg.seed, cfg.out
    else:
        cfg = validate_config({k: v for k, v in doc.items() if k != "triplet"} | {"scenario": "theorem3-normal"})
        triplet = triplet_from_dict(doc["triplet"]) if "triplet" in doc else cfg.triplet
        seed, out = cfg.seed, cfg.out
    if triplet is None:
        raise ConfigError(["triplet: required for simulate"])
    os.makedirs(out, exist_ok=True)
    stream = RngStream(seed)
    for i in range(args.n_paths):
        p = sample_levy_path(triplet, args.horizon, args.grid_step, args.jump_cutoff, stream.child(i))
        p.to_csv(os.path.join(out, f"path_{i:04d}.csv"))
        p.jumps_to_csv(os.path.join(out, f"jumps_{i:04d}.csv"))
    print(f"wrote {args.n_paths} path(s) to {out}")
    return 0


def cmd_rescale(args):
    cfg = _load(args)
    n_values = sorted(set(args.n)) if args.n else list(cfg.n_grid)
    plan = derive_norming(cfg.triplet, cfg.target, n_values=n_values)
    horizon = float(plan.s[-1])
    v = cp_path(cfg.triplet, horizon, RngStream(cfg.seed).child(0))
    os.makedirs(cfg.out, exist_ok=True)
    with open(os.path.join(cfg.out, "plan.json"), "w") as fh:
        fh.write(plan.to_json() + "\n")
    for n in n_values:
        s, a, b = plan.at(n)
        x = rescale_path(v, s, a, b, grid_points=args.grid_points)
        x.to_csv(os.path.join(cfg.out, f"x_{n}.csv"))
    print(f"wrote X_n for n in {n_values} to {cfg.out}")
    return 0


def cmd_verify(args):
    cfg = _load(args, scenario=args.scenario)
    t0 = time.perf_counter()
    report = run_experiment(cfg, cfg.out)
    _print_report(report)
    print(f"report written to {cfg.out} in {time.perf_counter() - t0:.1f} s")
    return 0 if report.passed else 1


def cmd_asclt(args):
    cfg = _load(args, scenario="theorem5-asclt")
    report = run_experiment(cfg, cfg.out)
    # the log-average measure of the first trajectory, for plotting
    n_top = int(cfg.n_grid[-1])
    plan = derive_norming(cfg.triplet, cfg.target, n_max=n_top)
    v = cp_path(cfg.triplet, plan.s[-1], RngStream(cfg.seed).child(0))
    build_log_average(v, plan, EvalAt(float(cfg.options["functional"][5:])), n_top).to_csv(
        os.path.join(cfg.out, "measure_0000.csv"))
    for row in report.tables["trajectories"]:
        write_trace_csv(os.path.join(cfg.out, f"trace_{row['trajectory']:04d}.csv"),
                        zip(cfg.n_grid, row["distances"]))
    _print_report(report)
    return 0 if report.passed else 1


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON experiment config")
    common.add_argument("--seed", type=int, help="override the config seed")
    common.add_argument("--out", help="output directory")
    common.add_argument("--threads", type=int, help="worker threads for replicates")

    p = argparse.ArgumentParser(prog="levylimit", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", parents=[common], help="sample Levy paths and write them as CSV")
    s.add_argument("--n-paths", type=int, default=1)
    s.add_argument("--horizon", type=float, default=1.0)
    s.add_argument("--grid-step", type=float, default=0.01)
    s.add_argument("--jump-cutoff", type=float, default=0.01)
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("rescale", parents=[common], help="write rescaled paths X_n cut from one trajectory")
    s.add_argument("--n", type=int, nargs="*", help="indices n (default: the config n_grid)")
    s.add_argument("--grid-points", type=int, default=1025)
    s.set_defaults(func=cmd_rescale)

    s = sub.add_parser("verify", parents=[common], help="run a verification scenario")
    s.add_argument("scenario", choices=SCENARIOS)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("asclt", parents=[common], help="log-average run along single trajectories")
    s.set_defaults(func=cmd_asclt)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        for e in exc.errors:
            print(f"config error: {e}", file=sys.stderr)
        return 2
    except LevyLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
