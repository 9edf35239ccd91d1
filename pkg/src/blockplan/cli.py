"""Command-line entry point: ``blockplan <subcommand> ...``.

Exit codes: 0 success, 1 validation or usage error, 2 internal error.
Tables and reports go to files or stdout; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import analysis, pipeline, stimuli
from .assign import assign_blocks
from .errors import BlockplanError, CapacityError, SingularFitError, ValidationError
from .physics import SimConfig, simulate, write_sim_trace_csv
from .risk import DEFAULT_N, DEFAULT_SIGMA, estimate_risk, write_risk_csv
from .scene import load_scene, load_trials
from .symplan import plan_symbolic
from .trajectory import DEFAULT_DURATION, DEFAULT_M, DEFAULT_STEPS, plan_trajectories, write_trace_csv


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; we want 1
    def error(self, message):
        raise _UsageError(f"{self.prog}: error: {message}\n{self.format_usage()}")


def _sigma(text):
    v = float(text)
    if not 0 < v < 0.5:
        raise argparse.ArgumentTypeError("sigma must lie in (0, 0.5)")
    return v


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _positive_float(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="blockplan", description="Effort and risk models for block-construction tasks.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, sigma=False, n=False, m=False, jobs=False):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("-o", "--output", help="output file (default: stdout)")
        if sigma:
            sp.add_argument("--sigma", type=_sigma, default=DEFAULT_SIGMA)
        if n:
            sp.add_argument("--n", type=_positive_int, default=DEFAULT_N, help="risk simulations")
        if m:
            sp.add_argument("--m", type=_positive_int, default=DEFAULT_M, help="scatter samples")
        if jobs:
            sp.add_argument("--jobs", type=_positive_int, default=None,
                            help="worker processes (default: $BLOCKPLAN_JOBS or all cores)")

    sp = sub.add_parser("estimate", help="E/R table for a trial set")
    sp.add_argument("trials")
    common(sp, sigma=True, n=True, m=True, jobs=True)

    sp = sub.add_parser("risk", help="fall probability of one scene")
    sp.add_argument("scene")
    common(sp, sigma=True, n=True, jobs=True)
    sp.add_argument("--trace", help="per-simulation CSV (trial, fell, max_displacement)")

    sp = sub.add_parser("plan", help="symbolic plan and transport traces for a trial")
    sp.add_argument("trial")
    common(sp)
    sp.add_argument("--id", help="trial id when the file holds several")
    sp.add_argument("--steps", type=_positive_int, default=DEFAULT_STEPS)
    sp.add_argument("--duration", type=_positive_float, default=DEFAULT_DURATION)
    sp.add_argument("--trace", help="trajectory CSV")

    sp = sub.add_parser("simulate", help="settle a scene and report whether it fell")
    sp.add_argument("scene")
    common(sp)
    sp.add_argument("--duration", type=_positive_float, default=SimConfig.max_sim_time,
                    help="maximum simulated seconds")
    sp.add_argument("--trace", help="per-step CSV of poses and velocities")

    sp = sub.add_parser("fit", help="full and lesioned fits of an E/R table to human data")
    sp.add_argument("table")
    sp.add_argument("human")
    common(sp, n=True, jobs=True)
    sp.add_argument("--grid", help="sigma grid lo:hi:step (needs --trials)")
    sp.add_argument("--trials", help="trial set used to recompute risk over the grid")
    sp.add_argument("--csv", help="also write a flat CSV of the fits")

    sp = sub.add_parser("compare", help="bootstrap model comparison across datasets")
    sp.add_argument("table")
    sp.add_argument("human", nargs="+")
    common(sp)
    sp.add_argument("--b", type=_positive_int, default=analysis.DEFAULT_B, help="bootstrap resamples")
    sp.add_argument("--csv", help="also write a flat CSV of the fits")

    sp = sub.add_parser("gen-stimuli", help="write the bundled trial set")
    sp.add_argument("outdir")
    sp.add_argument("--seed", type=int, default=0, help="accepted for uniformity; the set is fixed")
    return p


def _emit(text: str, path) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def cmd_estimate(args) -> int:
    trials = load_trials(args.trials)
    suite = pipeline.run_suite(trials, args.sigma, args.n, args.m, args.seed, jobs=args.jobs)
    _emit(pipeline.table_text(suite.results), args.output)
    for tid, (kind, msg) in suite.failures.items():
        print(f"blockplan: trial {tid} failed ({kind}): {msg}", file=sys.stderr)
    return 0 if suite.ok else 1


def cmd_risk(args) -> int:
    est = estimate_risk(load_scene(args.scene), args.sigma, args.n, args.seed, jobs=args.jobs)
    if args.trace:
        write_risk_csv(est, args.trace)
    _emit(_json({"risk": est.risk, "N": est.N, "sigma": est.sigma,
                 "fell_count": est.fell_count, "seed": est.seed}), args.output)
    return 0


def _pick_trial(path, trial_id):
    trials = load_trials(path)
    if trial_id is None:
        if len(trials) != 1:
            raise ValidationError(f"{path} holds {len(trials)} trials; choose one with --id")
        return trials[0]
    for t in trials:
        if t.id == trial_id:
            return t
    raise ValidationError(f"no trial {trial_id!r} in {path}")


def cmd_plan(args) -> int:
    trial = _pick_trial(args.trial, args.id)
    a, b = trial.realize(args.seed)
    assignment = assign_blocks(a, b)
    plan = plan_symbolic(a, b, assignment)
    trajs = plan_trajectories(a, b, plan, args.duration, args.steps)
    if args.trace:
        write_trace_csv(trajs, args.trace)
    _emit(_json({"trial": trial.id,
                 "assignment": dict(assignment.pairs),
                 "assignment_distance": assignment.total_distance,
                 "actions": [x.to_dict() for x in plan.actions],
                 "peak_speeds": [t.peak_speed for _, t in trajs]}), args.output)
    return 0


def cmd_simulate(args) -> int:
    scene = load_scene(args.scene)
    out = simulate(scene, SimConfig(max_sim_time=args.duration), trace=bool(args.trace))
    if args.trace:
        write_sim_trace_csv(scene, out, args.trace)
    _emit(_json({"fell": out.fell, "max_displacement": out.max_displacement,
                 "settled": out.settled, "elapsed": out.elapsed, "steps": out.steps}), args.output)
    return 0


def _fit_rows(name, fits, sigma=None, boot=None):
    rows = []
    for model, f in fits.items():
        row = {"dataset": name, "model": model, "sigma": "" if sigma is None else sigma,
               "beta0": f.beta0, "beta1": f.beta1, "beta2": f.beta2, "rmse": f.rmse,
               "pearson_r": f.pearson_r}
        if boot is not None:
            row.update(boot_median=boot.median[model], boot_lower=boot.lower[model],
                       boot_upper=boot.upper[model])
        rows.append(row)
    return rows


def cmd_fit(args) -> int:
    if args.grid and not args.trials:
        raise ValidationError("--grid needs --trials to recompute risk per sigma")
    table = pipeline.read_table(args.table)
    ds = analysis.HumanDataset.from_csv(args.human).aligned(table.trials)
    y = analysis.zscore_and_average(ds)
    E, R = np.array(table.effort), np.array(table.risk)
    fits = analysis.fit_all(E, R, y)
    grid = None
    if args.grid:
        trials = {t.id: t for t in load_trials(args.trials)}
        missing = [t for t in table.trials if t not in trials]
        if missing:
            raise ValidationError(f"trials missing from {args.trials}: {missing}")
        ordered = [trials[t] for t in table.trials]
        by_sigma = analysis.risk_table(ordered, analysis.parse_grid(args.grid), args.n, args.seed,
                                       jobs=args.jobs)
        grid = analysis.grid_search_table(E, by_sigma, y)
        fits = analysis.fit_all(E, by_sigma[grid.sigma_star], y, grid.sigma_star)
    report = analysis.fit_report(fits, grid)
    report["dataset"] = ds.name
    if args.csv:
        analysis.write_fit_csv(_fit_rows(ds.name, fits, grid.sigma_star if grid else None), args.csv)
    _emit(_json(report), args.output)
    return 0


def cmd_compare(args) -> int:
    table = pipeline.read_table(args.table)
    E, R = np.array(table.effort), np.array(table.risk)
    reports, rows = {}, []
    for path in args.human:
        ds = analysis.HumanDataset.from_csv(path).aligned(table.trials)
        fits = analysis.fit_all(E, R, analysis.zscore_and_average(ds))
        preds = {m: f.predictions for m, f in fits.items()}
        boot = analysis.bootstrap_compare(ds, preds, args.b, args.seed)
        reports[ds.name] = analysis.fit_report(fits, boot=boot)
        rows += _fit_rows(ds.name, fits, boot=boot)
    if args.csv:
        analysis.write_fit_csv(rows, args.csv)
    _emit(_json(reports), args.output)
    return 0


def cmd_gen_stimuli(args) -> int:
    from pathlib import Path

    path = stimuli.write_suite(Path(args.outdir) / "suite.json")
    print(f"wrote {path}", file=sys.stderr)
    return 0


# problems with the caller's input; anything else is reported as internal
USER_ERRORS = (ValidationError, SingularFitError, CapacityError, OSError, ValueError)

COMMANDS = {"estimate": cmd_estimate, "risk": cmd_risk, "plan": cmd_plan, "simulate": cmd_simulate,
            "fit": cmd_fit, "compare": cmd_compare, "gen-stimuli": cmd_gen_stimuli}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except USER_ERRORS as exc:
        print(f"blockplan: {exc}", file=sys.stderr)
        return 1
    except BlockplanError as exc:
        print(f"blockplan: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"blockplan: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
