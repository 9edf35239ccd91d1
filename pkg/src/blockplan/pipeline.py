"""Effort and risk for whole trial sets, and the E/R table that links them to fits."""

from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import rng
from .errors import BlockplanError, ValidationError
from .physics import SimConfig
from .risk import DEFAULT_N, DEFAULT_SIGMA, RiskEstimate, estimate_risk, resolve_jobs
from .scene import Scene, TrialSpec
from .trajectory import DEFAULT_M, EffortEstimate, estimate_effort

TABLE_HEADER = ["trial", "effort_mean", "effort_std", "risk", "plan_length", "assignment_distance"]


@dataclass(frozen=True)
class TrialResult:
    trial_id: str
    effort: EffortEstimate
    risk: RiskEstimate
    plan_length: int
    assignment_distance: float

    def row(self) -> list[str]:
        return [self.trial_id, repr(self.effort.sample_mean), repr(self.effort.sample_std),
                repr(self.risk.risk), str(self.plan_length), repr(self.assignment_distance)]


@dataclass(frozen=True)
class SuiteResult:
    results: tuple[TrialResult, ...]
    failures: dict = field(default_factory=dict)  # trial id -> (error class name, message)

    @property
    def ok(self) -> bool:
        return not self.failures


def trial_seed_for(seed: int, index: int) -> int:
    """Seed of the ``index``-th trial of a suite run with ``seed``."""
    return rng.derive_seed(seed, rng.TRIAL, index)


def target_scene(trial: TrialSpec, seed: int) -> Scene:
    """State B as simulated for risk (bucket trials realise it per seed)."""
    return trial.realize(seed)[1]


def run_trial(trial: TrialSpec, sigma: float = DEFAULT_SIGMA, N: int = DEFAULT_N,
              M: int = DEFAULT_M, seed: int = 0, config: SimConfig | None = None,
              jobs: int | None = 1) -> TrialResult:
    """Effort over ``M`` scatter samples and risk over ``N`` perturbed copies of B."""
    try:
        effort = estimate_effort(trial, M, seed)
        risk = estimate_risk(target_scene(trial, seed), sigma, N, seed, config, jobs)
    except BlockplanError as exc:
        raise type(exc)(f"trial {trial.id!r}: {exc}") from exc
    return TrialResult(trial.id, effort, risk, effort.plan_lengths[0],
                       effort.assignment_distances[0])


def _suite_task(args):
    trial, sigma, N, M, seed, config = args
    try:
        return run_trial(trial, sigma, N, M, seed, config, jobs=1)
    except BlockplanError as exc:
        return (type(exc).__name__, str(exc))


def run_suite(trials, sigma: float = DEFAULT_SIGMA, N: int = DEFAULT_N, M: int = DEFAULT_M,
              seed: int = 0, config: SimConfig | None = None, jobs: int | None = 1,
              table_path=None) -> SuiteResult:
    """Run every trial; failures are recorded and the rest carry on.

    Trial ``k`` uses seed ``trial_seed_for(seed, k)``, so the output does
    not depend on ``jobs``.  If ``table_path`` is given the E/R table is
    written there.
    """
    trials = list(trials)
    ids = [t.id for t in trials]
    dup = sorted({i for i in ids if ids.count(i) > 1})
    if dup:
        raise ValidationError(f"duplicate trial ids: {dup}")
    tasks = [(t, sigma, N, M, trial_seed_for(seed, k), config) for k, t in enumerate(trials)]
    jobs = min(resolve_jobs(jobs), max(1, len(tasks)))
    if jobs == 1:
        outs = [_suite_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outs = list(pool.map(_suite_task, tasks))
    results, failures = [], {}
    for t, out in zip(trials, outs):
        if isinstance(out, TrialResult):
            results.append(out)
        else:
            failures[t.id] = out
    suite = SuiteResult(tuple(results), failures)
    if table_path is not None:
        write_table(suite.results, table_path)
    return suite


def table_text(results) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TABLE_HEADER)
    for r in results:
        w.writerow(r.row())
    return buf.getvalue()


def write_table(results, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(table_text(results))


@dataclass(frozen=True)
class EffortRiskTable:
    trials: tuple[str, ...]
    effort: tuple[float, ...]
    effort_std: tuple[float, ...]
    risk: tuple[float, ...]
    plan_length: tuple[int, ...]
    assignment_distance: tuple[float, ...]


def read_table(path) -> EffortRiskTable:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != TABLE_HEADER:
            raise ValidationError(f"{path}: expected header {','.join(TABLE_HEADER)}")
        rows = list(reader)
    try:
        return EffortRiskTable(
            tuple(r["trial"] for r in rows),
            tuple(float(r["effort_mean"]) for r in rows),
            tuple(float(r["effort_std"]) for r in rows),
            tuple(float(r["risk"]) for r in rows),
            tuple(int(r["plan_length"]) for r in rows),
            tuple(float(r["assignment_distance"]) for r in rows),
        )
    except ValueError as exc:
        raise ValidationError(f"{path}: {exc}") from exc
