"""Regression of human difficulty judgements on effort and risk.

The full model predicts a trial's z-scored mean response as::

    y = b0 + b1 * E * (1 - R) + b2 * E * R

so effort spent on a structure that is likely to fall can be weighted
differently from effort spent on a safe one.  Two lesioned fits use E alone
or R alone.  Models are compared by bootstrapping over participants.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from . import rng
from .errors import EmptyDatasetError, SingularFitError, ValidationError

RANK_TOL = 1e-10
DEFAULT_B = 1000
MAX_REDRAWS = 10_000


# ---------------------------------------------------------------------------
# data


@dataclass(frozen=True)
class HumanDataset:
    name: str
    participants: tuple[str, ...]
    trials: tuple[str, ...]
    responses: np.ndarray  # (participants, trials)

    def __post_init__(self):
        r = np.asarray(self.responses, dtype=float)
        if r.shape != (len(self.participants), len(self.trials)):
            raise ValidationError("responses must be participants x trials")
        if len(self.trials) < 2:
            raise ValidationError(f"dataset {self.name!r} needs at least 2 trials")
        if len(self.participants) < 1:
            raise EmptyDatasetError(f"dataset {self.name!r} has no participants")
        if not np.all(np.isfinite(r)):
            raise ValidationError(f"dataset {self.name!r} has non-finite responses")
        object.__setattr__(self, "responses", r)

    @classmethod
    def from_rows(cls, name, rows) -> "HumanDataset":
        """Build from ``(participant, trial, response)`` triples.

        Participants missing any trial are dropped with a warning.
        """
        table: dict[str, dict[str, float]] = {}
        trials: dict[str, None] = {}
        for p, t, v in rows:
            try:
                val = float(v)
            except (TypeError, ValueError):
                raise ValidationError(f"response {v!r} of {p!r} on {t!r} is not a number") from None
            if not math.isfinite(val):
                raise ValidationError(f"response of {p!r} on {t!r} is not finite")
            if t in table.setdefault(p, {}):
                raise ValidationError(f"duplicate response for participant {p!r}, trial {t!r}")
            table[p][t] = val
            trials.setdefault(t)
        trial_ids = tuple(trials)
        keep = []
        for p, resp in table.items():
            if len(resp) == len(trial_ids):
                keep.append(p)
            else:
                warnings.warn(f"{name}: participant {p!r} lacks {len(trial_ids) - len(resp)} "
                              f"trial(s); dropped", stacklevel=2)
        if not keep:
            raise EmptyDatasetError(f"dataset {name!r} has no complete participant")
        mat = np.array([[table[p][t] for t in trial_ids] for p in keep])
        return cls(name, tuple(keep), trial_ids, mat)

    @classmethod
    def from_csv(cls, path, name: str | None = None) -> "HumanDataset":
        """Read a ``participant,trial,response`` CSV."""
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            need = {"participant", "trial", "response"}
            if reader.fieldnames is None or not need <= set(reader.fieldnames):
                raise ValidationError(f"{path}: header must contain participant,trial,response")
            rows = [(r["participant"], r["trial"], r["response"]) for r in reader]
        if name is None:
            name = str(path).rsplit("/", 1)[-1].removesuffix(".csv")
        return cls.from_rows(name, rows)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["participant", "trial", "response"])
            for p, row in zip(self.participants, self.responses):
                for t, v in zip(self.trials, row):
                    w.writerow([p, t, repr(float(v))])

    def aligned(self, trial_ids) -> "HumanDataset":
        """Columns reordered to ``trial_ids``; every id must be present."""
        index = {t: k for k, t in enumerate(self.trials)}
        missing = [t for t in trial_ids if t not in index]
        if missing:
            raise ValidationError(f"dataset {self.name!r} lacks trials {missing}")
        cols = [index[t] for t in trial_ids]
        return HumanDataset(self.name, self.participants, tuple(trial_ids), self.responses[:, cols])


def zscore_rows(responses: np.ndarray, name: str = "dataset") -> np.ndarray:
    """Standardise each row (population std); constant rows are dropped."""
    r = np.asarray(responses, dtype=float)
    std = r.std(axis=1)
    keep = std > 0
    if not np.all(keep):
        warnings.warn(f"{name}: dropped {int((~keep).sum())} participant(s) with identical "
                      f"responses on all trials", stacklevel=2)
    if not np.any(keep):
        raise EmptyDatasetError(f"{name}: every participant gave identical responses")
    r = r[keep]
    return (r - r.mean(axis=1, keepdims=True)) / std[keep, None]


def zscore_and_average(dataset: HumanDataset) -> np.ndarray:
    """Per-trial mean of the participants' z-scored responses."""
    return zscore_rows(dataset.responses, dataset.name).mean(axis=0)


# ---------------------------------------------------------------------------
# fits


@dataclass(frozen=True)
class ModelFit:
    model: str  # "full" | "effort" | "risk"
    beta0: float
    beta1: float
    beta2: float | None
    sigma: float | None
    rmse: float
    pearson_r: float
    predictions: np.ndarray
    stderr: tuple[float, ...] = ()

    @property
    def coefficients(self) -> tuple[float, ...]:
        b = (self.beta0, self.beta1)
        return b if self.beta2 is None else b + (self.beta2,)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["predictions"] = [float(x) for x in self.predictions]
        d["stderr"] = [float(x) for x in self.stderr]
        return d


def pearson(a, b) -> float:
    """Pearson correlation; 0 when either side is constant."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    da, db = a - a.mean(), b - b.mean()
    den = math.sqrt(float(da @ da) * float(db @ db))
    if den == 0.0:
        return 0.0
    return float(np.clip((da @ db) / den, -1.0, 1.0))


def _vector(x, what):
    v = np.asarray(x, dtype=float).ravel()
    if not np.all(np.isfinite(v)):
        raise ValidationError(f"{what} contains non-finite values")
    return v


def _ols(model, columns, y, sigma=None) -> ModelFit:
    y = _vector(y, "y")
    cols = [_vector(c, "regressor") for c in columns]
    n = len(y)
    if n < 3 or any(len(c) != n for c in cols):
        raise ValidationError("regression needs equal-length vectors of at least 3 trials")
    X = np.column_stack([np.ones(n), *cols])
    s = np.linalg.svd(X, compute_uv=False)
    if s[-1] < RANK_TOL * s[0]:
        raise SingularFitError(f"{model} model: design matrix is rank deficient "
                               f"(singular values {s[-1]:.3g} / {s[0]:.3g})")
    beta, *_ = np.linalg.lstsq(X, y, rcond=None)
    pred = X @ beta
    resid = y - pred
    rss = float(resid @ resid)
    dof = n - X.shape[1]
    if dof > 0:
        cov = rss / dof * np.linalg.inv(X.T @ X)
        se = tuple(float(math.sqrt(max(c, 0.0))) for c in np.diag(cov))
    else:
        se = tuple(math.nan for _ in beta)
    return ModelFit(
        model=model,
        beta0=float(beta[0]),
        beta1=float(beta[1]),
        beta2=float(beta[2]) if len(beta) > 2 else None,
        sigma=sigma,
        rmse=math.sqrt(rss / n),
        pearson_r=pearson(pred, y),
        predictions=pred,
        stderr=se,
    )


def fit_full(E, R, y, sigma: float | None = None) -> ModelFit:
    """OLS of ``y`` on ``[1, E(1-R), E R]``."""
    E = _vector(E, "E")
    R = _vector(R, "R")
    if len(E) != len(R):
        raise ValidationError("E and R differ in length")
    return _ols("full", [E * (1.0 - R), E * R], y, sigma)


def fit_effort_only(E, y) -> ModelFit:
    return _ols("effort", [E], y)


def fit_risk_only(R, y, sigma: float | None = None) -> ModelFit:
    return _ols("risk", [R], y, sigma)


def fit_all(E, R, y, sigma: float | None = None) -> dict[str, ModelFit]:
    return {"full": fit_full(E, R, y, sigma), "effort": fit_effort_only(E, y),
            "risk": fit_risk_only(R, y, sigma)}


# ---------------------------------------------------------------------------
# sigma grid


def default_grid() -> list[float]:
    """0.05, 0.055, ..., 0.1."""
    return [round(0.05 + 0.005 * k, 3) for k in range(11)]


def parse_grid(text: str) -> list[float]:
    """``lo:hi:step``, inclusive of ``hi`` when ``step`` divides the span."""
    try:
        lo, hi, step = (float(x) for x in text.split(":"))
    except ValueError:
        raise ValidationError(f"grid must look like lo:hi:step, got {text!r}") from None
    if not (step > 0 and hi >= lo):
        raise ValidationError(f"bad grid {text!r}: need step > 0 and hi >= lo")
    count = int(math.floor((hi - lo) / step + 1e-9))
    return [round(lo + k * step, 10) for k in range(count + 1)]


@dataclass(frozen=True)
class GridResult:
    sigma_star: float
    table: tuple[tuple[float, float], ...]  # (sigma, rmse)
    fits: dict = field(default_factory=dict)  # sigma -> ModelFit


def grid_search_table(E, risk_by_sigma: dict, y) -> GridResult:
    """Fit the full model at every sigma of a precomputed risk table.

    ``risk_by_sigma`` maps sigma to the per-trial R vector.  The smallest
    rmse wins; ties go to the smaller sigma.
    """
    if not risk_by_sigma:
        raise ValidationError("sigma grid is empty")
    table, fits = [], {}
    for sigma in sorted(risk_by_sigma):
        try:
            fit = fit_full(E, risk_by_sigma[sigma], y, sigma)
        except SingularFitError as exc:
            raise SingularFitError(f"sigma={sigma}: {exc}") from exc
        fits[sigma] = fit
        table.append((float(sigma), fit.rmse))
    best = min(table, key=lambda row: (row[1], row[0]))
    return GridResult(best[0], tuple(table), fits)


def risk_table(trials, grid, N: int, seed: int, config=None, jobs: int | None = 1) -> dict:
    """Per-trial R for every sigma of ``grid`` (trial seeds as in the pipeline)."""
    from .pipeline import trial_seed_for, target_scene
    from .risk import estimate_risk

    out = {}
    for sigma in grid:
        out[float(sigma)] = np.array([
            estimate_risk(target_scene(t, trial_seed_for(seed, k)), sigma, N,
                          trial_seed_for(seed, k), config, jobs).risk
            for k, t in enumerate(trials)])
    return out


def effort_vector(trials, M: int, seed: int) -> np.ndarray:
    from .pipeline import trial_seed_for
    from .trajectory import estimate_effort

    return np.array([estimate_effort(t, M, trial_seed_for(seed, k)).sample_mean
                     for k, t in enumerate(trials)])


def grid_search_sigma(trials, dataset: HumanDataset, grid=None, N: int = 100, M: int = 30,
                      seed: int = 0, config=None, jobs: int | None = 1) -> GridResult:
    """Pick the sigma whose risk values let the full model fit ``dataset`` best.

    E does not depend on sigma and is computed once.
    """
    grid = default_grid() if grid is None else list(grid)
    if not grid:
        raise ValidationError("sigma grid is empty")
    y = zscore_and_average(dataset.aligned([t.id for t in trials]))
    E = effort_vector(trials, M, seed)
    return grid_search_table(E, risk_table(trials, grid, N, seed, config, jobs), y)


def grid_search_datasets(E, risk_by_sigma: dict, datasets) -> dict:
    """Per-dataset argmins plus a pooled argmin (root mean of squared rmse)."""
    if not datasets:
        raise ValidationError("no datasets given")
    results = {ds.name: grid_search_table(E, risk_by_sigma, y) for ds, y in
               ((d, zscore_and_average(d)) for d in datasets)}
    pooled = []
    for k, sigma in enumerate(sorted(risk_by_sigma)):
        ms = np.mean([r.table[k][1] ** 2 for r in results.values()])
        pooled.append((float(sigma), float(math.sqrt(ms))))
    best = min(pooled, key=lambda row: (row[1], row[0]))
    return {"per_dataset": results, "pooled": GridResult(best[0], tuple(pooled))}


# ---------------------------------------------------------------------------
# bootstrap


@dataclass(frozen=True)
class BootstrapReport:
    dataset: str
    models: tuple[str, ...]
    B: int
    median: dict
    lower: dict  # 2.5th percentile
    upper: dict  # 97.5th percentile
    exceedance: dict  # (a, b) -> P(r_a > r_b), ties count half
    redrawn: int
    samples: np.ndarray  # (B, models)

    def to_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "B": self.B,
            "redrawn": self.redrawn,
            "models": {m: {"median": self.median[m], "lower": self.lower[m],
                           "upper": self.upper[m]} for m in self.models},
            "exceedance": {f"{a}>{b}": p for (a, b), p in self.exceedance.items()},
        }


def bootstrap_compare(dataset: HumanDataset, predictions: dict, B: int = DEFAULT_B,
                      seed: int = 0) -> BootstrapReport:
    """Resample participants with replacement and re-correlate every model.

    Resample ``b`` draws from ``stream(seed, BOOTSTRAP, b)``; a resample whose
    trial means have zero variance is redrawn from the next sub-stream and
    counted in ``redrawn``.
    """
    if int(B) != B or B < 1:
        raise ValidationError("B must be a positive integer")
    B = int(B)
    z = zscore_rows(dataset.responses, dataset.name)
    n_trials = z.shape[1]
    models = tuple(predictions)
    if not models:
        raise ValidationError("no model predictions given")
    preds = []
    for m in models:
        p = _vector(predictions[m], f"predictions of {m!r}")
        if len(p) != n_trials:
            raise ValidationError(f"predictions of {m!r} have {len(p)} values, expected {n_trials}")
        preds.append(p - p.mean())
    preds = np.array(preds)
    pnorm = np.sqrt((preds ** 2).sum(axis=1))
    P = z.shape[0]
    samples = np.empty((B, len(models)))
    redrawn = 0
    for b in range(B):
        for attempt in range(MAX_REDRAWS):
            gen = rng.stream(seed, rng.BOOTSTRAP, b, attempt)
            idx = gen.integers(0, P, size=P)
            mean = z[idx].mean(axis=0)
            c = mean - mean.mean()
            cn = math.sqrt(float(c @ c))
            if cn > 1e-12:
                break
            redrawn += 1
        else:
            raise EmptyDatasetError(f"{dataset.name}: every resample is degenerate")
        with np.errstate(invalid="ignore", divide="ignore"):
            r = np.where(pnorm > 0, (preds @ c) / (pnorm * cn), 0.0)
        samples[b] = np.clip(r, -1.0, 1.0)
    med = {m: float(np.median(samples[:, k])) for k, m in enumerate(models)}
    lo = {m: float(np.percentile(samples[:, k], 2.5)) for k, m in enumerate(models)}
    hi = {m: float(np.percentile(samples[:, k], 97.5)) for k, m in enumerate(models)}
    exc = {}
    for i, a in enumerate(models):
        for j, b in enumerate(models):
            if i != j:
                d = samples[:, i] - samples[:, j]
                exc[(a, b)] = float(((d > 0).sum() + 0.5 * (d == 0).sum()) / B)
    return BootstrapReport(dataset.name, models, B, med, lo, hi, exc, redrawn, samples)


# ---------------------------------------------------------------------------
# reports


def fit_report(fits: dict, grid: GridResult | None = None,
               boot: BootstrapReport | None = None) -> dict:
    out = {"fits": {k: f.to_dict() for k, f in fits.items()}}
    if grid is not None:
        out["grid"] = {"sigma_star": grid.sigma_star,
                       "rmse": [{"sigma": s, "rmse": r} for s, r in grid.table]}
    if boot is not None:
        out["bootstrap"] = boot.to_dict()
    return out


def write_json(obj, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_fit_csv(rows, path) -> None:
    """Flat table: dataset, model, coefficients, rmse, r and bootstrap bounds."""
    cols = ["dataset", "model", "sigma", "beta0", "beta1", "beta2", "rmse", "pearson_r",
            "boot_median", "boot_lower", "boot_upper"]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=cols)
        w.writeheader()
        for row in rows:
            w.writerow({c: row.get(c, "") for c in cols})
