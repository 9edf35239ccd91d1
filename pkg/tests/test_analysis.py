import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from blockplan.analysis import (HumanDataset, bootstrap_compare, default_grid, fit_all,
                                fit_effort_only, fit_full, fit_report, fit_risk_only,
                                grid_search_datasets, grid_search_table, parse_grid, pearson,
                                write_fit_csv, write_json, zscore_and_average, zscore_rows)
from blockplan.errors import EmptyDatasetError, SingularFitError, ValidationError


def dataset(responses, name="d"):
    r = np.asarray(responses, dtype=float)
    return HumanDataset(name, tuple(f"p{i}" for i in range(r.shape[0])),
                        tuple(f"t{j}" for j in range(r.shape[1])), r)


# ---------------------------------------------------------------- z-scoring

def test_zscore_single_participant():
    z = zscore_and_average(dataset([[1, 2, 3]]))
    assert np.allclose(z, [-1.224744871391589, 0.0, 1.224744871391589], atol=1e-12)


def test_constant_responder_dropped():
    with pytest.warns(UserWarning, match="identical"):
        z = zscore_and_average(dataset([[1, 2, 3], [5, 5, 5]]))
    assert np.allclose(z, [-1.2247449, 0, 1.2247449])
    with pytest.raises(EmptyDatasetError):
        with pytest.warns(UserWarning):
            zscore_rows(np.array([[5.0, 5, 5]]))


def test_affine_invariance():
    base = np.array([[1.0, 4, 2, 8], [3, 1, 2, 2]])
    scaled = base * np.array([[2.5], [0.1]]) + np.array([[7.0], [-3.0]])
    assert np.allclose(zscore_and_average(dataset(base)), zscore_and_average(dataset(scaled)))
    same_rank = np.array([[1.0, 2, 3], [10, 20, 30]])
    z = zscore_rows(same_rank)
    assert np.allclose(z[0], z[1])


def test_dataset_from_rows_and_csv(tmp_path):
    rows = [("a", "t1", 1), ("a", "t2", 2), ("b", "t1", 3), ("b", "t2", 1), ("c", "t1", 5)]
    with pytest.warns(UserWarning, match="'c'"):
        ds = HumanDataset.from_rows("d", rows)
    assert ds.participants == ("a", "b") and ds.responses.shape == (2, 2)
    p = tmp_path / "h.csv"
    ds.to_csv(p)
    back = HumanDataset.from_csv(p)
    assert back.trials == ds.trials and np.array_equal(back.responses, ds.responses)
    assert ds.aligned(["t2", "t1"]).responses[0].tolist() == [2.0, 1.0]
    with pytest.raises(ValidationError):
        ds.aligned(["t3"])
    bad = tmp_path / "bad.csv"
    bad.write_text("who,what\n1,2\n")
    with pytest.raises(ValidationError):
        HumanDataset.from_csv(bad)


def test_dataset_validation():
    with pytest.raises(ValidationError):
        HumanDataset.from_rows("d", [("a", "t1", "x")])
    with pytest.raises(ValidationError):
        HumanDataset.from_rows("d", [("a", "t1", 1), ("a", "t1", 2)])
    with pytest.raises(ValidationError):
        dataset([[1.0]])


# ---------------------------------------------------------------- regression

def synthetic(n=24, seed=0):
    g = np.random.default_rng(seed)
    return g.uniform(50, 1500, n), g.uniform(0, 0.6, n)


def test_full_noiseless_recovery():
    E, R = synthetic()
    y = 0.5 + 2 * E * (1 - R) + 7 * E * R
    fit = fit_full(E, R, y)
    assert np.allclose(fit.coefficients, (0.5, 2, 7), atol=1e-8) and fit.rmse < 1e-8


def test_full_matches_normal_equations():
    E, R = synthetic(seed=3)
    y = np.random.default_rng(3).normal(size=len(E))
    X = np.column_stack([np.ones_like(E), E * (1 - R), E * R])
    beta = np.linalg.solve(X.T @ X, X.T @ y)
    fit = fit_full(E, R, y)
    assert np.allclose(fit.coefficients, beta, rtol=1e-8)
    resid = y - fit.predictions
    for col in X.T:
        assert abs(resid @ col) <= 1e-8 * np.linalg.norm(resid) * np.linalg.norm(col) + 1e-9


def test_lesioned_match_linregress():
    E, R = synthetic(seed=5)
    y = np.random.default_rng(5).normal(size=len(E))
    for fit, x in ((fit_effort_only(E, y), E), (fit_risk_only(R, y), R)):
        lr = stats.linregress(x, y)
        assert fit.beta0 == pytest.approx(lr.intercept, rel=1e-9)
        assert fit.beta1 == pytest.approx(lr.slope, rel=1e-9)
        assert fit.pearson_r == pytest.approx(abs(lr.rvalue), rel=1e-9)
        assert fit.stderr[1] == pytest.approx(lr.stderr, rel=1e-9)


def test_effort_only_exact():
    E, _ = synthetic()
    fit = fit_effort_only(E, 3 * E + 1)
    assert fit.beta0 == pytest.approx(1) and fit.beta1 == pytest.approx(3)
    assert fit.pearson_r == pytest.approx(1.0) and fit.beta2 is None


def test_risk_only_negative_slope():
    _, R = synthetic()
    fit = fit_risk_only(R, -2 * R + 4)
    # slope carries the sign; fitted values correlate perfectly with y
    assert fit.beta1 == pytest.approx(-2) and abs(fit.pearson_r) == pytest.approx(1.0)
    assert pearson(R, -2 * R + 4) == pytest.approx(-1.0)


def test_singular_fits():
    E, _ = synthetic()
    with pytest.raises(SingularFitError):
        fit_full(E, np.zeros_like(E), E)
    with pytest.raises(SingularFitError):
        fit_risk_only(np.full(len(E), 0.3), E)
    with pytest.raises(ValidationError):
        fit_full(E[:2], E[:2] * 0, E[:2])


def test_permutation_invariance():
    E, R = synthetic(seed=7)
    y = np.random.default_rng(7).normal(size=len(E))
    perm = np.random.default_rng(8).permutation(len(E))
    a, b = fit_full(E, R, y), fit_full(E[perm], R[perm], y[perm])
    assert np.allclose(a.coefficients, b.coefficients, rtol=1e-9)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_nesting_property(seed):
    g = np.random.default_rng(seed)
    E, R = g.uniform(10, 100, 12), g.uniform(0, 1, 12)
    y = g.normal(size=12)
    fits = fit_all(E, R, y)
    # E = E(1-R) + E R, so the effort-only design lies inside the full one
    assert fits["full"].rmse <= fits["effort"].rmse + 1e-12
    for f in fits.values():
        assert f.rmse >= 0 and -1 <= f.pearson_r <= 1 and len(f.predictions) == 12


def test_risk_only_is_not_nested():
    # R is not in the span of [1, E(1-R), E R]: a target driven by R alone
    # can be fitted better by the risk-only model
    g = np.random.default_rng(255)
    E, R = g.uniform(10, 100, 12), g.uniform(0, 1, 12)
    y = g.normal(size=12)
    fits = fit_all(E, R, y)
    assert fits["full"].rmse > fits["risk"].rmse


# ---------------------------------------------------------------- grid

def test_default_grid():
    g = default_grid()
    assert len(g) == 11 and g[0] == 0.05 and g[-1] == 0.1 and 0.065 in g
    assert parse_grid("0.05:0.1:0.005") == g
    assert parse_grid("0.1:0.1:0.01") == [0.1]
    for bad in ("1:2", "0.1:0.05:0.01", "0:1:0"):
        with pytest.raises(ValidationError):
            parse_grid(bad)


def grid_case():
    E, _ = synthetic(seed=11)
    g = np.random.default_rng(11)
    table = {s: np.clip(g.uniform(0, 1, len(E)) * s * 5, 0, 1) for s in default_grid()}
    y = 1.0 + 0.002 * E * (1 - table[0.065]) + 0.01 * E * table[0.065]
    return E, table, y


def test_grid_picks_generating_sigma():
    E, table, y = grid_case()
    res = grid_search_table(E, table, y)
    assert res.sigma_star == 0.065 and len(res.table) == 11
    single = grid_search_table(E, {0.08: table[0.08]}, y)
    assert single.sigma_star == 0.08


def test_grid_ties_go_to_smaller_sigma():
    E, table, y = grid_case()
    tie = {0.07: table[0.065], 0.065: table[0.065], 0.1: table[0.1]}
    assert grid_search_table(E, tie, y).sigma_star == 0.065


def test_grid_reports_offending_sigma():
    E, table, y = grid_case()
    with pytest.raises(SingularFitError, match="0.05"):
        grid_search_table(E, {0.05: np.zeros_like(E)}, y)


def test_grid_per_dataset_and_pooled():
    E, table, y = grid_case()
    g = np.random.default_rng(2)
    resp = y[None, :] * g.uniform(0.5, 2, (6, 1)) + g.uniform(-1, 1, (6, 1))
    ds1 = dataset(resp, "a")
    ds2 = dataset(resp[:, ::-1] + g.normal(0, 0.01, resp.shape), "b")
    out = grid_search_datasets(E, table, [ds1, ds2])
    assert out["per_dataset"]["a"].sigma_star == 0.065
    assert set(out["per_dataset"]) == {"a", "b"} and len(out["pooled"].table) == 11


# ---------------------------------------------------------------- bootstrap

def boot_case(seed=0, P=12):
    g = np.random.default_rng(seed)
    truth = g.normal(size=10)
    resp = truth[None, :] + g.normal(0, 0.7, (P, 10))
    return dataset(resp), truth


def test_bootstrap_reproducible_and_ordered():
    ds, truth = boot_case()
    preds = {"good": truth, "noise": np.random.default_rng(1).normal(size=10)}
    a, b = bootstrap_compare(ds, preds, 200, seed=4), bootstrap_compare(ds, preds, 200, seed=4)
    assert np.array_equal(a.samples, b.samples)
    for m in preds:
        assert a.lower[m] <= a.median[m] <= a.upper[m]
    assert a.exceedance[("good", "noise")] > 0.95
    assert a.exceedance[("good", "noise")] + a.exceedance[("noise", "good")] == pytest.approx(1.0)


def test_bootstrap_identical_models_tie():
    ds, truth = boot_case()
    rep = bootstrap_compare(ds, {"a": truth, "b": truth.copy()}, 50)
    assert rep.exceedance[("a", "b")] == 0.5


def test_bootstrap_single_participant_is_plain_correlation():
    ds = dataset([[1.0, 3, 2, 5]])
    pred = np.array([1.0, 2, 3, 4])
    rep = bootstrap_compare(ds, {"m": pred}, 1)
    assert rep.median["m"] == pytest.approx(pearson(pred, zscore_and_average(ds)))


def test_bootstrap_redraws_degenerate_resamples():
    # mirror-image participants: a resample holding both equally often has
    # flat trial means and must be redrawn
    ds = dataset([[1.0, 2, 3], [3, 2, 1]])
    rep = bootstrap_compare(ds, {"m": np.array([1.0, 2, 3])}, 200, seed=0)
    assert rep.redrawn > 0 and rep.B == 200


def test_bootstrap_validation():
    ds, truth = boot_case()
    with pytest.raises(ValidationError):
        bootstrap_compare(ds, {"m": truth}, 0)
    with pytest.raises(ValidationError):
        bootstrap_compare(ds, {"m": truth[:3]}, 5)
    with pytest.raises(ValidationError):
        bootstrap_compare(ds, {}, 5)


def test_reports(tmp_path):
    E, R = synthetic()
    fits = fit_all(E, R, E * 0.01 + R)
    ds, truth = boot_case(P=4)
    boot = bootstrap_compare(ds, {"full": truth}, 10)
    rep = fit_report(fits, boot=boot)
    write_json(rep, tmp_path / "r.json")
    back = json.loads((tmp_path / "r.json").read_text())
    assert set(back["fits"]) == {"full", "effort", "risk"} and back["bootstrap"]["B"] == 10
    write_fit_csv([{"dataset": "d", "model": "full", "rmse": 1.0}], tmp_path / "f.csv")
    assert (tmp_path / "f.csv").read_text().startswith("dataset,model,sigma")
