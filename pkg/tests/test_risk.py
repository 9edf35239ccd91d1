import numpy as np
import pytest

from blockplan import rng
from blockplan.errors import OverConstrainedError, ValidationError
from blockplan.risk import (RiskEstimate, _overlaps, draw_offsets, estimate_risk, merge_risk,
                            perturb_scene, rest_reference, resolve_jobs, write_risk_csv)
from blockplan.scene import Block, Scene, validate_scene

from conftest import cube, line, lone_cube, tower


def test_estimate_invariants():
    with pytest.raises(ValidationError):
        RiskEstimate(0.5, 2, 0.1, 3, 0)
    with pytest.raises(ValidationError):
        estimate_risk(lone_cube(), 0.6, 5)
    with pytest.raises(ValidationError):
        estimate_risk(lone_cube(), 0.1, 0)


def test_tiny_sigma_is_identity():
    s = tower(3)
    p = perturb_scene(s, 1e-9, 5)
    assert np.max(np.abs(p.positions() - s.positions())) < 1e-7


def test_perturb_determinism():
    s = tower(4)
    assert perturb_scene(s, 0.065, 3) == perturb_scene(s, 0.065, 3)
    assert perturb_scene(s, 0.065, 3) != perturb_scene(s, 0.065, 4)


def test_offset_std_pre_rejection():
    gen = rng.stream(0, rng.PERTURB)
    s = Scene((cube(0),))
    draws = np.array([draw_offsets(s, 0.065, gen)[0] for _ in range(10_000)])
    std = draws.std(axis=0)
    assert np.all((std > 0.060) & (std < 0.070))


def test_offsets_scale_with_dims():
    gen = np.random.default_rng(0)
    s = Scene((Block("p", (3, 1, 0.5), (0, 0, 0.25)),))
    d = np.array([draw_offsets(s, 0.1, gen)[0] for _ in range(4000)]).std(axis=0)
    assert np.allclose(d, [0.3, 0.1, 0.05], rtol=0.06)
    assert np.all(draw_offsets(s, 0.1, gen, vertical=False)[:, 2] == 0)


@pytest.mark.parametrize("scene", [tower(6), line(6), Scene((cube(0), cube(1, 1, 0), cube(2, 0.5, 0, 1.5)))])
def test_perturbed_scene_is_valid(scene):
    for seed in range(40):
        p = perturb_scene(scene, 0.1, seed)
        validate_scene(p, tol=1e-6)


def test_overlap_axis_points_from_a_to_b():
    depth, axis = _overlaps(cube(0), cube(1, 0.8))
    assert depth == pytest.approx(0.2) and axis[0] == pytest.approx(1.0)
    depth, axis = _overlaps(cube(0), cube(1, 0, 0, 1.4))
    assert depth == pytest.approx(0.1) and axis[2] == 1.0


def test_over_constrained(monkeypatch):
    import blockplan.risk as risk

    monkeypatch.setattr(risk, "MAX_ATTEMPTS", 3)
    monkeypatch.setattr(risk, "_separate", lambda *a, **k: False)
    with pytest.raises(OverConstrainedError):
        risk.perturb_scene(tower(2), 0.1, 0)


def test_rest_reference_drops_lifted_blocks():
    s = Scene((cube(0, z=0.6), cube(1, 0.2, 0, 1.75)))
    ref = rest_reference(s)
    assert ref[0, 2] == pytest.approx(0.5) and ref[1, 2] == pytest.approx(1.5)


@pytest.mark.parametrize("sigma", [0.05, 0.065, 0.1])
def test_lone_cube_never_falls(sigma):
    est = estimate_risk(lone_cube(), sigma, 100, seed=1)
    assert est.risk == 0.0 and est.fell_count == 0


def test_spaced_ground_blocks_never_fall():
    sigma = 0.1
    s = line(6, gap=6 * sigma + 0.05)
    assert estimate_risk(s, sigma, 100, seed=2).risk == 0.0


def test_precarious_structure_has_risk():
    s = Scene((cube(0), cube(1, 0.42, 0, 1.5)))
    est = estimate_risk(s, 0.1, 60, seed=0)
    assert 0 < est.risk < 1 and est.risk == est.fell_count / est.N


def test_seed_split_and_jobs_independence():
    s = Scene((cube(0), cube(1, 0.4, 0, 1.5)))
    whole = estimate_risk(s, 0.1, 20, seed=9)
    parts = merge_risk(estimate_risk(s, 0.1, 12, seed=9, first=8),
                       estimate_risk(s, 0.1, 8, seed=9))
    assert parts == whole
    assert estimate_risk(s, 0.1, 20, seed=9, jobs=2) == whole
    with pytest.raises(ValidationError):
        merge_risk(estimate_risk(s, 0.1, 4, seed=9), estimate_risk(s, 0.1, 4, seed=9, first=5))


def test_resolve_jobs(monkeypatch):
    monkeypatch.setenv("BLOCKPLAN_JOBS", "3")
    assert resolve_jobs(None) == 3 and resolve_jobs(2) == 2
    monkeypatch.setenv("BLOCKPLAN_JOBS", "many")
    with pytest.raises(ValidationError):
        resolve_jobs(None)
    monkeypatch.delenv("BLOCKPLAN_JOBS")
    assert resolve_jobs(None) >= 1


def test_risk_csv(tmp_path):
    est = estimate_risk(lone_cube(), 0.065, 5, seed=0)
    p = tmp_path / "r.csv"
    write_risk_csv(est, p)
    rows = p.read_text().splitlines()
    assert rows[0] == "trial,fell,max_displacement" and len(rows) == 6
