import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from blockplan.errors import ValidationError
from blockplan.scene import Scene, TrialSpec
from blockplan.trajectory import action_energy, estimate_effort, plan_transport, write_trace_csv

from conftest import cube, line, scatter_trial, tower


def cubic(x0, x1, s):
    return x0 + (x1 - x0) * (3 * s**2 - 2 * s**3)


def test_null_move():
    t = plan_transport((1, 2, 0.5), (1, 2, 0.5), 0.0)
    assert np.all(t.velocities == 0) and action_energy(t, 1.0) == 0.0


def test_straight_segment_matches_cubic():
    L, T = 3.0, 2.0
    t = plan_transport((0, 0, 0.5), (L, 0, 0.5), 0.0, T, 256)
    assert abs(t.peak_speed - 1.5 * L / T) / (1.5 * L / T) < 1e-4
    s = t.times / T
    assert np.max(np.abs(t.positions[:, 0] - cubic(0, L, s))) < 1e-3


def test_error_decreases_with_resolution():
    errs = []
    for steps in (32, 64, 128, 256):
        t = plan_transport((0, 0, 0), (2.0, 0, 0), 0.0, 2.0, steps)
        errs.append(abs(t.peak_speed - 1.5))
    assert all(b < a for a, b in zip(errs, errs[1:]))


def test_time_scaling_and_energy_oracle():
    t1 = plan_transport((0, 0, 0), (3, 0, 0), 0.0, 2.0, 256)
    t2 = plan_transport((0, 0, 0), (3, 0, 0), 0.0, 4.0, 256)
    assert math.isclose(t2.peak_speed, t1.peak_speed / 2, rel_tol=1e-6)
    # closed-form: 0.5 * (1.5 * 3 / 2)^2
    assert math.isclose(action_energy(t1, 1.0), 2.53125, rel_tol=2e-4)
    assert math.isclose(action_energy(t1, 2.0), 2 * action_energy(t1, 1.0), rel_tol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=6, max_size=6), st.floats(0, 4),
       st.integers(8, 200))
def test_trajectory_invariants(coords, clearance, steps):
    start, goal = coords[:3], coords[3:]
    t = plan_transport(start, goal, clearance, 2.0, steps)
    assert np.all(np.diff(t.times) > 0) and t.times[0] == 0 and t.times[-1] == 2.0
    assert np.abs(t.velocities[[0, -1]]).max() <= 1e-9
    for w in t.waypoints:
        assert np.min(np.linalg.norm(t.positions - np.asarray(w), axis=1)) < 1e-6


def test_waypoints_lift_over():
    t = plan_transport((0, 0, 0.5), (4, 0, 0.5), 3.0)
    assert len(t.waypoints) == 4 and t.positions[:, 2].max() >= 3.0 - 1e-9


@pytest.mark.parametrize("bad", [dict(steps=4), dict(duration=0.0), dict(clearance=-1.0)])
def test_transport_validation(bad):
    kw = dict(clearance=1.0, duration=2.0, steps=16) | bad
    with pytest.raises(ValidationError):
        plan_transport((0, 0, 0), (1, 0, 0), **kw)
    with pytest.raises(ValidationError):
        plan_transport((0, 0, math.nan), (1, 0, 0), 1.0)


def test_effort_identity_trial_is_zero():
    t = TrialSpec("same", tower(3), tower(3))
    e = estimate_effort(t, 5)
    assert e.sample_mean == 0.0 and e.total_energy == 0.0


def test_fixed_state_a_has_zero_std():
    t = TrialSpec("fixed", line(3).translated((-6, 3, 0)), tower(3))
    e = estimate_effort(t, 30)
    assert e.sample_std == 0.0 and e.M == 30
    assert math.isclose(e.total_energy, sum(e.per_action_energy))
    assert all(x >= 0 for x in e.per_action_energy)


def test_effort_additive_over_separated_trials():
    a1, b1 = line(2).translated((-6, 0, 0)), tower(2)
    a2 = Scene(tuple(cube(i + 10, -6 + i, 40) for i in range(2)))
    b2 = Scene(tuple(cube(i + 10, 0, 40, 0.5 + i) for i in range(2)))
    whole = TrialSpec("u", Scene(a1.blocks + a2.blocks), Scene(b1.blocks + b2.blocks))
    parts = [estimate_effort(TrialSpec("p", a, b), 1).sample_mean for a, b in ((a1, b1), (a2, b2))]
    assert math.isclose(estimate_effort(whole, 1).sample_mean, sum(parts), rel_tol=1e-6)


def test_effort_deterministic_and_sampled():
    t = scatter_trial("s", tower(3))
    e1, e2 = estimate_effort(t, 6, seed=4), estimate_effort(t, 6, seed=4)
    assert e1 == e2 and e1.sample_std > 0 and len(e1.sample_totals) == 6


def test_trace_csv(tmp_path):
    t = plan_transport((0, 0, 0), (1, 0, 0), 0.5, 2.0, 16)
    p = tmp_path / "tr.csv"
    write_trace_csv([("b0", t)], p)
    rows = p.read_text().splitlines()
    assert rows[0].startswith("action,block,time") and len(rows) == 18
