"""Point-gripper transport trajectories and kinetic-energy effort.

Each Grasp -> Place step carries one block along
``start -> lift(start) -> lift(goal) -> goal``.  The path is the discrete
minimiser of summed squared acceleration through those via-points with the
block at rest at both ends; the effort of a step is the block's peak kinetic
energy along it.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .assign import assign_blocks
from .errors import ValidationError
from .scene import TrialSpec
from .symplan import plan_symbolic

DEFAULT_DURATION = 2.0
DEFAULT_STEPS = 128
DEFAULT_M = 30
LIFT_MARGIN = 1.0


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray  # (n + 1,)
    positions: np.ndarray  # (n + 1, 3)
    velocities: np.ndarray  # (n + 1, 3)
    duration: float
    waypoints: tuple

    @property
    def samples(self):
        return list(zip(self.times, self.positions, self.velocities))

    @property
    def speeds(self) -> np.ndarray:
        return np.linalg.norm(self.velocities, axis=1)

    @property
    def peak_speed(self) -> float:
        return float(self.speeds.max())


@dataclass(frozen=True)
class EffortEstimate:
    """Effort of a trial.

    ``per_action_energy`` and ``total_energy`` describe the first scatter
    sample; ``sample_totals`` holds the total of every sample.
    """

    per_action_energy: tuple[float, ...]
    total_energy: float
    sample_mean: float
    sample_std: float
    M: int
    sample_totals: tuple[float, ...] = ()
    plan_lengths: tuple[int, ...] = ()
    assignment_distances: tuple[float, ...] = ()


def _lift(p, height):
    return np.array([p[0], p[1], max(p[2], height)])


def _second_difference(n: int) -> np.ndarray:
    # rows k = 0..n of x[k-1] - 2 x[k] + x[k+1], mirrored ghosts at both ends
    D = np.zeros((n + 1, n + 1))
    for k in range(1, n):
        D[k, k - 1:k + 2] = (1.0, -2.0, 1.0)
    D[0, 0], D[0, 1] = -2.0, 2.0
    D[n, n], D[n, n - 1] = -2.0, 2.0
    return D


@lru_cache(maxsize=256)
def _system(n: int, fixed: tuple[int, ...]):
    D = _second_difference(n)
    w = np.ones(n + 1)
    w[0] = w[n] = 0.5
    Q = D.T @ (w[:, None] * D)
    free = np.setdiff1d(np.arange(n + 1), fixed)
    fixed_arr = np.asarray(fixed)
    factor = cho_factor(Q[np.ix_(free, free)])
    return free, fixed_arr, factor, Q[np.ix_(free, fixed_arr)]


def _waypoint_indices(points: np.ndarray, steps: int) -> list[int]:
    seg = np.linalg.norm(np.diff(points, axis=0), axis=1)
    cum = np.concatenate([[0.0], np.cumsum(seg)]) / seg.sum()
    idx = [int(round(c * steps)) for c in cum]
    # keep strictly increasing; short segments still get one interval
    for k in range(1, len(idx)):
        idx[k] = max(idx[k], idx[k - 1] + 1)
    idx[-1] = steps
    for k in range(len(idx) - 2, -1, -1):
        idx[k] = min(idx[k], idx[k + 1] - 1)
    return idx


def plan_transport(start, goal, clearance: float, duration: float = DEFAULT_DURATION,
                   steps: int = DEFAULT_STEPS) -> Trajectory:
    """Rest-to-rest transport of one block from ``start`` to ``goal``.

    ``clearance`` is the carry height: the block is raised to at least that
    height above ``start``, moved across, and lowered onto ``goal``.  With a
    single straight segment the result converges to the cubic
    ``x0 + (x1 - x0)(3s^2 - 2s^3)``.
    """
    start = np.asarray(start, dtype=float)
    goal = np.asarray(goal, dtype=float)
    if start.shape != (3,) or goal.shape != (3,):
        raise ValidationError("start and goal must be 3-vectors")
    if not (np.all(np.isfinite(start)) and np.all(np.isfinite(goal))
            and math.isfinite(clearance) and math.isfinite(duration)):
        raise ValidationError("non-finite transport input")
    if int(steps) != steps or steps < 8:
        raise ValidationError("steps must be an integer >= 8")
    if duration <= 0:
        raise ValidationError("duration must be positive")
    if clearance < 0:
        raise ValidationError("clearance must be non-negative")
    steps = int(steps)
    raw = [start, _lift(start, clearance), _lift(goal, clearance), goal]
    waypoints = [raw[0]]
    for p in raw[1:]:
        if np.linalg.norm(p - waypoints[-1]) > 1e-12:
            waypoints.append(p)
    times = np.linspace(0.0, duration, steps + 1)
    if len(waypoints) == 1:
        pos = np.repeat(start[None, :], steps + 1, axis=0)
        return Trajectory(times, pos, np.zeros_like(pos), float(duration), (tuple(start),))

    pts = np.array(waypoints)
    fixed = tuple(_waypoint_indices(pts, steps))
    free, fixed_arr, factor, coupling = _system(steps, fixed)
    pos = np.empty((steps + 1, 3))
    pos[fixed_arr] = pts
    pos[free] = cho_solve(factor, -coupling @ pts)

    dt = duration / steps
    vel = np.zeros_like(pos)
    vel[1:-1] = (pos[2:] - pos[:-2]) / (2.0 * dt)
    return Trajectory(times, pos, vel, float(duration), tuple(tuple(p) for p in pts))


def action_energy(traj: Trajectory, mass: float) -> float:
    """Peak kinetic energy 0.5 m v_max^2 of a transport."""
    if mass <= 0:
        raise ValidationError("mass must be positive")
    return 0.5 * mass * traj.peak_speed ** 2


def plan_trajectories(state_a, state_b, plan, duration=DEFAULT_DURATION, steps=DEFAULT_STEPS):
    """One trajectory per placement of ``plan``, carried above B's tallest point."""
    a_by_id, b_by_id = state_a.by_id(), state_b.by_id()
    clearance = state_b.height() + LIFT_MARGIN
    out = []
    for a_id, b_id in plan.placements:
        traj = plan_transport(a_by_id[a_id].position, b_by_id[b_id].position,
                              clearance, duration, steps)
        out.append((a_id, traj))
    return out


def _one_sample(trial: TrialSpec, sample_seed: int, duration: float, steps: int):
    state_a, state_b = trial.realize(sample_seed)
    assignment = assign_blocks(state_a, state_b)
    plan = plan_symbolic(state_a, state_b, assignment)
    masses = state_a.by_id()
    energies = [action_energy(traj, masses[a_id].mass)
                for a_id, traj in plan_trajectories(state_a, state_b, plan, duration, steps)]
    return energies, len(plan), assignment.total_distance


def estimate_effort(trial: TrialSpec, M: int = DEFAULT_M, seed: int = 0,
                    duration: float = DEFAULT_DURATION, steps: int = DEFAULT_STEPS) -> EffortEstimate:
    """Mean and spread of total transport energy over ``M`` scatter samples.

    Sample ``i`` realises State A with seed ``seed + i``.  Fixed (non-random)
    A states are solved once and repeated.
    """
    if int(M) != M or M < 1:
        raise ValidationError("M must be a positive integer")
    M = int(M)
    runs = []
    for i in range(M):
        if i > 0 and not trial.is_random:
            runs.append(runs[0])
            continue
        runs.append(_one_sample(trial, seed + i, duration, steps))
    totals = np.array([math.fsum(e) for e, _, _ in runs])
    first = runs[0][0]
    return EffortEstimate(
        per_action_energy=tuple(first),
        total_energy=math.fsum(first),
        sample_mean=float(math.fsum(totals) / M),
        sample_std=float(np.std(totals)) if trial.is_random else 0.0,
        M=M,
        sample_totals=tuple(float(t) for t in totals),
        plan_lengths=tuple(n for _, n, _ in runs),
        assignment_distances=tuple(d for _, _, d in runs),
    )


def write_trace_csv(trajectories, path) -> None:
    """Dump ``(block_id, Trajectory)`` pairs as one CSV for plotting."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["action", "block", "time", "x", "y", "z", "vx", "vy", "vz"])
        for k, (block_id, traj) in enumerate(trajectories):
            for t, p, v in traj.samples:
                w.writerow([k, block_id, repr(float(t)), *(repr(float(c)) for c in p),
                            *(repr(float(c)) for c in v)])
