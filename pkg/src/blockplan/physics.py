"""Forward simulation of box stacks and a quasi-static stability check.

:func:`simulate` integrates rigid boxes under gravity with frictional,
non-penetrating contacts until everything is at rest or the time budget
runs out, then reports whether any block travelled further than the fall
threshold.  :func:`static_stable` is an analytic centre-of-mass test that
shares no code with the simulator; it exists to cross-check it.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from shapely.geometry import MultiPolygon, Point, Polygon

from . import _simcore
from .errors import SimulationError, ValidationError
from .scene import Block, Scene, extract_support_graph


@dataclass(frozen=True)
class SimConfig:
    dt: float = 1.0 / 240.0
    gravity: float = 9.81
    friction_mu: float = 0.5
    restitution: float = 0.0
    max_sim_time: float = 4.0
    settle_lin_vel: float = 1e-3
    settle_ang_vel: float = 1e-3
    fall_threshold: float = 0.25
    # solver internals
    settle_time: float = 0.1
    velocity_iterations: int = 30
    position_iterations: int = 10
    contact_margin: float = 0.01
    penetration_slop: float = 0.002
    baumgarte: float = 0.2

    def __post_init__(self):
        if not self.dt > 0:
            raise ValidationError("dt must be positive")
        if not self.max_sim_time >= self.dt:
            raise ValidationError("max_sim_time must be at least dt")
        for name in ("settle_lin_vel", "settle_ang_vel", "fall_threshold", "gravity"):
            if not getattr(self, name) > 0:
                raise ValidationError(f"{name} must be positive")
        if self.friction_mu < 0 or not 0 <= self.restitution <= 1:
            raise ValidationError("friction must be >= 0 and restitution in [0, 1]")
        if self.velocity_iterations < 1 or self.position_iterations < 0:
            raise ValidationError("solver iteration counts out of range")

    @property
    def max_steps(self) -> int:
        return max(1, int(round(self.max_sim_time / self.dt)))


@dataclass(frozen=True)
class SimOutcome:
    final: Scene  # yaw-projected poses; see ``quaternions`` for the full rotation
    fell: bool
    max_displacement: float
    elapsed: float
    steps: int
    settled: bool
    quaternions: np.ndarray
    trace: np.ndarray | None = None  # (steps + 1, n, 13): pos, quat(wxyz), vel, omega


def _yaw_quat(yaw):
    return np.array([math.cos(0.5 * yaw), 0.0, 0.0, math.sin(0.5 * yaw)])


def _quat_yaw(q):
    w, x, y, z = q
    return math.atan2(2 * (w * z + x * y), 1 - 2 * (y * y + z * z))


def box_inverse_inertia(dims, mass) -> np.ndarray:
    a, b, c = dims
    return 12.0 / (mass * np.array([b * b + c * c, a * a + c * c, a * a + b * b]))


def _pack(scene: Scene):
    pos = scene.positions().copy()
    quat = np.array([_yaw_quat(b.yaw) for b in scene.blocks]).reshape(-1, 4)
    half = np.array([b.dims for b in scene.blocks], dtype=float).reshape(-1, 3) * 0.5
    invm = np.array([1.0 / b.mass for b in scene.blocks])
    inv_ib = np.array([box_inverse_inertia(b.dims, b.mass) for b in scene.blocks]).reshape(-1, 3)
    return pos, quat, half, invm, inv_ib


def simulate(scene: Scene, config: SimConfig | None = None, trace: bool = False) -> SimOutcome:
    """Let ``scene`` evolve under gravity and report whether it fell."""
    config = config or SimConfig()
    pos, quat, half, invm, inv_ib = _pack(scene)
    start = pos.copy()
    n = len(scene)
    v = np.zeros((n, 3))
    w = np.zeros((n, 3))
    max_steps = config.max_steps
    buf = np.zeros((max_steps + 1, n, 13) if trace else (0, n, 13))
    settle_steps = max(1, int(round(config.settle_time / config.dt)))
    if n == 0:
        return SimOutcome(scene, False, 0.0, 0.0, 0, True, np.zeros((0, 4)), buf if trace else None)
    status, steps = _simcore.run(
        pos, quat, v, w, half, invm, inv_ib, config.dt, config.gravity, config.friction_mu,
        config.restitution, config.contact_margin, config.penetration_slop, config.baumgarte,
        config.velocity_iterations, config.position_iterations, max_steps,
        config.settle_lin_vel, config.settle_ang_vel, settle_steps, buf)
    if status != _simcore.OK:
        raise SimulationError(f"non-finite state at step {steps}", step=int(steps))
    disp = float(np.max(np.linalg.norm(pos - start, axis=1)))
    final = Scene(tuple(b.moved_to(p, _quat_yaw(q)) for b, p, q in zip(scene.blocks, pos, quat)))
    return SimOutcome(
        final=final,
        fell=disp > config.fall_threshold,
        max_displacement=disp,
        elapsed=steps * config.dt,
        steps=int(steps),
        settled=steps < max_steps,
        quaternions=quat,
        trace=buf[: steps + 1] if trace else None,
    )


def mechanical_energy(scene: Scene, frame: np.ndarray, gravity: float = 9.81) -> float:
    """Kinetic plus potential energy of one trace frame (n, 13)."""
    total = 0.0
    for b, row in zip(scene.blocks, frame):
        R = np.empty((3, 3))
        _simcore.quat_to_mat(row[3:7], R)
        inertia = R @ np.diag(1.0 / box_inverse_inertia(b.dims, b.mass)) @ R.T
        vel, omega = row[7:10], row[10:13]
        total += 0.5 * b.mass * vel @ vel + 0.5 * omega @ inertia @ omega + b.mass * gravity * row[2]
    return total


def write_sim_trace_csv(scene: Scene, outcome: SimOutcome, path) -> None:
    if outcome.trace is None:
        raise ValueError("outcome has no trace; call simulate(..., trace=True)")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        out = csv.writer(fh)
        out.writerow(["step", "block", "x", "y", "z", "qw", "qx", "qy", "qz"])
        for s, frame in enumerate(outcome.trace):
            for b, row in zip(scene.blocks, frame):
                out.writerow([s, b.id, *(repr(float(x)) for x in row[:7])])


# ---------------------------------------------------------------------------
# quasi-static oracle


def _is_axis_aligned(b: Block) -> bool:
    k = b.yaw / (math.pi / 2)
    return abs(k - round(k)) < 1e-9


def static_stable(scene: Scene) -> bool:
    """Centre-of-mass check over the support graph, for axis-aligned scenes.

    Each block ``j`` is grouped with every block that rests (directly or
    transitively) on ``j`` alone.  The group's centre of mass must project
    strictly inside the convex hull of ``j``'s contact patches with its
    supporters (or its footprint, on the ground).
    """
    for b in scene.blocks:
        if not _is_axis_aligned(b):
            raise ValidationError(f"static_stable needs axis-aligned blocks; {b.id!r} has yaw {b.yaw}")
    if len(scene) == 0:
        return True
    graph = extract_support_graph(scene)
    blocks = scene.by_id()
    supporters = graph.predecessors()
    order = graph.topological_order()
    footprints = {k: Polygon(b.footprint()) for k, b in blocks.items()}
    on_ground = set(graph.ground)

    for j in order:
        group = {j}
        for x in order:
            if x != j and supporters[x] and all(s in group for s in supporters[x]):
                if x not in on_ground:
                    group.add(x)
        mass = sum(blocks[g].mass for g in group)
        com = sum(blocks[g].mass * np.asarray(blocks[g].position[:2]) for g in group) / mass
        patches = []
        if j in on_ground:
            patches.append(footprints[j])
        for s in supporters[j]:
            patch = footprints[s].intersection(footprints[j])
            if patch.area > 0:
                patches.append(patch)
        if not patches:
            return False
        hull = MultiPolygon([p for p in patches if isinstance(p, Polygon)]).convex_hull
        if not hull.contains(Point(com)):
            return False
    return True
