"""Fall probability of a target structure under position noise.

Each of ``N`` trials jitters every block centre with Gaussian noise scaled by
the block's size along that axis, lets the jittered scene evolve under
gravity, and records whether anything moved further than the fall threshold.
"""

from __future__ import annotations

import csv
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import rng
from .errors import OverConstrainedError, SimulationError, ValidationError
from .physics import SimConfig, simulate
from .scene import (CONTACT_TOL, MIN_SUPPORT_AREA, Block, Scene, _proj_radius,
                    footprint_overlap_area)

DEFAULT_SIGMA = 0.065
DEFAULT_N = 100
MAX_ATTEMPTS = 10_000


@dataclass(frozen=True)
class RiskEstimate:
    risk: float
    N: int
    sigma: float
    fell_count: int
    seed: int
    first: int = 0  # index of the first trial in the per-trial seed schedule
    fell: tuple[bool, ...] = ()
    displacements: tuple[float, ...] = ()

    def __post_init__(self):
        if not 0 <= self.fell_count <= self.N:
            raise ValidationError("fell_count must lie in [0, N]")


def draw_offsets(scene: Scene, sigma: float, gen: np.random.Generator,
                 vertical: bool = True) -> np.ndarray:
    """Raw (pre-rejection) offsets: N(0, (sigma * dim)^2) per block and axis."""
    dims = np.array([b.dims for b in scene.blocks], dtype=float).reshape(-1, 3)
    out = gen.standard_normal(dims.shape) * sigma * dims
    if not vertical:
        out[:, 2] = 0.0
    return out


def _check_sigma(sigma):
    if not 0 < sigma < 0.5:
        raise ValidationError(f"sigma must lie in (0, 0.5), got {sigma}")


def _overlaps(a: Block, b: Block):
    """Overlap of two yaw-only boxes on every candidate separating axis.

    Returns ``(depth, axis)`` for the axis of least overlap, with ``axis``
    pointing from ``a`` towards ``b``; ``depth <= 0`` means no overlap.
    """
    pa, pb = np.asarray(a.position), np.asarray(b.position)
    ha, hb = a.half, b.half
    d = pb - pa
    best = ha[2] + hb[2] - abs(d[2])
    axis = np.array([0.0, 0.0, 1.0 if d[2] >= 0 else -1.0])
    for ang in (a.yaw, a.yaw + np.pi / 2, b.yaw, b.yaw + np.pi / 2):
        u = np.array([np.cos(ang), np.sin(ang), 0.0])
        proj = d @ u
        ov = (_proj_radius(ha[0], ha[1], a.yaw, ang) + _proj_radius(hb[0], hb[1], b.yaw, ang)
              - abs(proj))
        if ov < best:
            best = ov
            axis = u if proj >= 0 else -u
    return best, axis


def _separate(pos, blocks, base, floor, order, max_pushes=50):
    """Push jittered blocks out of each other in place; True on success.

    Blocks are settled one at a time in ``order`` (bottom-up); only the
    block being settled moves.  Sinking into a block below puts it back on
    top of that block; a sideways overlap shifts it out along the axis of
    least overlap.
    """
    placed = []
    for k in order:
        low = floor[k] + blocks[k].half[2]
        if pos[k, 2] < low:
            pos[k, 2] = low
        for _ in range(max_pushes):
            bk = blocks[k].moved_to(pos[k])
            worst, hit = 0.0, None
            for p in placed:
                depth, axis = _overlaps(blocks[p].moved_to(pos[p]), bk)
                excess = depth - base[p, k]
                if excess > 1e-12 and excess > worst:
                    worst, hit = excess, (p, axis)
            if hit is None:
                break
            p, axis = hit
            if axis[2] != 0.0:
                # vertical: rest on top of the block it sank into
                pos[k, 2] = pos[p, 2] + blocks[p].half[2] + blocks[k].half[2] - base[p, k] + 1e-9
            else:
                pos[k] += (worst + 1e-9) * axis
        else:
            return False
        placed.append(k)
    return True


def perturb_scene(scene: Scene, sigma: float, seed: int, vertical: bool = True) -> Scene:
    """Jitter every block of ``scene`` and remove the overlap this creates.

    All offsets are drawn at once (see :func:`draw_offsets`); blocks that end
    up interpenetrating, or below the ground, are then pushed out bottom-up
    by the least amount along their axis of least overlap.  Overlap already present
    in ``scene`` is tolerated.  If the separation does not settle the draw is
    discarded; more than ``MAX_ATTEMPTS`` draws raise
    :class:`OverConstrainedError`.
    """
    _check_sigma(sigma)
    gen = rng.stream(seed, rng.PERTURB)
    blocks = list(scene.blocks)
    n = len(blocks)
    if n == 0:
        return scene
    base = np.zeros((n, n))
    for i in range(n - 1):
        for j in range(i + 1, n):
            base[i, j] = base[j, i] = max(_overlaps(blocks[i], blocks[j])[0], 0.0)
    order = sorted(range(n), key=lambda k: (blocks[k].bottom, k))
    floor = np.array([min(0.0, b.bottom) for b in blocks])
    origin = scene.positions()
    for _ in range(MAX_ATTEMPTS):
        pos = origin + draw_offsets(scene, sigma, gen, vertical)
        if _separate(pos, blocks, base, floor, order):
            return scene.with_positions(pos)
    raise OverConstrainedError(
        f"no overlap-free perturbation after {MAX_ATTEMPTS} draws (sigma={sigma})")


def rest_reference(scene: Scene, tol: float = CONTACT_TOL) -> np.ndarray:
    """Centres after dropping every block straight down onto what lies below.

    Displacements are measured from here, so a block that was only lifted
    by the vertical jitter and drops back does not count as a fall.
    """
    blocks = list(scene.blocks)
    order = sorted(range(len(blocks)), key=lambda k: (blocks[k].bottom, k))
    pos = scene.positions().copy()
    dropped = {}
    for k in order:
        b = blocks[k]
        rest = 0.0
        for p, q in dropped.items():
            top = q.top
            if top <= b.bottom + tol and footprint_overlap_area(q, b) > MIN_SUPPORT_AREA:
                rest = max(rest, top)
        if rest < b.bottom:
            pos[k, 2] -= b.bottom - rest
        dropped[k] = b.moved_to(pos[k])
    return pos


def _one_trial(args):
    scene, sigma, trial_seed, config, vertical, idx = args
    perturbed = perturb_scene(scene, sigma, trial_seed, vertical)
    try:
        outcome = simulate(perturbed, config)
    except SimulationError as exc:
        raise SimulationError(f"risk trial {idx}: {exc}", step=exc.step) from exc
    ref = rest_reference(perturbed)
    disp = float(np.max(np.linalg.norm(outcome.final.positions() - ref, axis=1)))
    return disp > config.fall_threshold, disp


def trial_seed(seed: int, idx: int) -> int:
    return rng.derive_seed(seed, rng.PERTURB, idx)


def resolve_jobs(jobs: int | None) -> int:
    """``jobs`` if given, else ``$BLOCKPLAN_JOBS``, else the usable core count."""
    if jobs is None:
        env = os.environ.get("BLOCKPLAN_JOBS")
        if env:
            try:
                jobs = int(env)
            except ValueError:
                raise ValidationError(f"BLOCKPLAN_JOBS must be an integer, got {env!r}") from None
        else:
            jobs = len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else os.cpu_count()
    if jobs < 1:
        raise ValidationError("jobs must be >= 1")
    return int(jobs)


def estimate_risk(scene: Scene, sigma: float = DEFAULT_SIGMA, N: int = DEFAULT_N, seed: int = 0,
                  config: SimConfig | None = None, jobs: int | None = 1, vertical: bool = True,
                  first: int = 0) -> RiskEstimate:
    """Fraction of ``N`` perturbed simulations of ``scene`` that fall.

    Trial ``i`` (counting from ``first``) uses seed ``trial_seed(seed, i)``,
    so results do not depend on ``jobs`` and runs over disjoint index ranges
    can be merged with :func:`merge_risk`.
    """
    _check_sigma(sigma)
    if int(N) != N or N < 1:
        raise ValidationError("N must be a positive integer")
    N = int(N)
    config = config or SimConfig()
    tasks = [(scene, sigma, trial_seed(seed, i), config, vertical, i)
             for i in range(first, first + N)]
    jobs = min(resolve_jobs(jobs), N)
    if jobs == 1:
        results = [_one_trial(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_one_trial, tasks, chunksize=max(1, N // (4 * jobs))))
    fell = tuple(bool(f) for f, _ in results)
    count = sum(fell)
    return RiskEstimate(count / N, N, float(sigma), count, int(seed), int(first), fell,
                        tuple(float(d) for _, d in results))


def merge_risk(*parts: RiskEstimate) -> RiskEstimate:
    """Concatenate estimates over consecutive index ranges of one schedule."""
    if not parts:
        raise ValidationError("nothing to merge")
    parts = sorted(parts, key=lambda p: p.first)
    for a, b in zip(parts, parts[1:]):
        if b.first != a.first + a.N or (a.seed, a.sigma) != (b.seed, b.sigma):
            raise ValidationError("estimates do not form one contiguous schedule")
    fell = tuple(f for p in parts for f in p.fell)
    disp = tuple(d for p in parts for d in p.displacements)
    N = sum(p.N for p in parts)
    count = sum(p.fell_count for p in parts)
    return RiskEstimate(count / N, N, parts[0].sigma, count, parts[0].seed, parts[0].first, fell, disp)


def write_risk_csv(estimate: RiskEstimate, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["trial", "fell", "max_displacement"])
        for k, (f, d) in enumerate(zip(estimate.fell, estimate.displacements)):
            w.writerow([estimate.first + k, int(f), repr(d)])
