"""Blocks, scenes, support graphs, scatter sampling and the JSON scene format.

Lengths are in block units (the canonical cube has edge 1) and masses in
canonical-block units.  Blocks are boxes rotated only about the vertical
axis; tilted poses exist only transiently inside the physics simulator.
"""

from __future__ import annotations

import graphlib
import json
import math
from collections import Counter
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Iterator, Union

import numpy as np
from shapely.geometry import Polygon

from . import rng as _rng
from .errors import CapacityError, InfeasibleError, SceneParseError, ValidationError

COLORS = frozenset({"natural", "red", "blue", "green", "yellow", "orange", "purple"})

CONTACT_TOL = 0.02
# minimum shared footprint area for a support edge
MIN_SUPPORT_AREA = 1e-6
UNIT_DIMS = (1.0, 1.0, 1.0)


def _vec3(values, what: str) -> tuple[float, float, float]:
    try:
        out = tuple(float(v) for v in values)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{what} must be a 3-vector of numbers") from exc
    if len(out) != 3:
        raise ValidationError(f"{what} must have 3 components, got {len(out)}")
    if not all(math.isfinite(v) for v in out):
        raise ValidationError(f"{what} must be finite")
    return out


@dataclass(frozen=True)
class Block:
    """An axis-aligned box, optionally rotated by ``yaw`` about +z.

    ``mass`` defaults to the block volume, so the canonical cube weighs 1.
    """

    id: str
    dims: tuple[float, float, float] = UNIT_DIMS
    position: tuple[float, float, float] = (0.0, 0.0, 0.5)
    yaw: float = 0.0
    color: str = "natural"
    mass: float | None = None

    def __post_init__(self):
        if not isinstance(self.id, str) or not self.id:
            raise ValidationError("block id must be a non-empty string")
        dims = _vec3(self.dims, f"block {self.id!r} dims")
        if min(dims) <= 0:
            raise ValidationError(f"block {self.id!r}: dims must be strictly positive")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "position", _vec3(self.position, f"block {self.id!r} position"))
        yaw = float(self.yaw)
        if not math.isfinite(yaw):
            raise ValidationError(f"block {self.id!r}: yaw must be finite")
        object.__setattr__(self, "yaw", yaw)
        if self.color not in COLORS:
            raise ValidationError(f"block {self.id!r}: unknown color {self.color!r}")
        mass = dims[0] * dims[1] * dims[2] if self.mass is None else float(self.mass)
        if not (math.isfinite(mass) and mass > 0):
            raise ValidationError(f"block {self.id!r}: mass must be strictly positive")
        object.__setattr__(self, "mass", mass)

    @property
    def half(self) -> np.ndarray:
        return 0.5 * np.asarray(self.dims)

    @property
    def bottom(self) -> float:
        return self.position[2] - 0.5 * self.dims[2]

    @property
    def top(self) -> float:
        return self.position[2] + 0.5 * self.dims[2]

    def footprint(self) -> np.ndarray:
        """Corners (4, 2) of the horizontal footprint, counter-clockwise."""
        c, s = math.cos(self.yaw), math.sin(self.yaw)
        hx, hy = 0.5 * self.dims[0], 0.5 * self.dims[1]
        local = np.array([[-hx, -hy], [hx, -hy], [hx, hy], [-hx, hy]])
        rot = np.array([[c, -s], [s, c]])
        return local @ rot.T + np.asarray(self.position[:2])

    def moved_to(self, position, yaw=None) -> "Block":
        return replace(self, position=tuple(position), yaw=self.yaw if yaw is None else yaw)


@dataclass(frozen=True)
class Scene:
    """An ordered collection of blocks above an implicit ground plane z = 0."""

    blocks: tuple[Block, ...] = ()

    def __post_init__(self):
        blocks = tuple(self.blocks)
        object.__setattr__(self, "blocks", blocks)
        seen = set()
        for b in blocks:
            if b.id in seen:
                raise ValidationError(f"duplicate block id {b.id!r}")
            seen.add(b.id)

    def __len__(self) -> int:
        return len(self.blocks)

    def __iter__(self) -> Iterator[Block]:
        return iter(self.blocks)

    @property
    def ids(self) -> list[str]:
        return [b.id for b in self.blocks]

    def by_id(self) -> dict[str, Block]:
        return {b.id: b for b in self.blocks}

    def positions(self) -> np.ndarray:
        return np.array([b.position for b in self.blocks], dtype=float).reshape(-1, 3)

    def colors(self) -> Counter:
        return Counter(b.color for b in self.blocks)

    def height(self) -> float:
        """Height of the highest top face (0 for an empty scene)."""
        return max((b.top for b in self.blocks), default=0.0)

    def with_positions(self, positions) -> "Scene":
        positions = np.asarray(positions, dtype=float)
        return Scene(tuple(b.moved_to(p) for b, p in zip(self.blocks, positions)))

    def translated(self, offset) -> "Scene":
        offset = np.asarray(offset, dtype=float)
        return self.with_positions(self.positions() + offset)


@dataclass(frozen=True)
class ScatterTemplate:
    """Recipe for randomly scattered blocks lying flat in a rectangle.

    The workspace is ``[origin_x, origin_x + w] x [origin_y, origin_y + h]``.
    """

    count: int
    colors: tuple[str, ...]
    workspace: tuple[float, float]
    origin: tuple[float, float] = (0.0, 0.0)
    dims: tuple[float, float, float] = UNIT_DIMS

    def __post_init__(self):
        if int(self.count) != self.count or self.count < 0:
            raise ValidationError("scatter count must be a non-negative integer")
        colors = tuple(self.colors)
        if len(colors) == 1 and self.count != 1:
            colors = colors * self.count
        if len(colors) != self.count:
            raise ValidationError(
                f"scatter colors: expected {self.count} entries (or one), got {len(colors)}")
        for c in colors:
            if c not in COLORS:
                raise ValidationError(f"scatter: unknown color {c!r}")
        object.__setattr__(self, "colors", colors)
        w, h = (float(v) for v in self.workspace)
        if not (w > 0 and h > 0):
            raise ValidationError("scatter workspace must have positive extent")
        object.__setattr__(self, "workspace", (w, h))
        object.__setattr__(self, "origin", tuple(float(v) for v in self.origin))
        object.__setattr__(self, "dims", _vec3(self.dims, "scatter dims"))

    def color_counts(self) -> Counter:
        return Counter(self.colors)


@dataclass(frozen=True)
class BucketTemplate:
    """The 10 x 2 array abstraction used for the bucket trials."""

    variant: str

    def __post_init__(self):
        if self.variant not in BUCKET_COLORS:
            raise ValidationError(f"bucket variant must be 'easy' or 'hard', got {self.variant!r}")

    def color_counts(self) -> Counter:
        return Counter({BUCKET_COLORS[self.variant]: BUCKET_TARGETS,
                        "natural": BUCKET_ROWS * BUCKET_COLS - BUCKET_TARGETS})


StateA = Union[Scene, ScatterTemplate, BucketTemplate]


@dataclass(frozen=True)
class TrialSpec:
    id: str
    state_a: StateA
    state_b: Scene

    def __post_init__(self):
        a = self.state_a.colors() if isinstance(self.state_a, Scene) else self.state_a.color_counts()
        b = self.state_b.colors()
        if a != b:
            diff = sorted(set((a - b) + (b - a)))
            raise InfeasibleError(f"trial {self.id}: color multisets of A and B differ: {diff}")

    @property
    def is_random(self) -> bool:
        return not isinstance(self.state_a, Scene)

    def realize(self, seed: int) -> tuple[Scene, Scene]:
        """Concrete ``(A, B)`` scenes for one scatter sample."""
        if isinstance(self.state_a, Scene):
            return self.state_a, self.state_b
        if isinstance(self.state_a, ScatterTemplate):
            return sample_scattered_state(self.state_a, seed), self.state_b
        t = sample_bucket_trial(self.state_a.variant, seed)
        return t.state_a, t.state_b


@dataclass(frozen=True)
class SupportGraph:
    """Directed "supports" relation; edge ``(i, j)`` means i holds j up."""

    nodes: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]
    ground: tuple[str, ...]

    def supporters(self, node: str) -> list[str]:
        return [i for i, j in self.edges if j == node]

    def supported(self, node: str) -> list[str]:
        return [j for i, j in self.edges if i == node]

    def predecessors(self) -> dict[str, list[str]]:
        preds = {n: [] for n in self.nodes}
        for i, j in self.edges:
            preds[j].append(i)
        return preds

    def topological_order(self) -> list[str]:
        ts = graphlib.TopologicalSorter(self.predecessors())
        return list(ts.static_order())


# ---------------------------------------------------------------------------
# geometry


def _proj_radius(half_x, half_y, yaw, axis_angle):
    d = yaw - axis_angle
    return half_x * np.abs(np.cos(d)) + half_y * np.abs(np.sin(d))


def penetration_depths(block: Block, others: Iterable[Block]) -> np.ndarray:
    """Interpenetration depth of ``block`` against each of ``others``.

    Boxes are yaw-only, so the test reduces to a 2-D separating-axis test on
    the footprints plus an overlap of the vertical extents.  Positive values
    are penetration depths; zero means touching; negative means a gap.
    """
    others = list(others)
    if not others:
        return np.zeros(0)
    c = np.array([o.position for o in others])
    h = np.array([o.dims for o in others]) * 0.5
    yaw = np.array([o.yaw for o in others])
    return _penetrations(np.asarray(block.position), block.half, block.yaw, c, h, yaw)


def _penetrations(c0, h0, yaw0, c, h, yaw):
    dz = np.minimum(c0[2] + h0[2], c[:, 2] + h[:, 2]) - np.maximum(c0[2] - h0[2], c[:, 2] - h[:, 2])
    delta = c[:, :2] - c0[:2]
    best = dz.copy()
    axes = [np.full(len(c), yaw0), np.full(len(c), yaw0 + np.pi / 2), yaw, yaw + np.pi / 2]
    for ang in axes:
        proj = np.abs(delta[:, 0] * np.cos(ang) + delta[:, 1] * np.sin(ang))
        overlap = (_proj_radius(h0[0], h0[1], yaw0, ang)
                   + _proj_radius(h[:, 0], h[:, 1], yaw, ang) - proj)
        best = np.minimum(best, overlap)
    return best


def validate_scene(scene: Scene, tol: float = CONTACT_TOL) -> Scene:
    """Raise :class:`ValidationError` if blocks interpenetrate or sink below ground."""
    blocks = scene.blocks
    for i, b in enumerate(blocks):
        if b.bottom < -tol:
            raise ValidationError(f"block {b.id!r} extends below the ground (bottom={b.bottom:.4g})")
        if i + 1 < len(blocks):
            depth = penetration_depths(b, blocks[i + 1:])
            bad = np.flatnonzero(depth > tol)
            if bad.size:
                other = blocks[i + 1 + bad[0]]
                raise ValidationError(
                    f"blocks {b.id!r} and {other.id!r} interpenetrate (depth {depth[bad[0]]:.4g})")
    return scene


def footprint_overlap_area(a: Block, b: Block) -> float:
    return Polygon(a.footprint()).intersection(Polygon(b.footprint())).area


def extract_support_graph(scene: Scene, tol: float = CONTACT_TOL) -> SupportGraph:
    """Support relations of a resting scene.

    ``i -> j`` when the top face of i lies within ``tol`` of the bottom face
    of j and their footprints share positive area.  Raises
    :class:`ValidationError` on cycles or on blocks with no support at all.
    """
    if tol <= 0:
        raise ValidationError("support tolerance must be positive")
    blocks = scene.blocks
    edges = []
    for a in blocks:
        for b in blocks:
            if a is b or abs(a.top - b.bottom) > tol:
                continue
            if footprint_overlap_area(a, b) > MIN_SUPPORT_AREA:
                edges.append((a.id, b.id))
    ground = tuple(b.id for b in blocks if abs(b.bottom) <= tol)
    graph = SupportGraph(tuple(scene.ids), tuple(edges), ground)
    try:
        graph.topological_order()
    except graphlib.CycleError as exc:
        raise ValidationError(f"support cycle among blocks {exc.args[1]}") from exc
    on_ground = set(ground)
    held = {j for _, j in edges}
    for b in blocks:
        if b.id not in on_ground and b.id not in held:
            raise ValidationError(f"block {b.id!r} is neither on the ground nor supported")
    return graph


# ---------------------------------------------------------------------------
# sampling

MAX_TRIES_PER_BLOCK = 2000
MAX_ROUNDS = 20


def sample_scattered_state(template: ScatterTemplate, seed: int) -> Scene:
    """Blocks lying flat at uniform positions and yaws, pairwise non-overlapping."""
    if template.count == 0:
        return Scene(())
    gen = _rng.stream(seed, _rng.SCATTER)
    hx, hy, hz = (0.5 * d for d in template.dims)
    reach = math.hypot(hx, hy)
    (w, h), (ox, oy) = template.workspace, template.origin
    if w < 2 * reach or h < 2 * reach:
        raise CapacityError(f"workspace {w}x{h} cannot hold a block of dims {template.dims}")
    half = np.array([hx, hy, hz])
    for _ in range(MAX_ROUNDS):
        centers = np.empty((template.count, 3))
        yaws = np.empty(template.count)
        placed = 0
        for k in range(template.count):
            for _try in range(MAX_TRIES_PER_BLOCK):
                c = np.array([gen.uniform(ox + reach, ox + w - reach),
                              gen.uniform(oy + reach, oy + h - reach), hz])
                yaw = gen.uniform(-math.pi, math.pi)
                if placed == 0:
                    break
                depth = _penetrations(c, half, yaw, centers[:placed],
                                      np.broadcast_to(half, (placed, 3)), yaws[:placed])
                if np.all(depth < 0):
                    break
            else:
                break
            centers[k], yaws[k] = c, yaw
            placed += 1
        if placed == template.count:
            blocks = tuple(
                Block(f"a{k}", template.dims, tuple(centers[k]), float(yaws[k]), template.colors[k])
                for k in range(template.count))
            return Scene(blocks)
    raise CapacityError(
        f"could not place {template.count} blocks in a {w}x{h} workspace after {MAX_ROUNDS} rounds")


BUCKET_ROWS, BUCKET_COLS = 10, 2
BUCKET_TARGETS = 5
BUCKET_PITCH = 1.5
BUCKET_COLORS = {"easy": "blue", "hard": "red"}
BUCKET_SITE = (17.0, 0.75)


def _bucket_targets(variant: str) -> list[tuple[float, float, float]]:
    x0, y0 = BUCKET_SITE
    if variant == "easy":
        # loose single layer on the bucket floor
        return [(x0 - 1.1, y0 - 0.55, 0.5), (x0, y0 - 0.55, 0.5), (x0 + 1.1, y0 - 0.55, 0.5),
                (x0 - 0.55, y0 + 0.55, 0.5), (x0 + 0.55, y0 + 0.55, 0.5)]
    # three in a row with two bridging on top
    return [(x0 - 1.0, y0, 0.5), (x0, y0, 0.5), (x0 + 1.0, y0, 0.5),
            (x0 - 0.5, y0, 1.5), (x0 + 0.5, y0, 1.5)]


def sample_bucket_trial(variant: str, seed: int) -> TrialSpec:
    """One random colouring of the 10 x 2 bucket array.

    Stage A is the fixed grid with five randomly chosen blocks recoloured
    (blue for ``easy``, red for ``hard``).  Stage B keeps the fifteen others
    in place and puts the five coloured blocks at the bucket site.
    """
    BucketTemplate(variant)
    color = BUCKET_COLORS[variant]
    gen = _rng.stream(seed, _rng.BUCKET)
    chosen = set(int(i) for i in gen.choice(BUCKET_ROWS * BUCKET_COLS, BUCKET_TARGETS, replace=False))
    a_blocks, b_blocks = [], []
    targets = iter(_bucket_targets(variant))
    for k in range(BUCKET_ROWS * BUCKET_COLS):
        row, col = divmod(k, BUCKET_COLS)
        pos = (row * BUCKET_PITCH, col * BUCKET_PITCH, 0.5)
        tag = color if k in chosen else "natural"
        a_blocks.append(Block(f"g{k:02d}", UNIT_DIMS, pos, 0.0, tag))
        b_blocks.append(Block(f"g{k:02d}", UNIT_DIMS, next(targets) if k in chosen else pos, 0.0, tag))
    tid = "12-E" if variant == "easy" else "12-H"
    return TrialSpec(tid, Scene(tuple(a_blocks)), Scene(tuple(b_blocks)))


# ---------------------------------------------------------------------------
# JSON format

_BLOCK_KEYS = {"id", "dims", "pos", "yaw", "color", "mass"}
_SCATTER_KEYS = {"count", "colors", "workspace", "origin", "dims"}


def _check_keys(obj, allowed, required, where):
    if not isinstance(obj, dict):
        raise SceneParseError(f"{where}: expected an object")
    unknown = set(obj) - allowed
    if unknown:
        raise SceneParseError(f"{where}: unknown field(s) {sorted(unknown)}")
    missing = set(required) - set(obj)
    if missing:
        raise SceneParseError(f"{where}: missing field(s) {sorted(missing)}")


def block_to_dict(b: Block) -> dict:
    return {"id": b.id, "dims": list(b.dims), "pos": list(b.position), "yaw": b.yaw,
            "color": b.color, "mass": b.mass}


def block_from_dict(d: dict) -> Block:
    where = f"block {d.get('id', '?')!r}" if isinstance(d, dict) else "block"
    _check_keys(d, _BLOCK_KEYS, {"id", "pos"}, where)
    try:
        return Block(d["id"], tuple(d.get("dims", UNIT_DIMS)), tuple(d["pos"]),
                     d.get("yaw", 0.0), d.get("color", "natural"), d.get("mass"))
    except TypeError as exc:
        raise SceneParseError(f"{where}: {exc}") from exc


def scene_to_dict(scene: Scene) -> dict:
    return {"blocks": [block_to_dict(b) for b in scene.blocks]}


def scene_from_dict(d: dict, validate: bool = True) -> Scene:
    _check_keys(d, {"blocks"}, {"blocks"}, "scene")
    if not isinstance(d["blocks"], list):
        raise SceneParseError("scene: 'blocks' must be a list")
    scene = Scene(tuple(block_from_dict(b) for b in d["blocks"]))
    return validate_scene(scene) if validate else scene


def _state_a_to_dict(a: StateA) -> dict:
    if isinstance(a, Scene):
        return scene_to_dict(a)
    if isinstance(a, ScatterTemplate):
        return {"scatter": {"count": a.count, "colors": list(a.colors),
                            "workspace": list(a.workspace), "origin": list(a.origin),
                            "dims": list(a.dims)}}
    return {"bucket": {"variant": a.variant}}


def _state_a_from_dict(d) -> StateA:
    if isinstance(d, dict) and "scatter" in d:
        _check_keys(d, {"scatter"}, {"scatter"}, "stateA")
        s = d["scatter"]
        _check_keys(s, _SCATTER_KEYS, {"count", "colors", "workspace"}, "scatter")
        return ScatterTemplate(s["count"], tuple(s["colors"]), tuple(s["workspace"]),
                               tuple(s.get("origin", (0.0, 0.0))), tuple(s.get("dims", UNIT_DIMS)))
    if isinstance(d, dict) and "bucket" in d:
        _check_keys(d, {"bucket"}, {"bucket"}, "stateA")
        _check_keys(d["bucket"], {"variant"}, {"variant"}, "bucket")
        return BucketTemplate(d["bucket"]["variant"])
    return scene_from_dict(d)


def trial_to_dict(t: TrialSpec) -> dict:
    return {"id": t.id, "stateA": _state_a_to_dict(t.state_a), "stateB": scene_to_dict(t.state_b)}


def trial_from_dict(d: dict) -> TrialSpec:
    _check_keys(d, {"id", "stateA", "stateB"}, {"id", "stateA", "stateB"}, "trial")
    return TrialSpec(str(d["id"]), _state_a_from_dict(d["stateA"]), scene_from_dict(d["stateB"]))


def _read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SceneParseError(f"{path}: {exc}") from exc


def load_scene(path) -> Scene:
    """Read and validate a scene file."""
    return scene_from_dict(_read_json(path))


def save_scene(scene: Scene, path) -> None:
    Path(path).write_text(json.dumps(scene_to_dict(scene), indent=1) + "\n", encoding="utf-8")


def load_trials(path) -> list[TrialSpec]:
    """Read a trial file: a single trial object, a list, or ``{"trials": [...]}``.

    The wrapped form may also carry a free-text ``"note"``.
    """
    data = _read_json(path)
    if isinstance(data, dict) and "trials" in data and set(data) <= {"trials", "note"}:
        data = data["trials"]
    if isinstance(data, dict):
        data = [data]
    if not isinstance(data, list):
        raise SceneParseError(f"{path}: expected a trial object or a list of trials")
    return [trial_from_dict(d) for d in data]


def save_trials(trials, path, note: str | None = None) -> None:
    payload = [trial_to_dict(t) for t in trials]
    if note is not None:
        payload = {"note": note, "trials": payload}
    Path(path).write_text(json.dumps(payload, indent=1) + "\n", encoding="utf-8")
