"""Grasp/Place sequences that build State B from the ground up."""

from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass

from .assign import Assignment
from .errors import PlanningError, ValidationError
from .scene import Block, Scene, SupportGraph, extract_support_graph

MOVE_TOL = 0.05
YAW_TOL = 0.05
GROUND = "ground"


@dataclass(frozen=True)
class Action:
    kind: str  # "grasp" | "place"
    subject: str  # A-frame block id
    target: object = None  # place: GROUND or tuple of B-frame supporter ids

    def to_dict(self) -> dict:
        target = self.target if self.target in (None, GROUND) else list(self.target)
        return {"kind": self.kind, "subject": self.subject, "target": target}


@dataclass(frozen=True)
class SymbolicPlan:
    actions: tuple[Action, ...]
    moved_blocks: frozenset
    placements: tuple[tuple[str, str], ...]  # (A id, B id) in build order

    def __len__(self):
        return len(self.actions)

    def to_json(self) -> str:
        return json.dumps([a.to_dict() for a in self.actions], indent=1)


def yaw_gap(a: Block, b: Block) -> float:
    """Smallest yaw difference, modulo the footprint's rotational symmetry."""
    square = math.isclose(a.dims[0], a.dims[1], rel_tol=1e-9)
    period = math.pi / 2 if square else math.pi
    d = (a.yaw - b.yaw) % period
    return min(d, period - d)


def needs_move(a: Block, b: Block) -> bool:
    return math.dist(a.position, b.position) > MOVE_TOL or yaw_gap(a, b) > YAW_TOL


def _closure(moved_b: set, graph_b: SupportGraph, graph_a: SupportGraph | None,
             b_of_a: dict) -> set:
    # a block cannot stay put if anything under it (in A or in B) has to move
    changed = True
    while changed:
        changed = False
        for i, j in graph_b.edges:
            if i in moved_b and j not in moved_b:
                moved_b.add(j)
                changed = True
        if graph_a is not None:
            for i, j in graph_a.edges:
                if b_of_a[i] in moved_b and b_of_a[j] not in moved_b:
                    moved_b.add(b_of_a[j])
                    changed = True
    return moved_b


def plan_symbolic(state_a: Scene, state_b: Scene, assignment: Assignment) -> SymbolicPlan:
    """Order the moved blocks so every block's B-supporters are placed first.

    Ready blocks are released lowest target base first, then by B id.
    """
    a_by_id, b_by_id = state_a.by_id(), state_b.by_id()
    b_of_a = dict(assignment.pairs)
    if sorted(b_of_a) != sorted(a_by_id) or sorted(b_of_a.values()) != sorted(b_by_id):
        raise ValidationError("assignment is not a bijection between the two scenes")
    a_of_b = {b: a for a, b in b_of_a.items()}
    for a, b in b_of_a.items():
        if a_by_id[a].color != b_by_id[b].color:
            raise ValidationError(f"assignment pairs {a!r} with {b!r} of a different color")
    try:
        graph_b = extract_support_graph(state_b)
    except ValidationError as exc:
        raise PlanningError(f"target structure cannot be ordered: {exc}") from exc
    try:
        graph_a = extract_support_graph(state_a)
    except ValidationError:
        graph_a = None

    moved_b = {b for a, b in b_of_a.items() if needs_move(a_by_id[a], b_by_id[b])}
    if moved_b:
        moved_b = _closure(moved_b, graph_b, graph_a, b_of_a)

    preds = graph_b.predecessors()
    indeg = {n: len(p) for n, p in preds.items()}
    succ = {n: [] for n in graph_b.nodes}
    for i, j in graph_b.edges:
        succ[i].append(j)
    heap = [(b_by_id[n].bottom, n) for n, d in indeg.items() if d == 0]
    heapq.heapify(heap)
    actions, placements = [], []
    emitted = 0
    while heap:
        _, node = heapq.heappop(heap)
        emitted += 1
        if node in moved_b:
            subject = a_of_b[node]
            target = tuple(sorted(preds[node])) or GROUND
            actions.append(Action("grasp", subject))
            actions.append(Action("place", subject, target))
            placements.append((subject, node))
        for nxt in succ[node]:
            indeg[nxt] -= 1
            if indeg[nxt] == 0:
                heapq.heappush(heap, (b_by_id[nxt].bottom, nxt))
    if emitted != len(graph_b.nodes):
        raise PlanningError("support cycle in target structure")
    return SymbolicPlan(tuple(actions), frozenset(a_of_b[b] for b in moved_b), tuple(placements))


def check_prefix(plan: SymbolicPlan, graph_b: SupportGraph, assignment: Assignment) -> bool:
    """True iff every Place happens after all of its B-supporters are in place."""
    b_of_a = assignment.pairs
    moved_b = {b_of_a[a] for a in plan.moved_blocks}
    in_place = set(graph_b.nodes) - moved_b
    holding = None
    for act in plan.actions:
        if act.kind == "grasp":
            if holding is not None:
                return False
            holding = act.subject
            continue
        if act.subject != holding:
            return False
        holding = None
        node = b_of_a[act.subject]
        needed = set(graph_b.supporters(node))
        target = set() if act.target == GROUND else set(act.target)
        if target != needed or not needed <= in_place:
            return False
        in_place.add(node)
    return holding is None


def execute_plan(state_a: Scene, state_b: Scene, plan: SymbolicPlan) -> Scene:
    """Teleport each placed block to its B pose, in plan order (A ids kept)."""
    current = state_a.by_id()
    b_by_id = state_b.by_id()
    for a_id, b_id in plan.placements:
        target = b_by_id[b_id]
        current[a_id] = current[a_id].moved_to(target.position, target.yaw)
    return Scene(tuple(current[b.id] for b in state_a.blocks))
