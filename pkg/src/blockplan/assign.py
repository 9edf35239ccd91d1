"""Minimum-distance, colour-respecting matching of A blocks to B blocks."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleError
from .scene import Scene


@dataclass(frozen=True)
class Assignment:
    pairs: dict  # A id -> B id
    total_distance: float

    def inverse(self) -> dict:
        return {b: a for a, b in self.pairs.items()}


def hungarian(cost: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Solve a square linear assignment problem.

    Shortest-augmenting-path Hungarian method with row/column potentials,
    O(n^3).

    Returns:
        ``(col_of_row, u, v)``: the optimal column for every row and the
        dual potentials, which satisfy ``u[i] + v[j] <= cost[i, j]`` with
        equality on matched cells.
    """
    cost = np.asarray(cost, dtype=float)
    n = cost.shape[0]
    if cost.shape != (n, n):
        raise ValueError("cost matrix must be square")
    u = np.zeros(n + 1)
    v = np.zeros(n + 1)
    row_of = np.zeros(n + 1, dtype=int)  # column j (1-based) -> row (1-based), 0 = free
    way = np.zeros(n + 1, dtype=int)
    for i in range(1, n + 1):
        row_of[0] = i
        j0 = 0
        minv = np.full(n + 1, np.inf)
        used = np.zeros(n + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = row_of[j0]
            free = ~used
            free[0] = False
            cols = np.flatnonzero(free)
            cur = cost[i0 - 1, cols - 1] - u[i0] - v[cols]
            better = cur < minv[cols]
            minv[cols[better]] = cur[better]
            way[cols[better]] = j0
            k = np.argmin(minv[cols])
            j1 = cols[k]
            delta = minv[j1]
            u[row_of[used]] += delta
            v[used] -= delta
            minv[cols] -= delta
            j0 = j1
            if row_of[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            row_of[j0] = row_of[j1]
            j0 = j1
    col_of_row = np.empty(n, dtype=int)
    for j in range(1, n + 1):
        col_of_row[row_of[j] - 1] = j - 1
    return col_of_row, u[1:], v[1:]


def _lexicographic_matching(tight: np.ndarray, start: np.ndarray) -> np.ndarray:
    """Lexicographically smallest perfect matching inside a bipartite graph.

    ``tight[i, j]`` marks admissible cells; ``start`` is any perfect matching
    using only admissible cells.  Rows and columns are assumed sorted.
    """
    n = tight.shape[0]
    match = start.copy()
    owner = np.empty(n, dtype=int)
    owner[match] = np.arange(n)
    fixed_cols = np.zeros(n, dtype=bool)

    def augment(row, banned_col, seen):
        # find an alternating path from `row` to a free column, avoiding fixed/banned columns
        for col in np.flatnonzero(tight[row]):
            if fixed_cols[col] or col == banned_col or seen[col]:
                continue
            seen[col] = True
            if owner[col] < 0 or augment(owner[col], banned_col, seen):
                match[row] = col
                owner[col] = row
                return True
        return False

    for r in range(n):
        for c in np.flatnonzero(tight[r]):
            if fixed_cols[c]:
                continue
            if match[r] == c:
                break
            snapshot = match.copy(), owner.copy()
            displaced = owner[c]
            old = match[r]
            # give c to r, free r's old column, reroute the displaced row
            owner[old] = -1
            match[r] = c
            owner[c] = r
            match[displaced] = -1
            fixed_cols[c] = True
            seen = np.zeros(n, dtype=bool)
            ok = augment(displaced, c, seen)
            fixed_cols[c] = False
            if ok:
                break
            match[:], owner[:] = snapshot
        fixed_cols[match[r]] = True
    return match


def distance_matrix(state_a: Scene, state_b: Scene) -> np.ndarray:
    return np.array([[math.dist(a.position, b.position) for b in state_b] for a in state_a])


def assign_blocks(state_a: Scene, state_b: Scene) -> Assignment:
    """Colour-respecting bijection A -> B with minimum total centre distance.

    Ties between equal-cost optima resolve to the lexicographically smallest
    pairing over (sorted A id, sorted B id).
    """
    ca, cb = state_a.colors(), state_b.colors()
    if ca != cb:
        mismatched = sorted(set((ca - cb) + (cb - ca)))
        raise InfeasibleError(f"color multisets of A and B differ: {mismatched}")
    n = len(state_a)
    if n == 0:
        return Assignment({}, 0.0)
    a_blocks = sorted(state_a.blocks, key=lambda b: b.id)
    b_blocks = sorted(state_b.blocks, key=lambda b: b.id)
    dist = distance_matrix(Scene(tuple(a_blocks)), Scene(tuple(b_blocks)))
    same = np.array([[a.color == b.color for b in b_blocks] for a in a_blocks])
    sentinel = n * float(dist.max()) + 1.0
    cost = np.where(same, dist, sentinel)

    col, u, v = hungarian(cost)
    eps = 1e-9 * max(1.0, float(dist.max()))
    tight = same & (cost - u[:, None] - v[None, :] <= eps)
    lex = _lexicographic_matching(tight, col)
    rows = np.arange(n)
    if math.fsum(cost[rows, lex]) > math.fsum(cost[rows, col]):
        lex = col  # the tolerance admitted a float-level worse matching
    pairs = {a_blocks[i].id: b_blocks[lex[i]].id for i in range(n)}
    total = math.fsum(dist[i, lex[i]] for i in range(n))
    return Assignment(pairs, total)
