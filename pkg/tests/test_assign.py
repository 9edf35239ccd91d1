import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linear_sum_assignment

from blockplan.assign import assign_blocks, hungarian
from blockplan.errors import InfeasibleError
from blockplan.scene import Block, Scene

from conftest import cube

COLORS = ("red", "blue", "green")


def random_pair(gen, n, colors=COLORS):
    cols = [colors[k] for k in gen.integers(0, len(colors), n)]
    a = Scene(tuple(Block(f"a{i}", position=(*gen.uniform(-5, 5, 2), 0.5), color=c)
                    for i, c in enumerate(cols)))
    perm = gen.permutation(n)
    b = Scene(tuple(Block(f"b{i}", position=(*gen.uniform(-5, 5, 2), 0.5 + gen.integers(0, 3)),
                          color=cols[perm[i]]) for i in range(n)))
    return a, b


def brute_force(a: Scene, b: Scene) -> float:
    best = math.inf
    for perm in itertools.permutations(range(len(b))):
        if any(a.blocks[i].color != b.blocks[j].color for i, j in enumerate(perm)):
            continue
        total = math.fsum(float(np.linalg.norm(np.subtract(a.blocks[i].position, b.blocks[j].position)))
                          for i, j in enumerate(perm))
        best = min(best, total)
    return best


def test_identity_zero():
    s = Scene((cube(0), cube(1, 2.0)))
    res = assign_blocks(s, s)
    assert res.total_distance == 0.0 and res.pairs == {"b0": "b0", "b1": "b1"}


def test_color_beats_distance():
    a = Scene((Block("g", position=(0, 0, 0.5), color="green"),
               Block("y", position=(10, 0, 0.5), color="yellow")))
    b = Scene((Block("G", position=(10, 0, 0.5), color="green"),
               Block("Y", position=(0, 0, 0.5), color="yellow")))
    assert assign_blocks(a, b).pairs == {"g": "G", "y": "Y"}


def test_infeasible_lists_colors():
    a = Scene((Block("g", color="green"),))
    b = Scene((Block("y", color="yellow"),))
    with pytest.raises(InfeasibleError, match="green"):
        assign_blocks(a, b)


def test_five_same_color_match_brute_force(rng):
    for _ in range(20):
        a, b = random_pair(rng, 5, ("natural",))
        assert math.isclose(assign_blocks(a, b).total_distance, brute_force(a, b), rel_tol=1e-12)


def test_bijection_and_distance_sum(rng):
    a, b = random_pair(rng, 7)
    res = assign_blocks(a, b)
    assert sorted(res.pairs) == sorted(a.ids) and sorted(res.pairs.values()) == sorted(b.ids)
    pa, pb = a.by_id(), b.by_id()
    assert all(pa[i].color == pb[j].color for i, j in res.pairs.items())
    d = math.fsum(math.dist(pa[i].position, pb[j].position) for i, j in res.pairs.items())
    assert math.isclose(d, res.total_distance, rel_tol=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 6))
def test_order_and_translation_invariance(seed, n):
    gen = np.random.default_rng(seed)
    a, b = random_pair(gen, n)
    base = assign_blocks(a, b)
    shuffled = Scene(tuple(a.blocks[i] for i in gen.permutation(n)))
    assert assign_blocks(shuffled, b).pairs == base.pairs
    shift = gen.uniform(-100, 100, 3)
    moved = assign_blocks(a.translated(shift), b.translated(shift))
    assert math.isclose(moved.total_distance, base.total_distance, rel_tol=1e-9)


def test_hungarian_matches_scipy(rng):
    for n in (1, 2, 5, 9, 15):
        cost = rng.uniform(0, 10, (n, n))
        rows, cols = linear_sum_assignment(cost)
        col_of, u, v = hungarian(cost)
        assert np.all(u[:, None] + v[None, :] <= cost + 1e-9)
        assert math.isclose(cost[np.arange(n), col_of].sum(), cost[rows, cols].sum(), rel_tol=1e-12)


def test_tie_break_lexicographic():
    # all four blocks equidistant pairings: pick sorted (A, B) pairs
    a = Scene((Block("a0", position=(0, 0, 0.5)), Block("a1", position=(0, 2, 0.5))))
    b = Scene((Block("b0", position=(1, 1, 0.5)), Block("b1", position=(-1, 1, 0.5))))
    assert assign_blocks(a, b).pairs == {"a0": "b0", "a1": "b1"}
