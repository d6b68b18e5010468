import itertools
import random

import pytest
from hypothesis import given, strategies as st

from conftest import complete, make_context
from localcolor.errors import SearchTimeout, SizeLimit
from localcolor.generators import gen_graph, gen_instance
from localcolor.graph import Graph
from localcolor.instances import ARBDEFECTIVE, DEFECTIVE, ListInstance, Solution, verify_arbdefective, verify_defective
from localcolor.oracle import brute_force_solve, orient_with_capacities, rd_tree_layout, tree_counterexample_search
from localcolor.primitives import base_arbdefective


def orientable_naive(edges, cap):
    for bits in itertools.product((0, 1), repeat=len(edges)):
        out = {}
        for (u, v), b in zip(edges, bits):
            t = u if b == 0 else v
            out[t] = out.get(t, 0) + 1
        if all(c <= cap.get(v, 0) for v, c in out.items()):
            return True
    return False


@given(st.integers(0, 10**6))
def test_orientation_matches_naive(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 6)
    pairs = list(itertools.combinations(range(n), 2))
    edges = rng.sample(pairs, rng.randint(0, min(8, len(pairs))))
    cap = {v: rng.randint(0, 2) for v in range(n)}
    got = orient_with_capacities(edges, cap)
    assert (got is not None) == orientable_naive(edges, cap)
    if got is not None:
        assert {frozenset(e) for e in got} == {frozenset(e) for e in edges} and len(got) == len(edges)
        for v in range(n):
            assert sum(1 for a, _ in got if a == v) <= cap[v]


def test_triangle_two_colors_unsolvable():
    inst = ListInstance(DEFECTIVE, 2, {v: {0: 0, 1: 0} for v in range(3)})
    assert brute_force_solve(complete(3), inst) is None


def test_triangle_three_colors_solvable():
    inst = ListInstance(DEFECTIVE, 3, {v: {0: 0, 1: 0, 2: 0} for v in range(3)})
    sol = brute_force_solve(complete(3), inst)
    assert sorted(sol.colors.values()) == [0, 1, 2]


def test_arbdefective_needs_orientation_search():
    # K4 with one color and arbdefect 1 each: 6 edges, capacity 4, impossible
    k4 = complete(4)
    assert brute_force_solve(k4, ListInstance(ARBDEFECTIVE, 1, {v: {0: 1} for v in range(4)})) is None
    # capacity 2 each allows an Eulerian-style orientation
    sol = brute_force_solve(k4, ListInstance(ARBDEFECTIVE, 1, {v: {0: 2} for v in range(4)}))
    assert verify_arbdefective(k4, ListInstance(ARBDEFECTIVE, 1, {v: {0: 2} for v in range(4)}), sol) == []


def test_size_limit():
    with pytest.raises(SizeLimit):
        brute_force_solve(Graph.from_edges(13, []), ListInstance(DEFECTIVE, 1, {v: {0: 0} for v in range(13)}))


def all_candidates(g, inst):
    nodes = g.nodes
    for combo in itertools.product(*(sorted(inst.lists[v]) for v in nodes)):
        yield dict(zip(nodes, combo))


def test_unsolvable_means_every_candidate_fails():
    rng = random.Random(5)
    seen = 0
    for trial in range(300):
        g = gen_graph(6, 0.6, seed=trial)
        inst = ListInstance(DEFECTIVE, 3, {v: {x: rng.randint(0, 1) for x in rng.sample(range(3), rng.randint(1, 2))}
                                           for v in g.nodes})
        if brute_force_solve(g, inst) is not None:
            continue
        seen += 1
        cands = list(all_candidates(g, inst))
        for colors in rng.sample(cands, min(100, len(cands))):
            assert verify_defective(g, inst, Solution(colors))
    assert seen > 0


@given(st.integers(0, 10**6))
def test_random_solutions_verify(seed):
    rng = random.Random(seed)
    g = gen_graph(rng.randint(2, 9), 0.4, seed=seed, max_degree=6)
    mode = rng.choice([DEFECTIVE, ARBDEFECTIVE])
    inst = ListInstance(mode, 4, {v: {x: rng.randint(0, 2) for x in rng.sample(range(4), rng.randint(1, 3))}
                                  for v in g.nodes})
    sol = brute_force_solve(g, inst)
    if sol is not None:
        check = verify_defective if mode == DEFECTIVE else verify_arbdefective
        assert check(g, inst, sol) == []


def test_slack_one_always_solvable_and_base_agrees():
    for seed in range(40):
        rng = random.Random(seed)
        g = gen_graph(rng.randint(2, 10), rng.uniform(0.2, 0.6), seed=seed, max_degree=6)
        inst = gen_instance(g, rng.randint(2, 8), 1, ARBDEFECTIVE, seed)
        assert brute_force_solve(g, inst) is not None
        ctx = make_context(g, theta=1)
        sol, _ = base_arbdefective(g, inst, ctx.qcoloring, ctx.q)
        assert verify_arbdefective(g, inst, sol) == []


def test_layout_counts():
    assert len(rd_tree_layout(3, 3, 4).layer) == 1 + 6 + 24
    assert len(rd_tree_layout(4, 3, 4).layer) == 1 + 8 + 48
    assert len(rd_tree_layout(3, 4, 4).layer) == 1 + 9 + 54
    lay = rd_tree_layout(3, 3, 4)
    for i, layer in enumerate(lay.layer):
        if layer <= 2:
            assert len(lay.dist2[i]) == 3 * 2


@pytest.mark.parametrize("r,d,size", [(3, 3, 31), (4, 3, 57), (3, 4, 64)])
def test_tree_search_unsat(r, d, size):
    res = tree_counterexample_search(r, d, 1)
    assert not res.sat and res.coloring is None and len(res.layout.layer) == size
    assert res.to_json()["result"] == "unsat"


def test_relaxed_bound_is_sat():
    res = tree_counterexample_search(3, 3, 1, bound=3 * 2)
    assert res.sat
    deep = [i for i, layer in enumerate(res.layout.layer) if layer == 4]
    assert res.coloring[0] == 0 and all(res.coloring[i] == 1 for i in deep)
    js = res.to_json()
    assert js["result"] == "sat" and len(js["coloring"]) == 31


def test_tree_search_timeout():
    with pytest.raises(SearchTimeout):
        tree_counterexample_search(3, 3, 2, timeout=0.05)


def test_tree_search_rejects_small_parameters():
    with pytest.raises(ValueError):
        tree_counterexample_search(2, 3, 1)
