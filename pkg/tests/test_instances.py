import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import complete, path
from localcolor.generators import gen_graph
from localcolor.graph import Graph
from localcolor.instances import (
    ARBDEFECTIVE,
    DEFECTIVE,
    ListInstance,
    Solution,
    orient_toward_earlier,
    restrict_instance,
    slack_satisfied,
    verify_arbdefective,
    verify_defective,
)


def star(leaves):
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def random_instance(g, rng, C=5, mode=DEFECTIVE):
    return ListInstance(mode, C, {v: {x: rng.randint(0, 3) for x in rng.sample(range(C), rng.randint(1, C))}
                                  for v in g.nodes})


def test_slack_boundary_is_strict():
    g = star(3)
    inst = ListInstance(ARBDEFECTIVE, 4, {v: {x: 0 for x in range(4)} for v in g.nodes})
    ok, rep = slack_satisfied(g, inst, 1)
    assert ok and rep.ratios[0] == Fraction(4, 3)
    assert not slack_satisfied(g, inst, Fraction(4, 3))[0]


def test_slack_two_fails_at_equality():
    g = path(3)
    inst = ListInstance(DEFECTIVE, 2, {0: {0: 0}, 1: {0: 1, 1: 1}, 2: {0: 0}})
    ok, rep = slack_satisfied(g, inst, 2)
    assert not ok and rep.ratios[1] == 2


def test_isolated_node_has_infinite_slack():
    g = Graph.from_edges(1, [])
    ok, rep = slack_satisfied(g, ListInstance(DEFECTIVE, 3, {0: {}}), 10**9)
    assert ok and rep.minimum == math.inf


def test_slack_accepts_float_exactly():
    g = path(2)
    inst = ListInstance(DEFECTIVE, 3, {0: {0: 0, 1: 0}, 1: {0: 0, 1: 0}})
    assert slack_satisfied(g, inst, 1.5)[0]
    assert not slack_satisfied(g, inst, 2.0)[0]


def test_verify_defective_triangle():
    k3 = complete(3)
    sol = Solution({0: 5, 1: 5, 2: 5})
    inst = ListInstance(DEFECTIVE, 6, {v: {5: 2} for v in range(3)})
    assert verify_defective(k3, inst, sol) == []
    inst.lists[1] = {5: 1}
    assert verify_defective(k3, inst, sol) == [1]


def test_verify_arbdefective_orientation():
    g = path(2)
    inst = ListInstance(ARBDEFECTIVE, 4, {0: {3: 1}, 1: {3: 0}})
    assert verify_arbdefective(g, inst, Solution({0: 3, 1: 3}, {(0, 1)})) == []
    assert verify_arbdefective(g, inst, Solution({0: 3, 1: 3}, {(1, 0)})) == [1]


def test_verify_arbdefective_edge_problems():
    g = path(3)
    inst = ListInstance(ARBDEFECTIVE, 2, {v: {0: 2, 1: 2} for v in range(3)})
    bad = verify_arbdefective(g, inst, Solution({0: 0, 1: 0, 2: 1}, {(1, 2)}))
    assert ("unoriented", 0, 1) in bad and ("extraneous", 1, 2) in bad
    bad = verify_arbdefective(g, inst, Solution({0: 0, 1: 0, 2: 1}, {(0, 1), (1, 0)}))
    assert ("double", 0, 1) in bad


def test_color_outside_list_is_flagged():
    g = path(2)
    inst = ListInstance(DEFECTIVE, 3, {0: {0: 0}, 1: {1: 0}})
    assert verify_defective(g, inst, Solution({0: 2, 1: 1})) == [0]


def test_defective_valid_implies_arbdefective_valid_any_orientation():
    rng = random.Random(3)
    for trial in range(100):
        g = gen_graph(10, 0.4, seed=trial)
        inst = random_instance(g, rng)
        colors = {v: rng.choice(sorted(inst.lists[v])) for v in g.nodes}
        sol = Solution(colors)
        if verify_defective(g, inst, sol):
            continue
        orient = set()
        for u, v in g.edges():
            if colors[u] == colors[v]:
                orient.add((u, v) if rng.random() < 0.5 else (v, u))
        arb = ListInstance(ARBDEFECTIVE, inst.C, inst.lists)
        assert verify_arbdefective(g, arb, Solution(colors, orient)) == []


def test_restrict_examples():
    g = star(2)
    inst = ListInstance(DEFECTIVE, 3, {0: {0: 2, 1: 1}, 1: {0: 0}, 2: {0: 0}})
    assert restrict_instance(g, inst, [0], {}).lists == {0: {0: 2, 1: 1}}
    assert restrict_instance(g, inst, [0], {1: 0, 2: 0}).lists == {0: {0: 0, 1: 1}}
    inst.lists[0] = {0: 1, 1: 1}
    assert restrict_instance(g, inst, [0], {1: 0, 2: 0}).lists == {0: {1: 1}}
    with pytest.raises(ValueError):
        restrict_instance(g, inst, [1], {1: 0})


@given(st.integers(0, 10**6))
def test_restrict_never_grows(seed):
    rng = random.Random(seed)
    g = gen_graph(9, 0.4, seed=seed)
    inst = random_instance(g, rng)
    colored = set(rng.sample(g.nodes, rng.randint(0, g.n - 1)))
    context = {v: rng.choice(sorted(inst.lists[v])) for v in colored}
    rest = [v for v in g.nodes if v not in colored]
    sub = restrict_instance(g, inst, rest, context)
    for v in rest:
        assert set(sub.lists[v]) <= set(inst.lists[v])
        assert all(d <= inst.lists[v][x] for x, d in sub.lists[v].items())


@given(st.integers(0, 10**6))
def test_slack_zero_with_nonempty_lists(seed):
    rng = random.Random(seed)
    g = gen_graph(8, 0.5, seed=seed)
    assert slack_satisfied(g, random_instance(g, rng), 0)[0]


@given(st.integers(0, 10**6))
def test_composing_restricted_solutions(seed):
    """Color a prefix, restrict the rest, solve it validly, orient toward earlier nodes: the union is valid."""
    rng = random.Random(seed)
    g = gen_graph(9, 0.45, seed=seed)
    inst = ListInstance(ARBDEFECTIVE, 4, {v: {x: g.degree(v) for x in range(4)} for v in g.nodes})
    first = rng.sample(g.nodes, g.n // 2)
    colors = {v: rng.randrange(4) for v in first}
    orient = set()
    for u, v in g.subgraph(first).edges():
        if colors[u] == colors[v]:
            orient.add((u, v))
    rest = [v for v in g.nodes if v not in colors]
    sub = restrict_instance(g, inst, rest, colors)
    later = {v: min(sub.lists[v]) for v in rest}
    inner = {(u, v) for u, v in g.subgraph(rest).edges() if later[u] == later[v]}
    orient |= inner | orient_toward_earlier(g, rest, later, colors)
    assert verify_arbdefective(g, inst, Solution({**colors, **later}, orient)) == []


def test_json_round_trip():
    inst = ListInstance(ARBDEFECTIVE, 5, {0: {1: 2, 4: 0}, 3: {}})
    assert ListInstance.from_json(inst.to_json()) == inst
    sol = Solution({0: 1, 3: 4}, {(0, 3)})
    assert Solution.from_json(sol.to_json()) == sol
    assert Solution.from_json(Solution({0: 1}).to_json()).orientation is None


def test_instance_validation():
    with pytest.raises(ValueError):
        ListInstance("other", 3, {})
    with pytest.raises(ValueError):
        ListInstance(DEFECTIVE, 3, {0: {3: 0}})
    with pytest.raises(ValueError):
        ListInstance(DEFECTIVE, 3, {0: {1: -1}})
