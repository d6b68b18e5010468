"""Random hypergraphs, graphs and list instances."""
from __future__ import annotations

import random
from fractions import Fraction

from .errors import InfeasibleParams
from .graph import Graph, Hypergraph
from .instances import ARBDEFECTIVE, ListInstance


def gen_hypergraph(n: int, r: int, d: int, seed: int) -> Hypergraph:
    """Configuration-model r-uniform hypergraph in which every node has degree d.

    Stubs are shuffled into groups of r; groups that repeat a node are repaired
    by swapping stubs with random other groups whenever the swap lowers the
    number of repeats.
    """
    if r < 2 or d < 1 or n < r or (n * d) % r:
        raise InfeasibleParams(f"no {r}-uniform {d}-regular hypergraph on {n} nodes")
    rng = random.Random(seed)
    stubs = [v for v in range(n) for _ in range(d)]
    rng.shuffle(stubs)
    m = len(stubs) // r
    edges = [stubs[i * r:(i + 1) * r] for i in range(m)]

    def repeats(e):
        return len(e) - len(set(e))

    for _ in range(1000 * m):
        bad = [i for i, e in enumerate(edges) if repeats(e)]
        if not bad:
            return Hypergraph(n, tuple(tuple(sorted(e)) for e in edges))
        i = bad[0]
        j = rng.randrange(m)
        if j == i:
            continue
        a, b = rng.randrange(r), rng.randrange(r)
        ei, ej = list(edges[i]), list(edges[j])
        ei[a], ej[b] = ej[b], ei[a]
        # accept swaps that lower the total number of repeated stubs
        if repeats(ei) + repeats(ej) < repeats(edges[i]) + repeats(edges[j]):
            edges[i], edges[j] = ei, ej
    raise InfeasibleParams(f"could not repair repeated nodes for n={n}, r={r}, d={d}")


def gen_graph(n: int, p: float, seed: int, max_degree: int | None = None) -> Graph:
    """Erdos-Renyi style graph, optionally dropping edges that would exceed ``max_degree``."""
    rng = random.Random(seed)
    deg = [0] * n
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p and (max_degree is None or (deg[u] < max_degree and deg[v] < max_degree)):
                edges.append((u, v))
                deg[u] += 1
                deg[v] += 1
    return Graph.from_edges(n, edges)


def delta_plus_one(g: Graph, mode: str = ARBDEFECTIVE) -> ListInstance:
    """Lists {0..Delta}, all defects 0."""
    C = g.delta + 1
    return ListInstance(mode, C, {v: {x: 0 for x in range(C)} for v in g.nodes})


def gen_instance(g: Graph, C: int, S, mode: str, seed: int, preset: str | None = None) -> ListInstance:
    """Random lists and defects with slack S that is tight somewhere (slack 2S fails on some node).

    Colors are drawn in random order with defects up to about S*deg/2; the list
    stops growing as soon as the slack condition holds.  ``preset="delta+1"``
    returns the (Delta+1)-coloring instance instead.
    """
    if preset is not None:
        if preset.lower() in ("delta+1", "(δ+1)", "(delta+1)"):
            return delta_plus_one(g, mode)
        raise ValueError(f"unknown preset {preset!r}")
    if C < 2:
        raise ValueError("need C >= 2")
    S = Fraction(S)
    rng = random.Random(seed)
    lists: dict[int, dict[int, int]] = {}
    for v in g.nodes:
        deg = g.degree(v)
        target = S * deg
        cap = max(0, int(target / 2) - 1)
        order = list(range(C))
        rng.shuffle(order)
        lst: dict[int, int] = {}
        total = 0
        for x in order:
            if total > target and lst:
                break
            d = rng.randint(0, cap)
            lst[x] = d
            total += d + 1
        keys = sorted(lst)
        while total <= target:
            x = keys[rng.randrange(len(keys))]
            lst[x] += 1
            total += 1
        lists[v] = dict(sorted(lst.items()))
    return ListInstance(mode, C, lists)
