"""Exhaustive ground truth: tiny-instance solver and the tree counterexample search."""
from __future__ import annotations

import time
from dataclasses import dataclass, field

from .errors import SearchTimeout, SizeLimit
from .graph import Graph
from .instances import ARBDEFECTIVE, ListInstance, Solution

MAX_NODES, MAX_COLORS, MAX_DEGREE = 12, 8, 6


def orient_with_capacities(edges: list[tuple[int, int]], cap: dict[int, int]) -> set[tuple[int, int]] | None:
    """Orient every edge so node v has out-degree <= cap[v]; None if impossible.

    Edges are handed to a tail endpoint one at a time; when both endpoints are
    full, an augmenting path shifts already placed edges to their other endpoint.
    """
    load: dict[int, int] = {}
    owned: dict[int, list[int]] = {}
    for e in edges:
        for v in e:
            load.setdefault(v, 0)
            owned.setdefault(v, [])

    def other(e, v):
        a, b = edges[e]
        return b if a == v else a

    def transfer(e, v, u):
        owned[v].remove(e)
        load[v] -= 1
        owned[u].append(e)
        load[u] += 1

    def move(e, v, seen):
        u = other(e, v)
        if u in seen:
            return False
        seen.add(u)
        if load[u] < cap.get(u, 0) or any(move(f, u, seen) for f in list(owned[u])):
            transfer(e, v, u)
            return True
        return False

    for e, ends in enumerate(edges):
        seen: set[int] = set()
        for v in ends:
            if v in seen:
                continue
            seen.add(v)
            if load[v] < cap.get(v, 0) or any(move(f, v, seen) for f in list(owned[v])):
                owned[v].append(e)
                load[v] += 1
                break
        else:
            return None
    return {(v, other(e, v)) for v, es in owned.items() for e in es}


def _mono_edges(g: Graph, colors: dict[int, int]) -> list[tuple[int, int]]:
    return [(u, v) for u, v in g.edges() if u in colors and v in colors and colors[u] == colors[v]]


def _feasible(g: Graph, inst: ListInstance, colors: dict[int, int], v: int) -> bool:
    """Check constraints touched by coloring v, given a partial coloring."""
    x = colors[v]
    if inst.mode == ARBDEFECTIVE:
        edges = _mono_edges(g.subgraph([u for u, y in colors.items() if y == x]), colors)
        cap = {u: inst.lists[u][x] for u, y in colors.items() if y == x}
        return orient_with_capacities(edges, cap) is not None
    for w in (v, *g.adj[v]):
        if w in colors and colors[w] == x:
            same = sum(1 for u in g.adj[w] if colors.get(u) == x)
            if same > inst.lists[w][x]:
                return False
    return True


def brute_force_solve(g: Graph, inst: ListInstance) -> Solution | None:
    """Exhaustive backtracking; returns a valid solution or None if the instance is unsolvable."""
    if g.n > MAX_NODES or inst.C > MAX_COLORS or g.delta > MAX_DEGREE:
        raise SizeLimit(f"brute force limited to n<={MAX_NODES}, C<={MAX_COLORS}, Delta<={MAX_DEGREE}")
    order = sorted(g.nodes, key=lambda v: (-g.degree(v), v))
    colors: dict[int, int] = {}

    def rec(i):
        if i == len(order):
            return True
        v = order[i]
        for x in sorted(inst.lists.get(v, {})):
            colors[v] = x
            if _feasible(g, inst, colors, v) and rec(i + 1):
                return True
            del colors[v]
        return not inst.lists.get(v) and g.degree(v) == 0 and rec(i + 1)

    if not rec(0):
        return None
    if inst.mode != ARBDEFECTIVE:
        return Solution(dict(colors))
    orientation: set[tuple[int, int]] = set()
    for x in set(colors.values()):
        cls = [u for u, y in colors.items() if y == x]
        edges = _mono_edges(g.subgraph(cls), colors)
        orientation |= orient_with_capacities(edges, {u: inst.lists[u][x] for u in cls})
    return Solution(dict(colors), orientation)


# --- tree counterexample search -----------------------------------------

@dataclass
class RdTreeLayout:
    """Degree-r nodes of the complete (r,d)-regular tree, indexed in BFS order.

    ``layer[i]`` is the bipartite depth (0, 2, 4, ...), ``parent[i]`` the
    degree-r grandparent, and ``dist2[i]`` the degree-r nodes at distance two.
    """

    r: int
    d: int
    height: int
    layer: list[int] = field(default_factory=list)
    parent: list[int] = field(default_factory=list)
    via: list[int] = field(default_factory=list)
    dist2: list[list[int]] = field(default_factory=list)


def rd_tree_layout(r: int, d: int, height: int) -> RdTreeLayout:
    lay = RdTreeLayout(r, d, height)
    lay.layer.append(0)
    lay.parent.append(-1)
    lay.via.append(-1)
    groups: dict[int, list[int]] = {}  # degree-d node id -> its degree-r neighbors
    frontier = [0]
    next_mid = 0
    for depth in range(2, height + 1, 2):
        nxt = []
        for x in frontier:
            down = r if depth == 2 else r - 1
            for _ in range(down):
                mid = next_mid
                next_mid += 1
                groups[mid] = [x]
                for _ in range(d - 1):
                    c = len(lay.layer)
                    lay.layer.append(depth)
                    lay.parent.append(x)
                    lay.via.append(mid)
                    groups[mid].append(c)
                    nxt.append(c)
        frontier = nxt
    lay.dist2 = [[] for _ in lay.layer]
    for members in groups.values():
        for a in members:
            lay.dist2[a].extend(b for b in members if b != a)
    return lay


@dataclass
class SearchResult:
    sat: bool
    coloring: dict[int, int] | None
    nodes_explored: int
    layout: RdTreeLayout

    def to_json(self) -> dict:
        lay = self.layout
        out = {"r": lay.r, "d": lay.d, "height": lay.height, "result": "sat" if self.sat else "unsat",
               "nodes_explored": self.nodes_explored}
        if self.coloring is not None:
            out["coloring"] = [{"node": i, "layer": lay.layer[i], "parent": lay.parent[i], "color": c}
                               for i, c in sorted(self.coloring.items())]
        return out


def tree_counterexample_search(r: int, d: int, t: int = 1, bound: int | None = None,
                                 timeout: float | None = 600.0) -> SearchResult:
    """Look for a 2-coloring of degree-r nodes where no node at depth 4t shares the root's color.

    Nodes at depths 0..4t-2 must have at most ``bound`` (default r(d-1)-d)
    same-colored degree-r nodes at distance two.  Root is color 0; depth-4t
    nodes are forced to color 1.  Siblings under one degree-d node have
    isomorphic subtrees, so their colors are explored in nondecreasing order.
    """
    if r < 3 or d < 3 or t < 1:
        raise ValueError("need r, d >= 3 and t >= 1")
    bound = r * (d - 1) - d if bound is None else bound
    lay = rd_tree_layout(r, d, 4 * t)
    n = len(lay.layer)
    constrained = [lay.layer[i] <= 4 * t - 2 for i in range(n)]
    for i in range(n):
        if constrained[i] and lay.layer[i] >= 2:
            assert len(lay.dist2[i]) == r * (d - 1), "interior degree-r node lacks r(d-1) distance-2 neighbors"
    assert len(lay.dist2[0]) == r * (d - 1)
    color = [-1] * n
    count = [[0, 0] for _ in range(n)]  # assigned distance-2 neighbors per color
    deadline = None if timeout is None else time.monotonic() + timeout
    explored = 0

    def assign(i, c):
        color[i] = c
        for j in lay.dist2[i]:
            count[j][c] += 1

    def unassign(i):
        c = color[i]
        for j in lay.dist2[i]:
            count[j][c] -= 1
        color[i] = -1

    def ok_after(i):
        if constrained[i] and count[i][color[i]] > bound:
            return False
        for j in lay.dist2[i]:
            if constrained[j] and color[j] >= 0 and count[j][color[j]] > bound:
                return False
        return True

    def rec(i):
        nonlocal explored
        explored += 1
        if deadline is not None and explored % 4096 == 0 and time.monotonic() > deadline:
            raise SearchTimeout(f"search for (r,d,t)=({r},{d},{t}) exceeded {timeout}s")
        if i == n:
            return True
        if lay.layer[i] == 4 * t:
            choices = [1]
        else:
            lo = 0
            if i > 0 and lay.via[i - 1] == lay.via[i] and lay.layer[i - 1] == lay.layer[i]:
                lo = color[i - 1]
            choices = [c for c in (0, 1) if c >= lo]
        for c in choices:
            assign(i, c)
            if ok_after(i) and rec(i + 1):
                return True
            unassign(i)
        return False

    assign(0, 0)
    sat = rec(1)
    return SearchResult(sat, {i: color[i] for i in range(n)} if sat else None, explored, lay)
