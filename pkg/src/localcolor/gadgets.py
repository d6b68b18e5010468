"""Lower-bound gadgets: bipartite representations, (r,d)-regular trees, the merged-tree reduction.

Node naming in the merged graph uses tuples so that provenance stays readable:
``("t", w, i)`` is node i of the virtual tree of source node w, ``("m", w1, w2)``
the merged leaf for source edge {w1, w2}, ``("x", w, port)`` a leaf of w's tree
whose port leads to a degree-1 source node, and ``("dummy", owner, j)`` the
degree-1 padding nodes.
"""
from __future__ import annotations

import random
import sys
from dataclasses import dataclass, field

from .errors import BadDelta
from .graph import Hypergraph

BLACK, WHITE = 0, 1


@dataclass
class BipartiteRep:
    """Incidence graph: left = hypergraph vertices, right = hyperedges."""

    left: list
    right: list
    adj: dict  # node -> list of neighbors on the other side

    @property
    def side(self) -> dict:
        return {**{v: "L" for v in self.left}, **{e: "R" for e in self.right}}

    def degree(self, v) -> int:
        return len(self.adj[v])


def bipartite_rep(h: Hypergraph) -> BipartiteRep:
    left = [("v", v) for v in range(h.n)]
    right = [("e", i) for i in range(len(h.edges))]
    adj: dict = {x: [] for x in left + right}
    for i, e in enumerate(h.edges):
        for v in e:
            adj[("e", i)].append(("v", v))
            adj[("v", v)].append(("e", i))
    return BipartiteRep(left, right, adj)


def hypergraph_of(rep: BipartiteRep) -> Hypergraph:
    index = {v: i for i, v in enumerate(rep.left)}
    edges = tuple(tuple(sorted(index[v] for v in rep.adj[e])) for e in rep.right)
    return Hypergraph(len(rep.left), edges)


# --- (r,d)-regular trees --------------------------------------------------

@dataclass
class RdTree:
    """Rooted tree with degree-r nodes on even layers and degree-d nodes on odd layers."""

    r: int
    d: int
    height: int
    parent: list[int] = field(default_factory=list)
    layer: list[int] = field(default_factory=list)
    children: list[list[int]] = field(default_factory=list)

    @property
    def leaves(self) -> list[int]:
        return [i for i, lay in enumerate(self.layer) if lay == self.height]

    def degree(self, i: int) -> int:
        return len(self.children[i]) + (self.parent[i] >= 0)

    def audit(self) -> list[str]:
        issues = []
        for i, lay in enumerate(self.layer):
            if lay == self.height:
                if self.children[i]:
                    issues.append(f"leaf {i} has children")
                continue
            want = self.r if lay % 2 == 0 else self.d
            if self.degree(i) != want:
                issues.append(f"node {i} on layer {lay} has degree {self.degree(i)}, expected {want}")
        return issues


def rd_tree(r: int, d: int, height: int) -> RdTree:
    t = RdTree(r, d, height, [-1], [0], [[]])
    frontier = [0]
    for lay in range(1, height + 1):
        nxt = []
        for x in frontier:
            want = t.r if (lay - 1) % 2 == 0 else t.d
            for _ in range(want - t.degree(x)):
                c = len(t.layer)
                t.parent.append(x)
                t.layer.append(lay)
                t.children.append([])
                t.children[x].append(c)
                nxt.append(c)
        frontier = nxt
    return t


def reduction_delta(r: int, d: int, k: int) -> int:
    return r * (d - 1) ** (2 * k) * (r - 1) ** (2 * k - 1)


# --- source trees -------------------------------------------------------

@dataclass
class PortedTree:
    """2-colored bipartite tree whose internal nodes have degree delta and numbered ports."""

    delta: int
    side: dict[int, int]            # node -> BLACK (U) / WHITE (V)
    ports: dict[int, list[int]]     # node -> neighbor on port 1..deg (index 0 is port 1)

    def degree(self, v) -> int:
        return len(self.ports[v])

    @property
    def full_nodes(self) -> list[int]:
        return [v for v in sorted(self.ports) if self.degree(v) == self.delta]

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in sorted(self.ports) for v in self.ports[u] if u < v]


def random_ported_tree(delta: int, internal: int, seed: int) -> PortedTree:
    """Delta-regular 2-colored tree with ``internal`` full nodes, leaves of degree 1, shuffled ports."""
    rng = random.Random(seed)
    ports: dict[int, list[int]] = {0: []}
    side = {0: BLACK}
    full = [0]
    leaves: list[int] = []
    nxt = 1

    def expand(v):
        nonlocal nxt
        while len(ports[v]) < delta:
            u = nxt
            nxt += 1
            ports[u] = [v]
            ports[v].append(u)
            side[u] = 1 - side[v]
            leaves.append(u)

    expand(0)
    while len(full) < internal:
        v = leaves.pop(rng.randrange(len(leaves)))
        full.append(v)
        expand(v)
    for v in ports:
        rng.shuffle(ports[v])
    return PortedTree(delta, side, ports)


# --- the reduction ------------------------------------------------------

@dataclass
class ReductionInstance:
    r: int
    d: int
    k: int
    source: PortedTree
    tree: RdTree
    adj: dict                        # merged graph adjacency
    kind: dict                       # node -> "R" (degree-r side) / "D" (degree-d side, incl. dummies)
    merged: dict                     # frozenset({w1, w2}) -> merged node
    roots: dict                      # source node -> its root node in the merged graph
    forced: dict                     # root node -> forced color
    dummies: list = field(default_factory=list)

    def audit(self) -> list[str]:
        issues = []
        for v, nbrs in self.adj.items():
            if len(set(nbrs)) != len(nbrs):
                issues.append(f"{v} has parallel edges")
            for u in nbrs:
                if v not in self.adj[u]:
                    issues.append(f"asymmetric edge {v}-{u}")
                if self.kind[u] == self.kind[v]:
                    issues.append(f"edge {v}-{u} inside one side")
            deg = len(nbrs)
            if self.kind[v] == "R" and deg != self.r:
                issues.append(f"degree-r node {v} has degree {deg}")
            if self.kind[v] == "D" and deg not in (self.d, 1):
                issues.append(f"degree-d node {v} has degree {deg}")
        for v in self.dummies:
            if len(self.adj[v]) != 1:
                issues.append(f"dummy {v} has degree {len(self.adj[v])}")
        if len(self.tree.leaves) != self.source.delta:
            issues.append("virtual tree leaf count differs from Delta")
        return issues

    def bipartite(self) -> BipartiteRep:
        left = sorted((v for v in self.adj if self.kind[v] == "D"), key=repr)
        right = sorted((v for v in self.adj if self.kind[v] == "R"), key=repr)
        return BipartiteRep(left, right, {v: sorted(self.adj[v], key=repr) for v in self.adj})

    def interior(self) -> list:
        """Degree-r nodes whose every neighbor has full degree d."""
        return [v for v in self.adj if self.kind[v] == "R" and all(len(self.adj[u]) == self.d for u in self.adj[v])]

    def distance2(self, v) -> list:
        out = set()
        for u in self.adj[v]:
            out.update(self.adj[u])
        out.discard(v)
        return sorted(out, key=repr)


def build_reduction(source: PortedTree, r: int, d: int, k: int) -> ReductionInstance:
    """Replace each full source node by an (r,d)-regular tree of height 4k and glue leaves along edges.

    The i-th leaf of w1's tree and the j-th leaf of w2's tree are merged when
    w1's port i and w2's port j are the same edge; each merged node gets r-2
    dummy neighbors.  Leaves whose port leads to a degree-1 source node get r-1
    dummies.
    """
    delta = reduction_delta(r, d, k)
    if source.delta != delta:
        raise BadDelta(f"source tree has Delta={source.delta}, need r(d-1)^(2k)(r-1)^(2k-1) = {delta}")
    for v in source.full_nodes:
        for u in source.ports[v]:
            if v not in source.ports[u]:
                raise ValueError(f"port lists of {v} and {u} disagree")
    tree = rd_tree(r, d, 4 * k)
    leaves = tree.leaves
    assert len(leaves) == delta
    adj: dict = {}
    kind: dict = {}

    def add_edge(a, b):
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)

    leaf_node: dict = {}
    for w in source.full_nodes:
        for i in range(len(tree.layer)):
            if tree.layer[i] == 4 * k:
                continue
            kind[("t", w, i)] = "R" if tree.layer[i] % 2 == 0 else "D"
            adj.setdefault(("t", w, i), [])
        for port, u in enumerate(source.ports[w]):
            if source.degree(u) == delta:
                name = ("m",) + tuple(sorted((w, u)))
            else:
                name = ("x", w, port)
            leaf_node[(w, port)] = name
            kind[name] = "R"
            add_edge(name, ("t", w, tree.parent[leaves[port]]))
        for i in range(1, len(tree.layer)):
            if tree.layer[i] == 4 * k:
                continue
            add_edge(("t", w, i), ("t", w, tree.parent[i]))
    merged = {}
    dummies = []
    for name in sorted({n for n in leaf_node.values()}, key=repr):
        if name[0] == "m":
            merged[frozenset(name[1:])] = name
        for j in range(r - len(adj[name])):
            dm = ("dummy", name, j)
            kind[dm] = "D"
            dummies.append(dm)
            add_edge(name, dm)
    roots = {w: ("t", w, 0) for w in source.full_nodes}
    forced = {roots[w]: source.side[w] for w in source.full_nodes}
    return ReductionInstance(r, d, k, source, tree, adj, kind, merged, roots, forced, dummies)


def solve_gadget_coloring(inst: ReductionInstance, seed: int = 0, bound: int | None = None,
                          max_nodes: int = 10**6) -> dict | None:
    """Backtracking 2-coloring of degree-r nodes with forced roots.

    Interior degree-r nodes may have at most ``bound`` (default r(d-1)-d)
    same-colored degree-r nodes at distance two.  Value order is randomized by
    ``seed`` so repeated calls produce different valid colorings.
    """
    bound = inst.r * (inst.d - 1) - inst.d if bound is None else bound
    rng = random.Random(seed)
    rnodes = sorted((v for v in inst.adj if inst.kind[v] == "R"), key=repr)
    interior = set(inst.interior())
    d2 = {v: inst.distance2(v) for v in rnodes}
    order = sorted(rnodes, key=lambda v: (v not in inst.forced, repr(v)))
    color: dict = {}
    explored = 0

    def ok(v):
        for w in (v, *d2[v]):
            if w in interior and w in color:
                same = sum(1 for u in d2[w] if color.get(u) == color[w])
                if same > bound:
                    return False
        return True

    def rec(i):
        nonlocal explored
        explored += 1
        if explored > max_nodes:
            return False
        if i == len(order):
            return True
        v = order[i]
        choices = [inst.forced[v]] if v in inst.forced else rng.sample([BLACK, WHITE], 2)
        for c in choices:
            color[v] = c
            if ok(v) and rec(i + 1):
                return True
            del color[v]
        return False

    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, len(order) + 1000))
    try:
        found = rec(0)
    finally:
        sys.setrecursionlimit(limit)
    return dict(color) if found else None


def coloring_violations(inst: ReductionInstance, color: dict, bound: int | None = None) -> list:
    bound = inst.r * (inst.d - 1) - inst.d if bound is None else bound
    bad = [v for v, c in inst.forced.items() if color.get(v) != c]
    for v in inst.interior():
        if sum(1 for u in inst.distance2(v) if color[u] == color[v]) > bound:
            bad.append(v)
    return bad


def extract_sinkless(source: PortedTree, merged_colors: dict) -> set[tuple[int, int]]:
    """Orient source edges: U->V iff the merged node is black; full-to-leaf edges point at the leaf."""
    out = set()
    for a, b in source.edges():
        if source.degree(a) == source.delta and source.degree(b) == source.delta:
            u, v = (a, b) if source.side[a] == BLACK else (b, a)
            col = merged_colors[frozenset((a, b))]
            out.add((u, v) if col == BLACK else (v, u))
        elif source.degree(a) == 1 and source.degree(b) == 1:
            out.add((a, b))
        else:
            leaf, full = (a, b) if source.degree(a) == 1 else (b, a)
            out.add((full, leaf))
    return out


def merged_colors_of(inst: ReductionInstance, color: dict) -> dict:
    return {key: color[name] for key, name in inst.merged.items()}


def verify_sinkless(source: PortedTree, orientation: set[tuple[int, int]]) -> list[int]:
    """Full-degree source nodes without an outgoing edge."""
    outdeg = {v: 0 for v in source.ports}
    for u, _ in orientation:
        outdeg[u] += 1
    return [v for v in source.full_nodes if outdeg[v] == 0]


def reduction_to_json(inst: ReductionInstance) -> dict:
    """Side file for ports, merges and dummies; the graph itself is exported via ``gadget_hypergraph``."""
    return {
        "r": inst.r, "d": inst.d, "k": inst.k, "delta": inst.source.delta,
        "ports": {str(v): p for v, p in sorted(inst.source.ports.items())},
        "side": {str(v): s for v, s in sorted(inst.source.side.items())},
        "merged": [[sorted(key), repr(name)] for key, name in sorted(inst.merged.items(), key=lambda kv: sorted(kv[0]))],
        "dummies": [repr(v) for v in inst.dummies],
        "forced_roots": {repr(v): c for v, c in sorted(inst.forced.items(), key=repr)},
    }


def gadget_hypergraph(inst: ReductionInstance) -> tuple[Hypergraph, list, list]:
    """Hypergraph view (vertices = degree-d side, hyperedges = degree-r side) plus both name lists."""
    rep = inst.bipartite()
    return hypergraph_of(rep), rep.left, rep.right


def check_reduction(r: int, d: int, k: int, trees: int = 10, internal: tuple[int, int] = (4, 6),
                    seed: int = 0) -> dict:
    """Build, solve and orient the reduction on random source trees; one report entry per tree."""
    delta = reduction_delta(r, d, k)
    rng = random.Random(seed)
    report = {"r": r, "d": d, "k": k, "delta": delta, "trees": []}
    for t in range(trees):
        source = random_ported_tree(delta, rng.randint(*internal), rng.randrange(2**31))
        inst = build_reduction(source, r, d, k)
        entry = {"tree": t, "full_nodes": len(source.full_nodes), "audit": inst.audit()}
        color = solve_gadget_coloring(inst, seed=t)
        if color is None:
            entry["solved"] = False
        else:
            entry["solved"] = True
            entry["coloring_violations"] = len(coloring_violations(inst, color))
            orientation = extract_sinkless(source, merged_colors_of(inst, color))
            entry["sinks"] = verify_sinkless(source, orientation)
        report["trees"].append(entry)
    report["ok"] = all(not e["audit"] and e["solved"] and not e["coloring_violations"] and not e["sinks"]
                       for e in report["trees"])
    return report
