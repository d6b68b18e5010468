"""Graphs, hypergraphs, line graphs and neighborhood independence."""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

from .errors import DegreeTooLarge, MissingColor

MAX_THETA_DEGREE = 32


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph; node ids are arbitrary ints and survive induced subgraphs."""

    adj: Mapping[int, tuple[int, ...]]
    delta: int = field(init=False)

    def __post_init__(self):
        for v, nbrs in self.adj.items():
            if v in nbrs:
                raise ValueError(f"self-loop at node {v}")
            if len(set(nbrs)) != len(nbrs):
                raise ValueError(f"duplicate edge at node {v}")
            for u in nbrs:
                if v not in self.adj.get(u, ()):
                    raise ValueError(f"asymmetric adjacency {v}-{u}")
        object.__setattr__(self, "delta", max((len(a) for a in self.adj.values()), default=0))

    @classmethod
    def from_edges(cls, n: int | Iterable[int], edges: Iterable[tuple[int, int]]) -> Graph:
        nodes = range(n) if isinstance(n, int) else n
        adj: dict[int, set[int]] = {v: set() for v in nodes}
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at node {u}")
            adj[u].add(v)
            adj[v].add(u)
        return cls({v: tuple(sorted(s)) for v, s in sorted(adj.items())})

    @property
    def n(self) -> int:
        return len(self.adj)

    @property
    def nodes(self) -> list[int]:
        return sorted(self.adj)

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adj[v]

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in self.nodes for v in self.adj[u] if u < v]

    @property
    def m(self) -> int:
        return sum(len(a) for a in self.adj.values()) // 2

    def subgraph(self, nodes: Iterable[int]) -> Graph:
        keep = set(nodes)
        sub = {v: tuple(u for u in self.adj[v] if u in keep) for v in sorted(keep)}
        g = object.__new__(Graph)
        object.__setattr__(g, "adj", sub)
        object.__setattr__(g, "delta", max((len(a) for a in sub.values()), default=0))
        return g

    def ball(self, v: int, radius: int) -> set[int]:
        seen = {v}
        frontier = [v]
        for _ in range(radius):
            nxt = []
            for x in frontier:
                for u in self.adj[x]:
                    if u not in seen:
                        seen.add(u)
                        nxt.append(u)
            frontier = nxt
        return seen


@dataclass(frozen=True)
class Hypergraph:
    n: int
    edges: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        edges = tuple(tuple(sorted(e)) for e in self.edges)
        for e in edges:
            if len(e) < 2:
                raise ValueError(f"hyperedge {e} has fewer than 2 nodes")
            if len(set(e)) != len(e):
                raise ValueError(f"hyperedge {e} repeats a node")
            if e[0] < 0 or e[-1] >= self.n:
                raise ValueError(f"hyperedge {e} out of range")
        object.__setattr__(self, "edges", edges)

    @property
    def rank(self) -> int:
        return max((len(e) for e in self.edges), default=0)

    def degrees(self) -> list[int]:
        deg = [0] * self.n
        for e in self.edges:
            for v in e:
                deg[v] += 1
        return deg

    @property
    def max_degree(self) -> int:
        return max(self.degrees(), default=0)


def line_graph(h: Hypergraph) -> Graph:
    incident: list[list[int]] = [[] for _ in range(h.n)]
    for i, e in enumerate(h.edges):
        for v in e:
            incident[v].append(i)
    adj: dict[int, set[int]] = {i: set() for i in range(len(h.edges))}
    for inc in incident:
        for a in inc:
            adj[a].update(inc)
    return Graph({i: tuple(sorted(s - {i})) for i, s in adj.items()})


@dataclass(frozen=True)
class NeighborhoodIndependence:
    theta: int
    witness: int | None
    independent_set: tuple[int, ...]


def _max_independent(mask: int, nbr_mask: list[int]) -> int:
    """Maximum independent set of the bit-indexed graph restricted to ``mask``, as a bitmask."""
    if mask == 0:
        return 0
    low = mask & -mask
    v = low.bit_length() - 1
    rest = mask & ~low
    nv = nbr_mask[v] & rest
    if nv & (nv - 1) == 0:
        # degree <= 1 inside mask: some maximum set contains v
        return low | _max_independent(rest & ~nv, nbr_mask)
    with_v = low | _max_independent(rest & ~nv, nbr_mask)
    without_v = _max_independent(rest, nbr_mask)
    return with_v if bin(with_v).count("1") >= bin(without_v).count("1") else without_v


def neighborhood_independence(g: Graph) -> NeighborhoodIndependence:
    if g.delta > MAX_THETA_DEGREE:
        raise DegreeTooLarge(f"max degree {g.delta} exceeds {MAX_THETA_DEGREE}")
    best = NeighborhoodIndependence(0, None, ())
    for v in g.nodes:
        nbrs = g.adj[v]
        if len(nbrs) <= best.theta:
            continue
        index = {u: i for i, u in enumerate(nbrs)}
        nbr_mask = [0] * len(nbrs)
        for i, u in enumerate(nbrs):
            for w in g.adj[u]:
                j = index.get(w)
                if j is not None:
                    nbr_mask[i] |= 1 << j
        mis = _max_independent((1 << len(nbrs)) - 1, nbr_mask)
        size = bin(mis).count("1")
        if size > best.theta:
            members = tuple(nbrs[i] for i in range(len(nbrs)) if mis >> i & 1)
            best = NeighborhoodIndependence(size, v, members)
    return best


def check_proper(g: Graph, coloring: Mapping[int, int]) -> list[tuple[int, int]]:
    missing = [v for v in g.nodes if v not in coloring]
    if missing:
        raise MissingColor(f"nodes without color: {missing[:10]}")
    return [(u, v) for u, v in g.edges() if coloring[u] == coloring[v]]


def distance_k_violations(g: Graph, coloring: Mapping[int, int], k: int) -> list[tuple[int, int]]:
    """Pairs of distinct nodes within distance k that share a color."""
    out = []
    for v in g.nodes:
        for u in g.ball(v, k):
            if u > v and coloring[u] == coloring[v]:
                out.append((v, u))
    return out


# --- plain-text formats -------------------------------------------------

def format_graph(g: Graph) -> str:
    """Header ``n m`` then one ``u v`` line per edge."""
    if g.nodes != list(range(g.n)):
        raise ValueError("graph file format needs nodes 0..n-1")
    edges = g.edges()
    lines = [f"{g.n} {len(edges)}"] + [f"{u} {v}" for u, v in edges]
    return "\n".join(lines) + "\n"


def write_graph(g: Graph, path: str | Path) -> None:
    Path(path).write_text(format_graph(g))


def read_graph(path: str | Path) -> Graph:
    rows = [line.split() for line in Path(path).read_text().splitlines() if line.strip()]
    n, m = int(rows[0][0]), int(rows[0][1])
    edges = [(int(a), int(b)) for a, b in rows[1 : m + 1]]
    if len(edges) != m:
        raise ValueError(f"expected {m} edges, found {len(edges)}")
    return Graph.from_edges(n, edges)


def format_hypergraph(h: Hypergraph) -> str:
    """Header ``n m r`` then one line of node ids per hyperedge."""
    lines = [f"{h.n} {len(h.edges)} {h.rank}"] + [" ".join(map(str, e)) for e in h.edges]
    return "\n".join(lines) + "\n"


def write_hypergraph(h: Hypergraph, path: str | Path) -> None:
    Path(path).write_text(format_hypergraph(h))


def read_hypergraph(path: str | Path) -> Hypergraph:
    rows = [line.split() for line in Path(path).read_text().splitlines() if line.strip()]
    n, m, r = (int(x) for x in rows[0][:3])
    edges = tuple(tuple(int(x) for x in row) for row in rows[1 : m + 1])
    h = Hypergraph(n, edges)
    if len(h.edges) != m or h.rank > r:
        raise ValueError("hypergraph header does not match body")
    return h
