"""Recursive list arbdefective coloring for graphs of bounded neighborhood independence.

Building blocks (each also usable on its own with any sub-solver):

* ``slack_boost_1_to_2`` / ``slack_boost_2_to_S``: split the graph with a
  defective coloring and color the parts one after another, so each part sees
  a larger slack.
* ``color_space_reduction``: assign every node one block of the color space by
  solving a list defective instance over block ids, then solve one residual
  arbdefective instance per block.
* ``defective_from_arbdefective``: solve a list defective instance in a graph of
  neighborhood independence theta by rounding defects to powers of two and
  coloring defect classes from large to small with an arbdefective solver.

``RecursiveSolver`` wires them into the full recursion and ``solve_main`` is the
entry point for slack-1 instances such as (degree+1)-list coloring.
"""
from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .errors import DefectExceeded, InvalidPartition, SubInstanceSlackViolation, UncoloredNodeRemains
from .graph import Graph, neighborhood_independence
from .instances import (
    ARBDEFECTIVE,
    DEFECTIVE,
    ListInstance,
    Solution,
    neighbor_color_counts,
    orient_toward_earlier,
    restrict_instance,
    slack_satisfied,
    verify_arbdefective,
    verify_defective,
)
from .primitives import base_arbdefective, defective_coloring, linial_coloring
from .sim import DEFAULT_ROUND_CAP, RoundLog, SimConfig

ArbSolver = Callable[[Graph, ListInstance], tuple[Solution, RoundLog]]


def ceil_log2(x: int) -> int:
    """ceil(log2 x), floored at 1 so that there is always at least one phase."""
    return max(1, (x - 1).bit_length())


def rounded_defect(d: int, theta: int) -> int:
    """max(0, 2^floor(log2((d+1) / (2(theta+1)))) - 1), computed in integers."""
    num, den = d + 1, 2 * (theta + 1)
    if num < den:
        return 0
    e = (num // den).bit_length() - 1
    return 2**e - 1


def inner_slack(theta: int) -> int:
    """Largest s >= 1 with 4(theta+1)(s+1) <= 16 theta."""
    s = 1
    while 4 * (theta + 1) * (s + 2) <= 16 * theta:
        s += 1
    return s


def _loglog(x: float) -> float:
    return math.log2(math.log2(x)) if x > 2 else 0.0


def choose_epsilon(policy: str, delta: int, theta: int, C: int) -> float:
    if policy == "half":
        return 0.5
    lll = math.log2(_loglog(delta)) if _loglog(delta) > 1 else 0.0
    llc = _loglog(C)
    loglog = min(0.5, lll / llc) if llc > 0 else 0.5
    if policy == "loglog":
        return loglog
    if policy != "auto":
        raise ValueError(f"unknown eps policy {policy!r}")
    if theta**8 > ceil_log2(delta) ** (3 * _loglog(delta)):
        return 0.5
    return loglog


def block_count(C: int, eps: float) -> int:
    return min(C, max(2, math.ceil(C**eps - 1e-9)))


# --- bookkeeping --------------------------------------------------------

@dataclass
class TraceNode:
    kind: str
    slack: Fraction
    C: int
    nodes: int
    rounds: int = 0
    note: str = ""
    children: list[TraceNode] = field(default_factory=list)

    @property
    def label(self) -> str:
        return f"P_{self.kind}({_fmt(self.slack)},{self.C})"

    def to_json(self, max_depth: int | None = None) -> dict:
        out = {"label": self.label, "kind": self.kind, "slack": _fmt(self.slack), "C": self.C,
               "nodes": self.nodes, "rounds": self.rounds}
        if self.note:
            out["note"] = self.note
        if max_depth is None or max_depth > 0:
            nxt = None if max_depth is None else max_depth - 1
            out["children"] = [c.to_json(nxt) for c in self.children]
        else:
            out["children_omitted"] = len(self.children)
        return out


def _fmt(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass
class RecursionTrace:
    root: TraceNode
    notes: list[str] = field(default_factory=list)
    constants: dict[str, float] = field(default_factory=dict)

    def depth(self) -> int:
        def d(node):
            return 1 + max((d(c) for c in node.children), default=0)
        return d(self.root)

    def walk(self):
        stack = [(self.root, 0)]
        while stack:
            node, lvl = stack.pop()
            yield node, lvl
            stack.extend((c, lvl + 1) for c in reversed(node.children))

    def level_counts(self) -> dict[int, dict[str, int]]:
        out: dict[int, dict[str, int]] = {}
        for node, lvl in self.walk():
            out.setdefault(lvl, {})
            out[lvl][node.kind] = out[lvl].get(node.kind, 0) + 1
        return out

    def leaves_are_base(self) -> bool:
        return all(n.kind == "base" for n, _ in self.walk() if not n.children and n is not self.root)

    def to_json(self, max_depth: int | None = None) -> dict:
        return {"root": self.root.to_json(max_depth), "depth": self.depth(),
                "level_counts": {str(k): v for k, v in sorted(self.level_counts().items())},
                "notes": self.notes, "constants": self.constants}


@dataclass
class Stats:
    slack_checks: int = 0
    slack_violations: int = 0
    checks_by_claim: dict[str, int] = field(default_factory=dict)
    boost1_iterations: list[int] = field(default_factory=list)
    boost2_parts: list[int] = field(default_factory=list)
    def_calls: list[dict] = field(default_factory=list)
    rounded_slack_checks: int = 0
    phase_coverage_checks: int = 0
    defect_checks: int = 0

    def to_json(self) -> dict:
        return {
            "slack_checks": self.slack_checks,
            "slack_violations": self.slack_violations,
            "checks_by_claim": dict(sorted(self.checks_by_claim.items())),
            "boost1_iterations_max": max(self.boost1_iterations, default=0),
            "boost2_parts_max": max(self.boost2_parts, default=0),
            "def_calls": len(self.def_calls),
            "def_invocations_max": max((c["invocations"] for c in self.def_calls), default=0),
            "rounded_slack_checks": self.rounded_slack_checks,
            "phase_coverage_checks": self.phase_coverage_checks,
            "defect_checks": self.defect_checks,
        }


@dataclass
class Context:
    """Global knowledge plus the shared proper coloring every sub-call may use."""

    delta: int
    theta: int
    qcoloring: dict[int, int]
    q: int
    eps_policy: str = "auto"
    round_cap: int = DEFAULT_ROUND_CAP
    stats: Stats = field(default_factory=Stats)
    trace: RecursionTrace = field(default_factory=lambda: RecursionTrace(TraceNode("main", Fraction(1), 0, 0)))
    _stack: list[TraceNode] = field(default_factory=list)

    @property
    def L(self) -> int:
        return ceil_log2(self.delta)

    def coloring_of(self, g: Graph) -> dict[int, int]:
        return {v: self.qcoloring[v] for v in g.nodes}

    def require_slack(self, g: Graph, inst: ListInstance, S, claim: str) -> None:
        ok, report = slack_satisfied(g, inst, S)
        self.stats.slack_checks += 1
        self.stats.checks_by_claim[claim] = self.stats.checks_by_claim.get(claim, 0) + 1
        if not ok:
            self.stats.slack_violations += 1
            raise SubInstanceSlackViolation(
                f"{claim}: claimed slack {_fmt(S)} but minimum ratio is {report.minimum}")

    @contextmanager
    def record(self, kind: str, slack, C: int, nodes: int):
        node = TraceNode(kind, Fraction(slack), C, nodes)
        parent = self._stack[-1] if self._stack else self.trace.root
        parent.children.append(node)
        self._stack.append(node)
        try:
            yield node
        finally:
            self._stack.pop()


def _colorable(g: Graph, inst: ListInstance) -> list[int]:
    nodes = []
    for v in g.nodes:
        if inst.lists.get(v):
            nodes.append(v)
        elif g.degree(v):
            raise ValueError(f"node {v} has neighbors but an empty list")
    return nodes


def _run_defective(ctx: Context, g: Graph, alpha, log: RoundLog) -> dict[int, int]:
    res = defective_coloring(g, ctx.coloring_of(g), ctx.q, alpha, SimConfig(delta=ctx.delta, round_cap=ctx.round_cap))
    log.extend(res.log)
    colors = res.colors
    # isolated nodes cannot clash with anyone, so they join the first class
    lone = [v for v in g.nodes if not g.adj[v]]
    if lone:
        first = min((c for v, c in colors.items() if g.adj[v]), default=0)
        colors = {**colors, **{v: first for v in lone}}
    return colors


def _group(part: dict[int, int], nodes) -> list[list[int]]:
    groups: dict[int, list[int]] = {}
    for v in nodes:
        groups.setdefault(part[v], []).append(v)
    return [groups[k] for k in sorted(groups)]


# --- slack generation ---------------------------------------------------

def slack_boost_1_to_2(g: Graph, inst: ListInstance, solver2: ArbSolver, ctx: Context) -> tuple[Solution, RoundLog]:
    """Solve a slack-1 arbdefective instance through slack-2 sub-instances.

    Each iteration splits the uncolored nodes with a 1/4-defective coloring and
    colors, class by class, the nodes that still have at least half of their
    uncolored-at-iteration-start neighbors uncolored.  Every uncolored node loses
    at least half of its uncolored neighbors per iteration.
    """
    log = RoundLog()
    log.invoke("P_A(1)")
    with ctx.record("A", 1, inst.C, g.n) as rec:
        ctx.require_slack(g, inst, 1, "boost1.input")
        colors: dict[int, int] = {}
        orientation: set[tuple[int, int]] = set()
        uncolored = set(_colorable(g, inst))
        limit = ceil_log2(max(g.delta, 1)) + 1
        iterations = 0
        while uncolored:
            iterations += 1
            assert iterations <= limit, f"slack boost from 1 needed more than {limit} iterations"
            U = g.subgraph(uncolored)
            part = _run_defective(ctx, U, Fraction(1, 4), log)
            for cls in _group(part, U.nodes):
                active = [v for v in cls
                          if 2 * sum(1 for u in U.adj[v] if u in uncolored) >= U.degree(v)]
                if not active:
                    continue
                sub_g = g.subgraph(active)
                sub = restrict_instance(g, inst, active, colors)
                ctx.require_slack(sub_g, sub, 2, "boost1.part")
                sol, sub_log = solver2(sub_g, sub)
                log.extend(sub_log)
                orientation |= orient_toward_earlier(g, active, sol.colors, colors)
                orientation |= sol.orientation or set()
                colors.update(sol.colors)
                uncolored.difference_update(active)
                log.charge("announce", 1)
        ctx.stats.boost1_iterations.append(iterations)
        rec.rounds = log.total
        rec.note = f"iterations={iterations}"
    return Solution(colors, orientation), log


def slack_boost_2_to_S(g: Graph, inst: ListInstance, S: int, solverS: ArbSolver, ctx: Context) -> tuple[Solution, RoundLog]:
    """Solve a slack-2 arbdefective instance through slack-S sub-instances, one per 1/S-defective class."""
    log = RoundLog()
    log.invoke("P_A(2)")
    with ctx.record("A", 2, inst.C, g.n) as rec:
        ctx.require_slack(g, inst, 2, "boost2.input")
        colors: dict[int, int] = {}
        orientation: set[tuple[int, int]] = set()
        nodes = _colorable(g, inst)
        part = _run_defective(ctx, g, Fraction(1, S), log)
        parts = _group(part, nodes)
        for cls in parts:
            sub_g = g.subgraph(cls)
            sub = restrict_instance(g, inst, cls, colors)
            ctx.require_slack(sub_g, sub, S, "boost2.part")
            sol, sub_log = solverS(sub_g, sub)
            log.extend(sub_log)
            orientation |= orient_toward_earlier(g, cls, sol.colors, colors)
            orientation |= sol.orientation or set()
            colors.update(sol.colors)
            log.charge("announce", 1)
        ctx.stats.boost2_parts.append(len(parts))
        rec.rounds = log.total
        rec.note = f"parts={len(parts)}"
    return Solution(colors, orientation), log


# --- color space reduction ----------------------------------------------

def subspace_instance(g: Graph, inst: ListInstance, sigma: int, p: int) -> tuple[ListInstance, int]:
    """List defective instance over block ids; returns it with the block size."""
    if not 1 <= p <= inst.C:
        raise InvalidPartition(f"need 1 <= p <= C, got p={p}, C={inst.C}")
    size = -(-inst.C // p)
    blocks = -(-inst.C // size)
    lists = {}
    for v, lst in inst.lists.items():
        if v not in g.adj:
            continue
        total = inst.weight(v)
        per_block: dict[int, int] = {}
        for x, d in lst.items():
            per_block[x // size] = per_block.get(x // size, 0) + d + 1
        deg = g.degree(v)
        lists[v] = {i: (sigma * deg * w) // total for i, w in sorted(per_block.items())}
    return ListInstance(DEFECTIVE, blocks, lists), size


def color_space_reduction(g: Graph, inst: ListInstance, S, sigma: int, p: int,
                          def_solver: Callable[[Graph, ListInstance], tuple[Solution, RoundLog]],
                          arb_solver: ArbSolver, ctx: Context) -> tuple[Solution, RoundLog]:
    """Split the color space into contiguous blocks, pick a block per node, then solve each block."""
    log = RoundLog()
    with ctx.record("A", S, inst.C, g.n) as rec:
        if not 1 <= sigma <= S:
            raise InvalidPartition(f"need 1 <= sigma <= S, got sigma={sigma}, S={S}")
        ctx.require_slack(g, inst, S, "csr.input")
        dinst, size = subspace_instance(g, inst, sigma, p)
        ctx.require_slack(g, dinst, sigma, "csr.subspace")
        dsol, dlog = def_solver(g, dinst)
        log.extend(dlog)
        if verify_defective(g, dinst, dsol):
            raise DefectExceeded("subspace assignment violates its defects")
        log.charge("announce", 1)
        by_block: dict[int, list[int]] = {}
        for v in sorted(dsol.colors):
            by_block.setdefault(dsol.colors[v], []).append(v)
        colors: dict[int, int] = {}
        orientation: set[tuple[int, int]] = set()
        logs = []
        for i, members in sorted(by_block.items()):
            lo = i * size
            width = min(size, inst.C - lo)
            sub_g = g.subgraph(members)
            sub = ListInstance(ARBDEFECTIVE, width, {
                v: {x - lo: d for x, d in inst.lists[v].items() if lo <= x < lo + width} for v in members})
            ctx.require_slack(sub_g, sub, Fraction(S) / sigma, "csr.residual")
            sol, blog = arb_solver(sub_g, sub)
            logs.append(blog)
            colors.update({v: x + lo for v, x in sol.colors.items()})
            orientation |= sol.orientation or set()
        log.extend(RoundLog.parallel(logs))
        rec.rounds = log.total
        rec.note = f"p={p},blocks={len(by_block)},block_size={size}"
    return Solution(colors, orientation), log


# --- list defective from list arbdefective --------------------------------

def defective_from_arbdefective(g: Graph, inst: ListInstance, theta: int, S_in: int, arb_solver: ArbSolver,
                                ctx: Context) -> tuple[Solution, RoundLog]:
    """Solve a list defective instance with slack 4(theta+1)(S_in+1) via slack-S_in arbdefective calls.

    Nodes that own a color whose defect is at least their degree take it right
    away (it can never be violated, and the phases treat them as colored earlier).
    Every other node rounds its defects to d'+1 = power of two and is colored in
    the phase of one of its defect classes, scanning classes from large to small.
    """
    log = RoundLog()
    log.invoke("P_D")
    L = ctx.L
    with ctx.record("D", 4 * (theta + 1) * (S_in + 1), inst.C, g.n) as rec:
        ctx.require_slack(g, inst, 4 * (theta + 1) * (S_in + 1), "def.input")
        colors: dict[int, int] = {}
        when: dict[int, int] = {}
        orientation: set[tuple[int, int]] = set()
        rounded: dict[int, dict[int, int]] = {}
        nodes = _colorable(g, inst)
        for v in nodes:
            deg = g.degree(v)
            big = [x for x, d in sorted(inst.lists[v].items()) if d >= deg]
            if big:
                colors[v] = big[0]
                when[v] = 0
                continue
            rounded[v] = {x: rounded_defect(d, theta) for x, d in inst.lists[v].items()}
            w = sum(r + 1 for r in rounded[v].values())
            ctx.stats.rounded_slack_checks += 1
            if not w > (S_in + 1) * deg:
                raise SubInstanceSlackViolation(f"rounded defects of node {v} lost slack: {w} <= {(S_in + 1) * deg}")
            assert max(rounded[v].values()) + 1 <= 2 ** (L - 1), "defect class outside the phase range"
        if colors:
            log.charge("announce", 1)
        qcol = _run_defective(ctx, g, Fraction(1, L), log)
        steps = _group(qcol, sorted(rounded))
        Q = len(set(qcol.values())) if qcol else 0
        invocations = 0
        stamp = 1
        pending = set(rounded)
        for i in range(L - 1, -1, -1):
            for cls in steps:
                cls_set = set(cls)
                active, lists = [], {}
                for v in cls:
                    if v not in pending:
                        continue
                    a = neighbor_color_counts(g, v, colors)
                    phase = {x: r for x, r in rounded[v].items() if r + 1 == 2**i}
                    gamma = sum(r + 1 - a.get(x, 0) for x, r in phase.items())
                    deg_s = sum(1 for u in g.adj[v] if u in cls_set)
                    if gamma > S_in * deg_s:
                        active.append(v)
                        lists[v] = {x: r - a.get(x, 0) for x, r in phase.items() if a.get(x, 0) <= r}
                if not active:
                    continue
                sub_g = g.subgraph(active)
                sub = ListInstance(ARBDEFECTIVE, inst.C, lists)
                ctx.require_slack(sub_g, sub, S_in, "def.step")
                sol, sub_log = arb_solver(sub_g, sub)
                invocations += 1
                log.extend(sub_log)
                orientation |= orient_toward_earlier(g, active, sol.colors, colors)
                orientation |= sol.orientation or set()
                colors.update(sol.colors)
                for v in active:
                    when[v] = stamp
                stamp += 1
                pending.difference_update(active)
                log.charge("announce", 1)
        ctx.stats.phase_coverage_checks += len(rounded)
        if pending:
            raise UncoloredNodeRemains(f"{len(pending)} nodes never became active, e.g. {sorted(pending)[:5]}")
        _check_defects(g, inst, theta, colors, orientation, rounded, ctx)
        ctx.stats.def_calls.append({"L": L, "Q": Q, "invocations": invocations})
        assert invocations <= L * max(Q, 1)
        rec.rounds = log.total
        rec.note = f"S_in={S_in},L={L},Q={Q},calls={invocations}"
    return Solution(colors, None), log


def _check_defects(g, inst, theta, colors, orientation, rounded, ctx) -> None:
    for v, x in colors.items():
        same = [u for u in g.adj[v] if colors.get(u) == x]
        ctx.stats.defect_checks += 1
        if len(same) > inst.lists[v][x]:
            raise DefectExceeded(f"node {v} has {len(same)} neighbors of color {x}, allowed {inst.lists[v][x]}")
        if v not in rounded:
            continue
        r = rounded[v][x]
        out = sum(1 for u in same if (v, u) in orientation)
        if out > r or len(same) > 2 * (theta + 1) * r:
            raise DefectExceeded(f"node {v}: {out} out / {len(same)} total neighbors of color {x}, rounded defect {r}")


# --- the recursion ------------------------------------------------------

class RecursiveSolver:
    """Slack-2 recursion: boost to 32 theta, reduce the color space, recurse on both halves."""

    def __init__(self, ctx: Context):
        self.ctx = ctx
        self.theta = max(1, ctx.theta)
        self.S = 32 * self.theta
        self.sigma = 16 * self.theta
        self.S_in = inner_slack(self.theta)
        if self.S_in == 1:
            ctx.trace.notes.append(
                f"theta={self.theta}: list-defective step runs at inner slack 1 and boosts to 2 before recursing")

    def threshold(self) -> int:
        return max(4, self.ctx.L)

    def base(self, g: Graph, inst: ListInstance) -> tuple[Solution, RoundLog]:
        with self.ctx.record("base", 1, inst.C, g.n) as rec:
            sol, log = base_arbdefective(g, inst, self.ctx.coloring_of(g), self.ctx.q, delta=self.ctx.delta,
                                         round_cap=self.ctx.round_cap)
            rec.rounds = log.total
        return sol, log

    def solve_pa2(self, g: Graph, inst: ListInstance) -> tuple[Solution, RoundLog]:
        if inst.C <= self.threshold():
            return self.base(g, inst)
        return slack_boost_2_to_S(g, inst, self.S, self.reduce, self.ctx)

    def reduce(self, g: Graph, inst: ListInstance) -> tuple[Solution, RoundLog]:
        eps = choose_epsilon(self.ctx.eps_policy, self.ctx.delta, self.theta, inst.C)
        p = block_count(inst.C, eps)
        return color_space_reduction(g, inst, self.S, self.sigma, p, self.def_solver, self.solve_pa2, self.ctx)

    def def_solver(self, g: Graph, inst: ListInstance) -> tuple[Solution, RoundLog]:
        return defective_from_arbdefective(g, inst, self.theta, self.S_in, self.arb_for_def, self.ctx)

    def arb_for_def(self, g: Graph, inst: ListInstance) -> tuple[Solution, RoundLog]:
        if self.S_in >= 2:
            return self.solve_pa2(g, inst)
        return slack_boost_1_to_2(g, inst, self.solve_pa2, self.ctx)


@dataclass
class MainResult:
    solution: Solution
    log: RoundLog
    trace: RecursionTrace
    stats: Stats
    theta: int
    q: int


def solve_main(g: Graph, inst: ListInstance, theta: int | None = None, eps_policy: str = "auto",
               ids: dict[int, int] | None = None, round_cap: int = DEFAULT_ROUND_CAP) -> MainResult:
    """Solve a slack-1 list arbdefective instance (e.g. (Delta+1)-coloring) on g."""
    if theta is None:
        theta = neighborhood_independence(g).theta
    ids = ids if ids is not None else {v: v for v in g.nodes}
    log = RoundLog()
    lin = linial_coloring(g, SimConfig(ids=ids, delta=g.delta, theta=theta, C=inst.C, round_cap=round_cap))
    log.extend(lin.log)
    ctx = Context(delta=g.delta, theta=theta, qcoloring=lin.colors, q=lin.num_colors, eps_policy=eps_policy,
                  round_cap=round_cap)
    ctx.trace.root.C = inst.C
    ctx.trace.root.nodes = g.n
    solver = RecursiveSolver(ctx)
    arb = inst if inst.mode == ARBDEFECTIVE else ListInstance(ARBDEFECTIVE, inst.C, inst.lists)
    if arb.C <= solver.threshold():
        sol, sub_log = solver.base(g, arb)
    else:
        sol, sub_log = slack_boost_1_to_2(g, arb, solver.solve_pa2, ctx)
    log.extend(sub_log)
    bad = verify_arbdefective(g, arb, sol)
    if bad:
        raise DefectExceeded(f"final solution has violations: {bad[:5]}")
    ctx.trace.root.rounds = log.total
    parts = [n for n in ctx.stats.boost2_parts]
    ctx.trace.constants = {
        "c_slack": max(parts, default=0) / solver.S**2,
        "c_def": max((c["invocations"] for c in ctx.stats.def_calls), default=0) / ctx.L**3,
        "linial_colors": lin.num_colors,
        "linial_c1": lin.num_colors / max(1, g.delta) ** 2,
    }
    return MainResult(sol, log, ctx.trace, ctx.stats, theta, lin.num_colors)
