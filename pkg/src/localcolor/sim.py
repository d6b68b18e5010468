"""Synchronous LOCAL-model execution engine with round accounting.

A round consists of every running node broadcasting the message produced by
its previous transition, followed by every running node transitioning on the
messages it received.  A node whose transition makes it terminate still gets
that last message delivered in the next round.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping

from .errors import InvalidConfig, RoundLimitExceeded
from .graph import Graph, check_proper, distance_k_violations

DEFAULT_ROUND_CAP = 10**6


@dataclass
class SimConfig:
    ids: dict[int, int] | None = None
    coloring: dict[int, int] | None = None
    q: int | None = None
    distance_coloring: dict[int, int] | None = None
    distance_k: int = 1
    n: int | None = None
    delta: int | None = None
    theta: int | None = None
    C: int | None = None
    round_cap: int = DEFAULT_ROUND_CAP

    def validate(self, g: Graph) -> None:
        if self.ids is not None:
            vals = [self.ids[v] for v in g.nodes]
            if len(set(vals)) != len(vals):
                raise InvalidConfig("ids are not unique")
        if self.coloring is not None:
            if check_proper(g, self.coloring):
                raise InvalidConfig("initial coloring is not proper")
            if self.q is not None and any(not 0 <= self.coloring[v] < self.q for v in g.nodes):
                raise InvalidConfig(f"initial coloring uses colors outside 0..{self.q - 1}")
        if self.distance_coloring is not None:
            if distance_k_violations(g, self.distance_coloring, self.distance_k):
                raise InvalidConfig(f"distance-{self.distance_k} coloring is not proper")

    def knowledge(self, g: Graph) -> dict[str, int]:
        return {
            "n": self.n if self.n is not None else g.n,
            "delta": self.delta if self.delta is not None else g.delta,
            "theta": self.theta,
            "C": self.C,
        }


@dataclass(frozen=True)
class NodeView:
    """Everything a node knows when it starts: itself, its ports and global constants."""

    node: int
    uid: int | None
    neighbors: tuple[int, ...]
    color: int | None
    distance_color: int | None
    knowledge: Mapping[str, Any]
    input: Any = None


class NodeProgram:
    """Per-node state machine.  Subclasses override ``init`` and ``step``.

    ``init`` and ``step`` return ``(state, message)``; ``message`` (any value,
    or None for silence) is broadcast to all neighbors in the next round.
    """

    def init(self, view: NodeView) -> tuple[Any, Any]:
        raise NotImplementedError

    def step(self, state: Any, inbox: dict[int, Any]) -> tuple[Any, Any]:
        raise NotImplementedError

    def done(self, state: Any) -> bool:
        return state.get("done", False)

    def output(self, state: Any) -> Any:
        return state.get("out")


@dataclass
class RoundLog:
    breakdown: dict[str, int] = field(default_factory=dict)
    invocations: dict[str, int] = field(default_factory=dict)

    @property
    def total(self) -> int:
        return sum(self.breakdown.values())

    def charge(self, label: str, rounds: int) -> None:
        if rounds:
            self.breakdown[label] = self.breakdown.get(label, 0) + rounds

    def invoke(self, label: str, count: int = 1) -> None:
        self.invocations[label] = self.invocations.get(label, 0) + count

    def extend(self, other: RoundLog) -> RoundLog:
        for k, r in other.breakdown.items():
            self.charge(k, r)
        for k, c in other.invocations.items():
            self.invoke(k, c)
        return self

    @classmethod
    def parallel(cls, logs: Iterable[RoundLog]) -> RoundLog:
        """Logically parallel runs: rounds are the slowest run's, invocations add up."""
        logs = list(logs)
        out = cls()
        if not logs:
            return out
        slowest = max(logs, key=lambda lg: lg.total)
        out.breakdown = dict(slowest.breakdown)
        for lg in logs:
            for k, c in lg.invocations.items():
                out.invoke(k, c)
        return out

    def to_json(self) -> dict:
        return {"total": self.total, "breakdown": dict(sorted(self.breakdown.items())),
                "invocations": dict(sorted(self.invocations.items()))}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def run(
    g: Graph,
    config: SimConfig,
    program: NodeProgram,
    inputs: Mapping[int, Any] | None = None,
    label: str = "run",
    log: RoundLog | None = None,
    validate: bool = True,
) -> tuple[dict[int, Any], RoundLog]:
    if validate:
        config.validate(g)
    log = log if log is not None else RoundLog()
    know = config.knowledge(g)
    states: dict[int, Any] = {}
    outbox: dict[int, Any] = {}
    for v in g.nodes:
        view = NodeView(
            node=v,
            uid=config.ids[v] if config.ids is not None else None,
            neighbors=g.adj[v],
            color=config.coloring[v] if config.coloring is not None else None,
            distance_color=config.distance_coloring[v] if config.distance_coloring is not None else None,
            knowledge=know,
            input=inputs.get(v) if inputs is not None else None,
        )
        states[v], outbox[v] = program.init(view)
    running = [v for v in g.nodes if not program.done(states[v])]
    rounds = 0
    while running:
        if rounds >= config.round_cap:
            raise RoundLimitExceeded(f"{label}: exceeded {config.round_cap} rounds")
        rounds += 1
        sent = outbox
        outbox = {}
        for v in running:
            inbox = {u: sent[u] for u in g.adj[v] if sent.get(u) is not None}
            states[v], outbox[v] = program.step(states[v], inbox)
        running = [v for v in running if not program.done(states[v])]
    log.charge(label, rounds)
    return {v: program.output(states[v]) for v in g.nodes}, log


def run_on_subgraph(
    g: Graph,
    subset: Iterable[int],
    config: SimConfig,
    program: NodeProgram,
    inputs: Mapping[int, Any] | None = None,
    label: str = "run",
    log: RoundLog | None = None,
) -> tuple[dict[int, Any], RoundLog]:
    """Run on G[subset]; outside nodes are inert.  Global constants still refer to ``g``."""
    sub = g.subgraph(subset)
    cfg = SimConfig(
        ids=config.ids,
        coloring=config.coloring,
        q=config.q,
        distance_coloring=config.distance_coloring,
        distance_k=config.distance_k,
        round_cap=config.round_cap,
        **{k: v for k, v in config.knowledge(g).items() if k in ("n", "theta", "C")},
        delta=config.delta if config.delta is not None else g.delta,
    )
    return run(sub, cfg, program, inputs, label, log)


class GatherBall(NodeProgram):
    """Collects the radius-k ball (nodes and their adjacency) around each node."""

    def __init__(self, k: int):
        self.k = k

    def init(self, view):
        known = {view.node: view.neighbors}
        return {"t": 0, "known": known, "done": self.k == 0}, known

    def step(self, state, inbox):
        known = dict(state["known"])
        for msg in inbox.values():
            known.update(msg)
        t = state["t"] + 1
        return {"t": t, "known": known, "done": t >= self.k}, known

    def output(self, state):
        return state["known"]
