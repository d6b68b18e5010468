"""List defective / list arbdefective instances, slack, and verifiers."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping

from .graph import Graph

DEFECTIVE = "defective"
ARBDEFECTIVE = "arbdefective"


@dataclass
class ListInstance:
    """Per-node color lists with per-color defects.

    ``lists[v]`` maps each color of L_v to its allowed (arb)defect d_v(x).
    """

    mode: str
    C: int
    lists: dict[int, dict[int, int]]

    def __post_init__(self):
        if self.mode not in (DEFECTIVE, ARBDEFECTIVE):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.C < 1:
            raise ValueError("color space must be non-empty")
        for v, lst in self.lists.items():
            for x, d in lst.items():
                if not 0 <= x < self.C:
                    raise ValueError(f"node {v}: color {x} outside 0..{self.C - 1}")
                if d < 0:
                    raise ValueError(f"node {v}: negative defect for color {x}")

    def weight(self, v: int) -> int:
        """Sum of (d_v(x) + 1) over the list of v."""
        return sum(d + 1 for d in self.lists[v].values())

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "C": self.C,
            "lists": {str(v): [[x, d] for x, d in sorted(lst.items())] for v, lst in sorted(self.lists.items())},
        }

    @classmethod
    def from_json(cls, data: dict) -> ListInstance:
        lists = {int(v): {int(x): int(d) for x, d in pairs} for v, pairs in data["lists"].items()}
        return cls(data["mode"], int(data["C"]), lists)


@dataclass
class Solution:
    colors: dict[int, int]
    orientation: set[tuple[int, int]] | None = None

    def to_json(self) -> dict:
        out: dict = {"colors": {str(v): x for v, x in sorted(self.colors.items())}}
        if self.orientation is not None:
            out["orientation"] = [list(e) for e in sorted(self.orientation)]
        return out

    @classmethod
    def from_json(cls, data: dict) -> Solution:
        colors = {int(v): int(x) for v, x in data["colors"].items()}
        orient = data.get("orientation")
        return cls(colors, None if orient is None else {(int(u), int(v)) for u, v in orient})


@dataclass
class SlackReport:
    ratios: dict[int, Fraction | float] = field(default_factory=dict)

    @property
    def minimum(self) -> Fraction | float:
        return min(self.ratios.values(), default=math.inf)


def slack_satisfied(g: Graph, inst: ListInstance, S) -> tuple[bool, SlackReport]:
    """Check sum_x (d_v(x)+1) > S * deg(v) at every node, exactly.

    ``S`` may be an int or Fraction; floats are converted exactly.
    """
    S = Fraction(S)
    ok = True
    report = SlackReport()
    for v in g.nodes:
        deg = g.degree(v)
        if deg == 0:
            report.ratios[v] = math.inf
            continue
        w = inst.weight(v)
        report.ratios[v] = Fraction(w, deg)
        if not w * S.denominator > S.numerator * deg:
            ok = False
    return ok, report


def _same_color_neighbors(g: Graph, colors: Mapping[int, int], v: int) -> list[int]:
    x = colors[v]
    return [u for u in g.adj[v] if colors.get(u) == x]


def verify_defective(g: Graph, inst: ListInstance, sol: Solution) -> list[int]:
    bad = []
    for v, x in sorted(sol.colors.items()):
        lst = inst.lists.get(v, {})
        if x not in lst or len(_same_color_neighbors(g, sol.colors, v)) > lst[x]:
            bad.append(v)
    return bad


def verify_arbdefective(g: Graph, inst: ListInstance, sol: Solution) -> list:
    """Violations: offending nodes (ints) and bad edges as ("unoriented"|"double"|"extraneous", u, v)."""
    orient = sol.orientation or set()
    bad: list = []
    edge_issues = []
    for u, v in g.edges():
        if u not in sol.colors or v not in sol.colors:
            continue
        fwd, back = (u, v) in orient, (v, u) in orient
        if sol.colors[u] == sol.colors[v]:
            if fwd and back:
                edge_issues.append(("double", u, v))
            elif not (fwd or back):
                edge_issues.append(("unoriented", u, v))
        elif fwd or back:
            edge_issues.append(("extraneous", u, v))
    for v, x in sorted(sol.colors.items()):
        lst = inst.lists.get(v, {})
        if x not in lst:
            bad.append(v)
            continue
        out = sum(1 for u in g.adj[v] if sol.colors.get(u) == x and (v, u) in orient)
        if out > lst[x]:
            bad.append(v)
    return bad + edge_issues


def neighbor_color_counts(g: Graph, v: int, colors: Mapping[int, int]) -> dict[int, int]:
    counts: dict[int, int] = {}
    for u in g.adj[v]:
        x = colors.get(u)
        if x is not None:
            counts[x] = counts.get(x, 0) + 1
    return counts


def restrict_instance(g: Graph, inst: ListInstance, subset: Iterable[int], context: Mapping[int, int]) -> ListInstance:
    """Lists for ``subset`` after accounting for already colored neighbors in ``context``.

    Color x survives iff alpha_v(x) <= d_v(x); its new defect is d_v(x) - alpha_v(x).
    """
    lists = {}
    for v in subset:
        if v in context:
            raise ValueError(f"node {v} is already colored")
        alpha = neighbor_color_counts(g, v, context)
        lists[v] = {x: d - alpha.get(x, 0) for x, d in inst.lists[v].items() if alpha.get(x, 0) <= d}
    return ListInstance(inst.mode, inst.C, lists)


def orient_toward_earlier(g: Graph, nodes: Iterable[int], colors: Mapping[int, int], earlier: Mapping[int, int]) -> set[tuple[int, int]]:
    """Edges from each newly colored node to same-colored, previously colored neighbors."""
    out = set()
    for v in nodes:
        x = colors[v]
        for u in g.adj[v]:
            if earlier.get(u) == x:
                out.add((v, u))
    return out


def load_instance(path: str | Path) -> ListInstance:
    return ListInstance.from_json(json.loads(Path(path).read_text()))


def load_solution(path: str | Path) -> Solution:
    return Solution.from_json(json.loads(Path(path).read_text()))
