"""Distributed building blocks: Linial color reduction, defective coloring, greedy base solver.

Linial and defective coloring share one mechanism.  A color c < p^(k+1) is read
as a polynomial g_c of degree <= k over GF(p) (base-p digits are the
coefficients); each node picks an evaluation point x and its new color is the
pair (x, g_c(x)), encoded as x * p + g_c(x).  Two distinct polynomials agree on
at most k points, which bounds how many neighbors can end up with the same pair.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction

from sympy import integer_nthroot, nextprime

from .errors import InvalidAlpha, SlackTooSmall
from .graph import Graph
from .instances import ARBDEFECTIVE, ListInstance, Solution, slack_satisfied
from .sim import DEFAULT_ROUND_CAP, NodeProgram, RoundLog, SimConfig, run


@lru_cache(maxsize=None)
def _prime_at_least(x: int) -> int:
    return 2 if x <= 2 else int(nextprime(x - 1))


def _ceil_root(m: int, e: int) -> int:
    r, exact = integer_nthroot(m, e)
    return int(r) if exact else int(r) + 1


def _best_step(m: int, min_p) -> tuple[int, int] | None:
    """(k, p) minimizing p with p^(k+1) >= m and p >= min_p(k); None if it does not shrink m."""
    best = None
    for k in range(1, max(2, m.bit_length() + 1)):
        p = _prime_at_least(max(min_p(k), _ceil_root(m, k + 1), 2))
        if best is None or p < best[1]:
            best = (k, p)
    if best is None or best[1] ** 2 >= m:
        return None
    return best


@lru_cache(maxsize=None)
def linial_schedule(q: int, delta: int) -> tuple[tuple[int, int], ...]:
    """Sequence of (k, p) reductions taking q colors to a fixpoint of O(delta^2) colors."""
    steps = []
    m = q
    while True:
        step = _best_step(m, lambda k: k * delta + 1)
        if step is None:
            return tuple(steps)
        steps.append(step)
        m = step[1] ** 2


@lru_cache(maxsize=None)
def defective_schedule(q: int, alpha: Fraction) -> tuple[tuple[int, int], ...]:
    """Reduction steps whose per-step defect budgets sum to less than alpha.

    With T steps, step j (1-based) gets alpha * 2^(j-T-1), so the last step,
    which fixes the final color count, gets the largest share.  T is chosen to
    minimize the final color count (ties: fewer steps).
    """
    alpha = Fraction(alpha)
    best_steps: tuple[tuple[int, int], ...] = ()
    best_final = q
    for T in range(1, 12):
        m = q
        steps = []
        for j in range(1, T + 1):
            a = alpha / 2 ** (T - j + 1)
            step = _best_step(m, lambda k, a=a: -(-k * a.denominator // a.numerator))
            if step is not None:
                steps.append(step)
                m = step[1] ** 2
        if m < best_final:
            best_final, best_steps = m, tuple(steps)
    return best_steps


def schedule_colors(q: int, steps) -> int:
    return steps[-1][1] ** 2 if steps else q


def _poly_eval(c: int, k: int, p: int, x: int) -> int:
    coeffs = []
    for _ in range(k + 1):
        c, r = divmod(c, p)
        coeffs.append(r)
    val = 0
    for a in reversed(coeffs):
        val = (val * x + a) % p
    return val


class LinialProgram(NodeProgram):
    def __init__(self, steps):
        self.steps = steps

    def init(self, view):
        c = view.input if view.input is not None else (view.color if view.color is not None else view.uid)
        return {"t": 0, "c": c, "done": not self.steps}, c

    def step(self, state, inbox):
        k, p = self.steps[state["t"]]
        c = state["c"]
        taken = set()
        for cu in inbox.values():
            for x in range(p):
                if _poly_eval(cu, k, p, x) == _poly_eval(c, k, p, x):
                    taken.add(x)
        x = next(x for x in range(p) if x not in taken)
        new = x * p + _poly_eval(c, k, p, x)
        t = state["t"] + 1
        return {"t": t, "c": new, "done": t >= len(self.steps)}, new

    def output(self, state):
        return state["c"]


class DefectiveProgram(LinialProgram):
    def step(self, state, inbox):
        k, p = self.steps[state["t"]]
        c = state["c"]
        mine = [_poly_eval(c, k, p, x) for x in range(p)]
        clash = [0] * p
        for cu in inbox.values():
            if cu == c:
                continue
            for x in range(p):
                if _poly_eval(cu, k, p, x) == mine[x]:
                    clash[x] += 1
        x = min(range(p), key=lambda i: (clash[i], i))
        new = x * p + mine[x]
        t = state["t"] + 1
        return {"t": t, "c": new, "done": t >= len(self.steps)}, new


@dataclass
class ColoringResult:
    colors: dict[int, int]
    num_colors: int
    log: RoundLog


def linial_coloring(g: Graph, config: SimConfig, label: str = "linial") -> ColoringResult:
    """Proper coloring with O(delta^2) colors starting from ids or a proper q-coloring."""
    delta = config.delta if config.delta is not None else g.delta
    if config.coloring is not None:
        q = config.q if config.q is not None else max(config.coloring.values(), default=0) + 1
    else:
        q = max(config.ids.values(), default=0) + 1
    steps = linial_schedule(q, delta)
    colors, log = run(g, config, LinialProgram(steps), label=label)
    return ColoringResult(colors, schedule_colors(q, steps), log)


def defective_coloring(g: Graph, coloring: dict[int, int], q: int, alpha, config: SimConfig | None = None,
                       label: str = "defective") -> ColoringResult:
    """Coloring where every v has at most floor(alpha * deg(v)) same-colored neighbors."""
    alpha = Fraction(alpha)
    if not 0 < alpha <= 1:
        raise InvalidAlpha(f"alpha must lie in (0, 1], got {alpha}")
    steps = defective_schedule(q, alpha)
    cfg = config or SimConfig()
    cfg = SimConfig(coloring=coloring, q=q, delta=cfg.delta, n=cfg.n, theta=cfg.theta, C=cfg.C,
                    round_cap=cfg.round_cap)
    colors, log = run(g, cfg, DefectiveProgram(steps), label=label, validate=False)
    return ColoringResult(colors, schedule_colors(q, steps), log)


class GreedyClassProgram(NodeProgram):
    """Color classes take turns; a node picks the lowest color x with alpha_v(x) <= d_v(x).

    A node in class c decides in round c (isolated nodes decide immediately) and
    then announces its color.  Same-colored neighbors that decided earlier become
    its out-neighbors.
    """

    def init(self, view):
        lst, cls = view.input
        state = {"list": lst, "cls": 0 if not view.neighbors else cls, "t": 0, "seen": {}, "done": False}
        return self._maybe_pick(state)

    def step(self, state, inbox):
        seen = dict(state["seen"])
        for u, x in inbox.items():
            seen[u] = x
        state = dict(state, seen=seen, t=state["t"] + 1)
        return self._maybe_pick(state)

    def _maybe_pick(self, state):
        if state["t"] < state["cls"]:
            return state, None
        counts: dict[int, int] = {}
        for x in state["seen"].values():
            counts[x] = counts.get(x, 0) + 1
        free = [x for x, d in sorted(state["list"].items()) if counts.get(x, 0) <= d]
        # slack >= 1 makes this non-empty by pigeonhole
        assert free, "greedy base solver got stuck"
        x = free[0]
        out = tuple(sorted(u for u, y in state["seen"].items() if y == x))
        return dict(state, out={"color": x, "out": out}, done=True), x


def base_arbdefective(g: Graph, inst: ListInstance, coloring: dict[int, int], q: int,
                      delta: int | None = None, log: RoundLog | None = None,
                      round_cap: int = DEFAULT_ROUND_CAP) -> tuple[Solution, RoundLog]:
    """Slack-1 list arbdefective solver: Linial classes, then one greedy turn per class."""
    log = log if log is not None else RoundLog()
    ok, _ = slack_satisfied(g, inst, 1)
    if not ok:
        raise SlackTooSmall("base solver needs slack 1")
    delta = g.delta if delta is None else delta
    log.invoke("base")
    lin = linial_coloring(g, SimConfig(coloring=coloring, q=q, delta=delta, round_cap=round_cap))
    log.extend(lin.log)
    inputs = {v: (inst.lists[v], lin.colors[v]) for v in g.nodes}
    outs, _ = run(g, SimConfig(delta=delta, round_cap=round_cap), GreedyClassProgram(), inputs=inputs, label="base", log=log,
                  validate=False)
    colors = {v: o["color"] for v, o in outs.items()}
    orientation = {(v, u) for v, o in outs.items() for u in o["out"]}
    return Solution(colors, orientation if inst.mode == ARBDEFECTIVE else None), log
