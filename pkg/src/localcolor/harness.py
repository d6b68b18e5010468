"""Experiment runner: expands a JSON spec into trials, solves each one, writes CSV and JSON reports.

Spec file layout::

    {
      "name": "sweep",
      "generator": {"type": "hypergraph", "n": [30, 60], "r": 3, "d": [3, 4]},
      "instance": {"preset": "delta+1"},
      "algorithm": "solve_main",
      "eps_policy": "auto",
      "trials": 20,
      "seed": 0
    }

List-valued generator fields are swept as a cartesian product; every
combination is one row group.  Generator types are ``hypergraph`` (line graph
of a random r-uniform d-regular hypergraph), ``complete`` (K_n) and ``gnp``
(random graph with optional degree cap).  Instances are either the
``delta+1`` preset or ``{"C": .., "S": .., "mode": ..}`` random lists.
"""
from __future__ import annotations

import csv
import hashlib
import io
import itertools
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .errors import SpecParse
from .generators import delta_plus_one, gen_graph, gen_hypergraph, gen_instance
from .graph import Graph, check_proper, line_graph, neighborhood_independence
from .instances import ARBDEFECTIVE, DEFECTIVE, ListInstance, Solution, verify_arbdefective
from .primitives import base_arbdefective, linial_coloring
from .recursion import solve_main
from .sim import DEFAULT_ROUND_CAP, SimConfig

CSV_COLUMNS = (
    "group", "trial", "seed", "n_H", "r", "d", "n", "m", "Delta", "theta", "C", "S", "eps_policy",
    "rounds_total", "rounds_logstar_components", "rounds_announce", "rounds_base", "recursion_depth",
    "subinstances_A", "subinstances_D", "base_calls", "slack_checks", "violations", "colors_used",
)
"""Fixed CSV columns.  rounds_logstar_components counts Linial and defective
coloring rounds; rounds_announce counts one-round color broadcasts between
phases; rounds_base counts greedy rounds in base cases.  Wall time lives only in
the JSON report so that the CSV is reproducible byte for byte."""

GENERATORS = ("hypergraph", "complete", "gnp")
ALGORITHMS = ("solve_main", "base")
EPS_POLICIES = ("half", "loglog", "auto")
TRACE_SAMPLE_DEPTH = 3


@dataclass(frozen=True)
class Trial:
    group: str
    trial: int
    seed: int
    generator: dict
    instance: dict
    algorithm: str
    eps_policy: str
    round_cap: int


@dataclass
class ExperimentSpec:
    name: str
    generator: dict
    instance: dict
    algorithm: str = "solve_main"
    eps_policy: str = "auto"
    trials: int = 1
    seed: int = 0
    round_cap: int = DEFAULT_ROUND_CAP
    workers: int = 1
    extra: dict = field(default_factory=dict)

    @classmethod
    def from_json(cls, data: Any) -> ExperimentSpec:
        if not isinstance(data, dict):
            raise SpecParse("spec must be a JSON object")
        gen = data.get("generator")
        if not isinstance(gen, dict) or gen.get("type") not in GENERATORS:
            raise SpecParse(f"generator.type must be one of {GENERATORS}")
        inst = data.get("instance", {"preset": "delta+1"})
        if not isinstance(inst, dict) or not ("preset" in inst or {"C", "S"} <= inst.keys()):
            raise SpecParse("instance needs a preset or both C and S")
        if inst.get("mode", ARBDEFECTIVE) not in (ARBDEFECTIVE, DEFECTIVE):
            raise SpecParse(f"unknown instance mode {inst.get('mode')!r}")
        spec = cls(
            name=str(data.get("name", "experiment")),
            generator=gen,
            instance=inst,
            algorithm=data.get("algorithm", "solve_main"),
            eps_policy=data.get("eps_policy", "auto"),
            trials=data.get("trials", 1),
            seed=data.get("seed", 0),
            round_cap=data.get("round_cap", DEFAULT_ROUND_CAP),
            workers=data.get("workers", 1),
        )
        if spec.algorithm not in ALGORITHMS:
            raise SpecParse(f"algorithm must be one of {ALGORITHMS}")
        if spec.eps_policy not in EPS_POLICIES:
            raise SpecParse(f"eps_policy must be one of {EPS_POLICIES}")
        for key in ("trials", "seed", "round_cap", "workers"):
            value = getattr(spec, key)
            if not isinstance(value, int) or isinstance(value, bool) or value < (0 if key == "seed" else 1):
                raise SpecParse(f"{key} must be a positive integer, got {value!r}")
        return spec

    @classmethod
    def load(cls, path: str | Path) -> ExperimentSpec:
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise SpecParse(f"{path}: {exc}") from exc
        return cls.from_json(data)

    def groups(self) -> list[dict]:
        """One generator parameter set per combination of list-valued fields."""
        keys = sorted(self.generator)
        axes = [v if isinstance(v, list) else [v] for v in (self.generator[k] for k in keys)]
        return [dict(zip(keys, combo)) for combo in itertools.product(*axes)]

    def trial_list(self) -> list[Trial]:
        out = []
        for params in self.groups():
            label = ",".join(f"{k}={v}" for k, v in params.items() if k != "type")
            for t in range(self.trials):
                out.append(Trial(label, t, self.seed + t, params, self.instance, self.algorithm,
                                 self.eps_policy, self.round_cap))
        return out


def build_graph(params: dict, seed: int) -> tuple[Graph, dict]:
    """Graph for one trial plus the generator columns (n_H, r, d) for the CSV."""
    kind = params["type"]
    try:
        if kind == "hypergraph":
            n_h, r, d = int(params["n"]), int(params.get("r", 3)), int(params["d"])
            return line_graph(gen_hypergraph(n_h, r, d, seed)), {"n_H": n_h, "r": r, "d": d}
        if kind == "complete":
            n = int(params["n"])
            return Graph.from_edges(n, itertools.combinations(range(n), 2)), {"n_H": "", "r": "", "d": ""}
        n = int(params["n"])
        g = gen_graph(n, float(params["p"]), seed, params.get("max_degree"))
        return g, {"n_H": "", "r": "", "d": ""}
    except KeyError as exc:
        raise SpecParse(f"generator {kind!r} is missing field {exc}") from exc


def build_instance(g: Graph, params: dict, seed: int) -> tuple[ListInstance, Any]:
    mode = params.get("mode", ARBDEFECTIVE)
    if "preset" in params:
        return gen_instance(g, g.delta + 1, 1, mode, seed, preset=params["preset"]), 1
    return gen_instance(g, int(params["C"]), params["S"], mode, seed), params["S"]


def _violations(g: Graph, inst: ListInstance, sol: Solution, preset: bool) -> int:
    bad = verify_arbdefective(g, ListInstance(ARBDEFECTIVE, inst.C, inst.lists), sol)
    if preset:
        bad += check_proper(g, sol.colors)
    return len(bad)


def run_trial(trial: Trial) -> dict:
    """Solve one trial; returns the CSV row plus JSON-only extras under ``_json``."""
    g, gen_cols = build_graph(trial.generator, trial.seed)
    inst, S = build_instance(g, trial.instance, trial.seed)
    start = time.perf_counter()
    theta = neighborhood_independence(g).theta
    row: dict[str, Any] = {"group": trial.group, "trial": trial.trial, "seed": trial.seed, **gen_cols,
                           "n": g.n, "m": g.m, "Delta": g.delta, "theta": theta, "C": inst.C, "S": S,
                           "eps_policy": trial.eps_policy}
    if trial.algorithm == "solve_main":
        res = solve_main(g, inst, theta=theta, eps_policy=trial.eps_policy, round_cap=trial.round_cap)
        sol, log = res.solution, res.log
        kinds = [node.kind for node, lvl in res.trace.walk() if lvl > 0]
        extra = {"trace": res.trace.to_json(TRACE_SAMPLE_DEPTH), "stats": res.stats.to_json(),
                 "def_calls": res.stats.def_calls}
        depth, slack_checks = res.trace.depth(), res.stats.slack_checks
    else:
        arb = ListInstance(ARBDEFECTIVE, inst.C, inst.lists)
        lin = linial_coloring(g, SimConfig(ids={v: v for v in g.nodes}, round_cap=trial.round_cap))
        sol, log = base_arbdefective(g, arb, lin.colors, lin.num_colors, round_cap=trial.round_cap)
        log.extend(lin.log)
        kinds, extra, depth, slack_checks = ["base"], {}, 1, 1
    wall = time.perf_counter() - start
    bd = log.breakdown
    row.update({
        "rounds_total": log.total,
        "rounds_logstar_components": bd.get("linial", 0) + bd.get("defective", 0),
        "rounds_announce": bd.get("announce", 0),
        "rounds_base": bd.get("base", 0),
        "recursion_depth": depth,
        "subinstances_A": kinds.count("A"),
        "subinstances_D": kinds.count("D"),
        "base_calls": kinds.count("base"),
        "slack_checks": slack_checks,
        "violations": _violations(g, inst, sol, "preset" in trial.instance),
        "colors_used": len(set(sol.colors.values())),
    })
    row["_json"] = {"wall_time": wall, "rounds": log.to_json(), **extra}
    return row


@dataclass
class ExperimentResult:
    rows: list[dict]
    csv_text: str
    report: dict

    @property
    def csv_sha256(self) -> str:
        return hashlib.sha256(self.csv_text.encode()).hexdigest()


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def run_experiment(spec: ExperimentSpec | dict | str | Path, out: str | Path | None = None,
                   workers: int | None = None) -> ExperimentResult:
    """Run every trial of the spec; with ``out`` set, write ``<out>.csv`` and ``<out>.json``.

    Trials are independent, so ``workers > 1`` runs them in separate processes;
    rows are always reported in spec order.
    """
    if isinstance(spec, (str, Path)):
        spec = ExperimentSpec.load(spec)
    elif isinstance(spec, dict):
        spec = ExperimentSpec.from_json(spec)
    trials = spec.trial_list()
    workers = workers or spec.workers
    start = time.perf_counter()
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            rows = list(pool.map(run_trial, trials))
    else:
        rows = [run_trial(t) for t in trials]
    csv_text = rows_to_csv(rows)
    report = {
        "name": spec.name,
        "spec": {"generator": spec.generator, "instance": spec.instance, "algorithm": spec.algorithm,
                 "eps_policy": spec.eps_policy, "trials": spec.trials, "seed": spec.seed},
        "wall_time": time.perf_counter() - start,
        "csv_sha256": hashlib.sha256(csv_text.encode()).hexdigest(),
        "groups": summarize(rows),
        "trials": [{"group": r["group"], "trial": r["trial"], **r["_json"]} for r in rows],
    }
    if out is not None:
        out = Path(out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.with_suffix(".csv").write_text(csv_text, encoding="utf-8")
        out.with_suffix(".json").write_text(json.dumps(report, indent=1, default=str), encoding="utf-8")
    return ExperimentResult(rows, csv_text, report)


def summarize(rows: list[dict]) -> dict[str, dict]:
    """Per-group means and maxima of the numeric columns."""
    groups: dict[str, list[dict]] = {}
    for r in rows:
        groups.setdefault(r["group"], []).append(r)
    out = {}
    for name, rs in groups.items():
        entry: dict[str, Any] = {"trials": len(rs)}
        for col in ("Delta", "theta", "rounds_total", "recursion_depth", "slack_checks", "violations"):
            vals = [float(r[col]) for r in rs if r.get(col) not in ("", None)]
            if vals:
                entry[f"{col}_mean"] = sum(vals) / len(vals)
                entry[f"{col}_max"] = max(vals)
        out[name] = entry
    return out


def read_results(path: str | Path) -> list[dict]:
    """Read a results CSV.  Columns not in CSV_COLUMNS are kept as strings; known numeric ones are parsed."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    for r in rows:
        for k, v in r.items():
            if k in CSV_COLUMNS and k not in ("group", "eps_policy", "S"):
                try:
                    r[k] = int(v)
                except (TypeError, ValueError):
                    pass
    return rows


def trend_report(rows: list[dict]) -> dict:
    """Group means plus whether mean rounds are nondecreasing in Delta for each theta (informational)."""
    summary = summarize(rows)
    by_theta: dict[Any, list[tuple[float, float]]] = {}
    for s in summary.values():
        if "Delta_mean" in s and "rounds_total_mean" in s:
            by_theta.setdefault(s.get("theta_max"), []).append((s["Delta_mean"], s["rounds_total_mean"]))
    trend = {}
    for theta, pts in sorted(by_theta.items(), key=lambda kv: str(kv[0])):
        pts.sort()
        trend[str(theta)] = {"points": pts,
                             "monotone": all(a[1] <= b[1] for a, b in zip(pts, pts[1:]))}
    return {"groups": summary, "rounds_vs_delta": trend}
