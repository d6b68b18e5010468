"""Command-line entry point: ``localcolor <subcommand> ...``."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import generators, harness
from .errors import LocalColorError
from .gadgets import check_reduction
from .graph import check_proper, format_graph, format_hypergraph, line_graph, read_graph
from .instances import ARBDEFECTIVE, DEFECTIVE, load_instance, load_solution, verify_arbdefective, verify_defective
from .oracle import brute_force_solve, tree_counterexample_search
from .recursion import solve_main
from .sim import DEFAULT_ROUND_CAP


def _write_text(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _emit(obj, out: str | None) -> None:
    _write_text(json.dumps(obj, indent=1, sort_keys=True, default=str) + "\n", out)


def cmd_generate(args) -> int:
    if args.what in ("hypergraph", "line-graph"):
        h = generators.gen_hypergraph(args.n, args.r, args.d, args.seed)
        text = format_hypergraph(h) if args.what == "hypergraph" else format_graph(line_graph(h))
        _write_text(text, args.out)
    elif args.what == "graph":
        _write_text(format_graph(generators.gen_graph(args.n, args.p, args.seed, args.max_degree)), args.out)
    else:
        if not args.graph:
            raise SystemExit("generate instance needs --graph")
        g = read_graph(args.graph)
        inst = generators.gen_instance(g, args.C or g.delta + 1, args.S, args.mode, args.seed, preset=args.preset)
        _emit(inst.to_json(), args.out)
    return 0


def cmd_run(args) -> int:
    if args.spec:
        spec = harness.ExperimentSpec.load(args.spec)
        if args.seed is not None:
            spec.seed = args.seed
        if args.eps_policy:
            spec.eps_policy = args.eps_policy
        if args.round_cap:
            spec.round_cap = args.round_cap
        out = args.out or Path(args.spec).with_suffix("")
        res = harness.run_experiment(spec, out=out, workers=args.workers)
        bad = sum(r["violations"] for r in res.rows)
        print(f"{len(res.rows)} trials, {bad} violations, csv sha256 {res.csv_sha256}")
        print(f"wrote {Path(out).with_suffix('.csv')} and {Path(out).with_suffix('.json')}")
        return 1 if bad else 0
    if not (args.graph and args.instance):
        raise SystemExit("run needs a spec file, or --graph and --instance")
    g = read_graph(args.graph)
    res = solve_main(g, load_instance(args.instance), eps_policy=args.eps_policy or "auto",
                     round_cap=args.round_cap or DEFAULT_ROUND_CAP)
    _emit({"solution": res.solution.to_json(), "rounds": res.log.to_json(), "theta": res.theta,
           "stats": res.stats.to_json(), "trace": res.trace.to_json(max_depth=3)}, args.out)
    return 0


def cmd_verify(args) -> int:
    g = read_graph(args.graph)
    inst = load_instance(args.instance)
    sol = load_solution(args.solution)
    if inst.mode == DEFECTIVE:
        bad = verify_defective(g, inst, sol)
    else:
        bad = verify_arbdefective(g, inst, sol)
    if args.proper:
        bad = list(bad) + check_proper(g, sol.colors)
    _emit({"violations": len(bad), "examples": bad[:20]}, args.out)
    return 1 if bad else 0


def cmd_oracle(args) -> int:
    if args.what == "brute":
        if not (args.graph and args.instance):
            raise SystemExit("oracle brute needs --graph and --instance")
        sol = brute_force_solve(read_graph(args.graph), load_instance(args.instance))
        _emit({"result": "unsolvable"} if sol is None else {"result": "solved", "solution": sol.to_json()}, args.out)
        return 0
    res = tree_counterexample_search(args.r, args.d, args.t, bound=args.bound, timeout=args.timeout)
    _emit(res.to_json(), args.out)
    return 0


def cmd_gadget(args) -> int:
    report = check_reduction(args.r, args.d, args.k, trees=args.trees, seed=args.seed or 0)
    _emit(report, args.out)
    return 0 if report["ok"] else 1


def cmd_report(args) -> int:
    _emit(harness.trend_report(harness.read_results(args.csv)), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--eps-policy", choices=("half", "loglog", "auto"), default=None)
    common.add_argument("--round-cap", type=int, default=None)
    common.add_argument("--out", default=None, help="output path (stdout when omitted)")

    p = argparse.ArgumentParser(prog="localcolor", description="Simulate and check distributed list coloring.")
    sub = p.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", parents=[common], help="write a random hypergraph, graph or list instance")
    gen.add_argument("what", choices=("hypergraph", "line-graph", "graph", "instance"))
    gen.add_argument("--n", type=int, default=30)
    gen.add_argument("--r", type=int, default=3)
    gen.add_argument("--d", type=int, default=3)
    gen.add_argument("--p", type=float, default=0.2)
    gen.add_argument("--max-degree", type=int, default=None)
    gen.add_argument("--graph", help="graph file for 'instance'")
    gen.add_argument("--C", type=int, default=None)
    gen.add_argument("--S", default="1")
    gen.add_argument("--mode", choices=(ARBDEFECTIVE, DEFECTIVE), default=ARBDEFECTIVE)
    gen.add_argument("--preset", default=None, help="'delta+1' for lists {0..Delta} with zero defects")
    gen.set_defaults(func=cmd_generate)

    run = sub.add_parser("run", parents=[common], help="run an experiment spec or solve one instance")
    run.add_argument("spec", nargs="?", help="experiment spec (JSON)")
    run.add_argument("--graph")
    run.add_argument("--instance")
    run.add_argument("--workers", type=int, default=None)
    run.set_defaults(func=cmd_run)

    ver = sub.add_parser("verify", parents=[common], help="check a solution against its instance")
    ver.add_argument("--graph", required=True)
    ver.add_argument("--instance", required=True)
    ver.add_argument("--solution", required=True)
    ver.add_argument("--proper", action="store_true", help="also require a proper coloring")
    ver.set_defaults(func=cmd_verify)

    ora = sub.add_parser("oracle", parents=[common], help="exhaustive solver or tree counterexample search")
    ora.add_argument("what", choices=("brute", "tree"))
    ora.add_argument("--graph")
    ora.add_argument("--instance")
    ora.add_argument("--r", type=int, default=3)
    ora.add_argument("--d", type=int, default=3)
    ora.add_argument("--t", type=int, default=1)
    ora.add_argument("--bound", type=int, default=None)
    ora.add_argument("--timeout", type=float, default=600.0)
    ora.set_defaults(func=cmd_oracle)

    gad = sub.add_parser("gadget", parents=[common], help="build the tree reduction and check extracted orientations")
    gad.add_argument("--r", type=int, default=3)
    gad.add_argument("--d", type=int, default=3)
    gad.add_argument("--k", type=int, default=1)
    gad.add_argument("--trees", type=int, default=10)
    gad.set_defaults(func=cmd_gadget)

    rep = sub.add_parser("report", parents=[common], help="summarize a results CSV")
    rep.add_argument("csv")
    rep.set_defaults(func=cmd_report)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "seed", None) is None and args.command == "generate":
        args.seed = 0
    try:
        return args.func(args)
    except (LocalColorError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
