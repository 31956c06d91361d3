"""Command-line front end.

Subcommands mirror the library workflows: `solve` one instance, `oracle` it
by brute force, `gen` synthetic instances, `reduce` other problem kinds to
solver input, and `bench` a manifest of instances.  Exit codes: 0 success
(a time-limited solve with a valid incumbent is a success), 2 bad input,
3 internal inconsistency.
"""

from __future__ import annotations

import argparse
import json
import sys

from .bench import BenchConfig, run_benchmark, write_results
from .engine import SolveConfig, heuristic_solve, solve
from .errors import InputError, InternalInconsistencyError
from .graph import load_graph, write_edge_list
from .instances import (
    abr_to_cp,
    fisher_portfolio_graph,
    gen_ba_weighted,
    gen_clusedit_instance,
    gen_correlation_instance,
    modularity_to_cp,
    read_attribute_csv,
    read_returns_csv,
)
from .oracle import brute_force_optimum


def _original_labels(G, clusters):
    if G.labels is None:
        return clusters
    return [[G.labels[v] for v in cluster] for cluster in clusters]


def _emit_solution(args, payload, assignment_rows):
    if args.output == "json":
        text = json.dumps(payload, indent=2)
    else:
        lines = ["# " + " ".join(f"{k}={payload[k]}" for k in payload if k != "clusters")]
        lines.append("node,cluster")
        lines.extend(f"{node},{cid}" for node, cid in assignment_rows)
        text = "\n".join(lines)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _cmd_solve(args):
    G = load_graph(args.instance, fmt=args.format)
    if G.remap_note:
        print(f"note: {G.remap_note}", file=sys.stderr)
    cfg = SolveConfig(
        gap_tolerance=args.gap_tol,
        time_limit=args.time_limit,
        seed=args.seed,
        workers=args.workers,
        delta=args.delta,
        use_pendant_reduction=not args.no_reduce,
    )
    if args.heuristic_only:
        part, objective = heuristic_solve(G, cfg)
        payload = {
            "objective": objective,
            "bound": None,
            "gap": None,
            "status": "HeuristicOnly",
            "clusters": _original_labels(G, part.clusters()),
        }
    else:
        report = solve(G, cfg)
        part = report.best_partition
        payload = {
            "objective": report.incumbent,
            "bound": report.best_bound,
            "gap": report.gap,
            "status": report.status,
            "clusters": _original_labels(G, part.clusters()),
        }
    labels = G.labels or list(range(G.n))
    rows = [(labels[v], int(c)) for v, c in enumerate(part.assignment)]
    _emit_solution(args, payload, rows)
    return 0


def _cmd_oracle(args):
    G = load_graph(args.instance, fmt=args.format)
    objective, part = brute_force_optimum(G)
    payload = {
        "objective": objective,
        "bound": objective,
        "gap": 0.0,
        "status": "Exact",
        "clusters": _original_labels(G, part.clusters()),
    }
    labels = G.labels or list(range(G.n))
    rows = [(labels[v], int(c)) for v, c in enumerate(part.assignment)]
    _emit_solution(args, payload, rows)
    return 0


def _write_graph(G, out):
    write_edge_list(G, out)
    if G.labels is not None:
        with open(out + ".labels.json", "w") as fh:
            json.dump(list(G.labels), fh)
    print(f"wrote {G.n} nodes, {G.m} edges to {out}")


def _cmd_gen(args):
    if args.family == "ba":
        G = gen_ba_weighted(
            n_range=(args.n_min, args.n_max),
            attach_range=(args.attach_min, args.attach_max),
            weight_range=(args.w_min, args.w_max),
            seed=args.seed,
        )
    elif args.family == "correlation":
        G = gen_correlation_instance(args.cols, args.rows, seed=args.seed)
    else:
        G = gen_clusedit_instance(args.n, args.neg_fraction, seed=args.seed)
    _write_graph(G, args.out)
    return 0


def _cmd_reduce(args):
    if args.kind == "modularity":
        G = load_graph(args.input, fmt=args.format)
        out = modularity_to_cp(G, gamma=args.gamma)
    elif args.kind == "abr":
        out = abr_to_cp(read_attribute_csv(args.input))
    else:
        out = fisher_portfolio_graph(read_returns_csv(args.input))
    _write_graph(out, args.out)
    return 0


def _cmd_bench(args):
    cfg = BenchConfig(
        runs=args.runs,
        gap_tolerance=args.gap_tol,
        time_limit=args.time_limit,
        seed=args.seed,
        workers=args.workers,
        parallel_instances=args.parallel_instances,
        methods=tuple(args.methods.split(",")),
    )
    records = run_benchmark(args.manifest, cfg)
    csv_path, json_path = write_results(records, args.out)
    failed = sum(1 for r in records if r.status.startswith("failed"))
    print(f"{len(records)} runs ({failed} failed) -> {csv_path}, {json_path}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="cliquepart",
                                     description="Clique partitioning solver")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_format(p):
        p.add_argument("--format", choices=["auto", "edgelist", "triangle"],
                       default="auto", help="input format (default: auto-detect)")

    p = sub.add_parser("solve", help="solve one instance to the gap tolerance")
    p.add_argument("instance")
    add_format(p)
    p.add_argument("--gap-tol", type=float, default=1e-6)
    p.add_argument("--time-limit", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--delta", type=float, default=None,
                   help="right-branch weight perturbation (default: |median|)")
    p.add_argument("--no-reduce", action="store_true",
                   help="skip pendant reduction")
    p.add_argument("--heuristic-only", action="store_true")
    p.add_argument("--output", choices=["json", "csv"], default="json")
    p.add_argument("--out", default=None, help="write result here instead of stdout")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("oracle", help="brute-force optimum (n <= 12)")
    p.add_argument("instance")
    add_format(p)
    p.add_argument("--output", choices=["json", "csv"], default="json")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("gen", help="generate a synthetic instance")
    fam = p.add_subparsers(dest="family", required=True)

    b = fam.add_parser("ba", help="preferential-attachment signed graph")
    b.add_argument("--n-min", type=int, default=100)
    b.add_argument("--n-max", type=int, default=150)
    b.add_argument("--attach-min", type=int, default=3)
    b.add_argument("--attach-max", type=int, default=6)
    b.add_argument("--w-min", type=int, default=-10)
    b.add_argument("--w-max", type=int, default=10)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out", required=True)
    b.set_defaults(func=_cmd_gen)

    c = fam.add_parser("correlation", help="column-correlation complete graph")
    c.add_argument("--cols", type=int, required=True)
    c.add_argument("--rows", type=int, required=True)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--out", required=True)
    c.set_defaults(func=_cmd_gen)

    c = fam.add_parser("clusedit", help="complete +-1 graph")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--neg-fraction", type=float, default=0.5)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--out", required=True)
    c.set_defaults(func=_cmd_gen)

    p = sub.add_parser("reduce", help="convert other inputs to solver instances")
    kind = p.add_subparsers(dest="kind", required=True)

    r = kind.add_parser("modularity", help="modularity maximization -> solver input")
    r.add_argument("input")
    add_format(r)
    r.add_argument("--gamma", type=float, default=1.0)
    r.add_argument("--out", required=True)
    r.set_defaults(func=_cmd_reduce)

    r = kind.add_parser("abr", help="categorical attribute CSV -> agreement graph")
    r.add_argument("input")
    r.add_argument("--out", required=True)
    r.set_defaults(func=_cmd_reduce)

    r = kind.add_parser("portfolio", help="returns CSV -> screened correlation graph")
    r.add_argument("input")
    r.add_argument("--out", required=True)
    r.set_defaults(func=_cmd_reduce)

    p = sub.add_parser("bench", help="run a benchmark manifest")
    p.add_argument("manifest")
    p.add_argument("--out", default="bench_results", help="output path prefix")
    p.add_argument("--runs", type=int, default=3)
    p.add_argument("--gap-tol", type=float, default=1e-6)
    p.add_argument("--time-limit", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--parallel-instances", type=int, default=1)
    p.add_argument("--methods", default="solve",
                   help="comma-separated: solve,heuristic,oracle")
    p.set_defaults(func=_cmd_bench)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InternalInconsistencyError as exc:
        print(f"internal inconsistency: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
