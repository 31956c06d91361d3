"""Benchmark runner: per-run records, aggregates, CSV and JSON persistence."""

from __future__ import annotations

import json
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

from .engine import SolveConfig, heuristic_solve, solve
from .errors import InputError
from .graph import load_graph, partition_weight
from .oracle import brute_force_optimum

CSV_FIELDS = (
    "instance",
    "n",
    "m",
    "method",
    "objective",
    "optimum",
    "eos",
    "wall_time",
    "gap",
    "status",
    "seed",
)


@dataclass(frozen=True)
class BenchRecord:
    instance: str
    n: int
    m: int
    method: str
    objective: float | None
    optimum: float | None
    eos: float | None
    wall_time: float
    gap: float | None
    status: str
    seed: int


def eos(objective, optimum):
    """Extent of suboptimality 1 - objective/optimum; None when undefined.

    The ratio is meaningless for optima at or below zero, so those return
    the undefined marker.  (The modularity workflow separately reports 1 for
    partitions of non-positive modularity; see the CLI.)
    """
    if optimum is None or optimum <= 0:
        return None
    return 1.0 - objective / optimum


@dataclass
class BenchConfig:
    runs: int = 3
    gap_tolerance: float = 1e-6
    time_limit: float | None = None
    seed: int = 0
    workers: int = 1
    parallel_instances: int = 1
    methods: tuple = ("solve",)


def _load_manifest(path):
    with open(path) as fh:
        data = json.load(fh)
    if isinstance(data, dict):
        entries = data.get("instances", [])
        methods = tuple(data.get("methods", ())) or None
    else:
        entries = data
        methods = None
    for e in entries:
        if "path" not in e:
            raise InputError("manifest entries need a 'path' field")
    return entries, methods


def _run_one(entry, method, run_idx, cfg):
    name = entry.get("name") or entry["path"]
    seed = cfg.seed + run_idx
    try:
        G = load_graph(entry["path"], fmt=entry.get("format", "auto"))
    except (OSError, InputError) as exc:
        return BenchRecord(name, 0, 0, method, None, entry.get("optimum"), None,
                           0.0, None, f"failed: {exc}", seed)
    optimum = entry.get("optimum")
    start = time.perf_counter()
    if method == "solve":
        report = solve(G, SolveConfig(gap_tolerance=cfg.gap_tolerance,
                                      time_limit=cfg.time_limit, seed=seed,
                                      workers=cfg.workers))
        objective, gap, status = report.incumbent, report.gap, report.status
    elif method == "heuristic":
        part, objective = heuristic_solve(G, SolveConfig(seed=seed))
        gap, status = None, "HeuristicOnly"
    elif method == "oracle":
        objective, part = brute_force_optimum(G)
        objective = partition_weight(G, part)
        gap, status = 0.0, "Exact"
    else:
        raise InputError(f"unknown benchmark method {method!r}")
    wall = time.perf_counter() - start
    return BenchRecord(name, G.n, G.m, method, objective, optimum,
                       eos(objective, optimum) if optimum is not None else None,
                       wall, gap, status, seed)


def run_benchmark(manifest_path, cfg=None):
    """Execute every (instance, method, run) combination from a manifest.

    The manifest is a JSON list of {path, format?, optimum?, name?} entries
    (or {"instances": [...], "methods": [...]}); missing files yield failed
    records without aborting the batch.  Returns the list of BenchRecord.
    """
    cfg = cfg or BenchConfig()
    entries, manifest_methods = _load_manifest(manifest_path)
    methods = manifest_methods or cfg.methods
    jobs = [
        (entry, method, run_idx)
        for entry in entries
        for method in methods
        for run_idx in range(cfg.runs)
    ]
    if cfg.parallel_instances > 1:
        with ThreadPoolExecutor(max_workers=cfg.parallel_instances) as pool:
            records = list(pool.map(lambda j: _run_one(*j, cfg), jobs))
    else:
        records = [_run_one(*job, cfg) for job in jobs]
    return records


def aggregate_records(records):
    """Mean and stdev of time and objective per (instance, method)."""
    groups = {}
    for rec in records:
        groups.setdefault((rec.instance, rec.method), []).append(rec)
    out = []
    for (instance, method), recs in sorted(groups.items()):
        objs = [r.objective for r in recs if r.objective is not None]
        times = [r.wall_time for r in recs]
        out.append(
            {
                "instance": instance,
                "method": method,
                "runs": len(recs),
                "objective_mean": statistics.fmean(objs) if objs else None,
                "objective_std": statistics.pstdev(objs) if len(objs) > 1 else 0.0,
                "time_mean": statistics.fmean(times) if times else None,
                "time_std": statistics.pstdev(times) if len(times) > 1 else 0.0,
            }
        )
    return out


def _to_csv_cell(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_records_csv(records, path):
    import csv as _csv

    with open(path, "w", newline="") as fh:
        writer = _csv.writer(fh)
        writer.writerow(CSV_FIELDS)
        for rec in records:
            row = asdict(rec)
            writer.writerow([_to_csv_cell(row[f]) for f in CSV_FIELDS])


def read_records_csv(path):
    import csv as _csv

    records = []
    with open(path, newline="") as fh:
        for row in _csv.DictReader(fh):
            records.append(
                BenchRecord(
                    instance=row["instance"],
                    n=int(row["n"]),
                    m=int(row["m"]),
                    method=row["method"],
                    objective=float(row["objective"]) if row["objective"] else None,
                    optimum=float(row["optimum"]) if row["optimum"] else None,
                    eos=float(row["eos"]) if row["eos"] else None,
                    wall_time=float(row["wall_time"]),
                    gap=float(row["gap"]) if row["gap"] else None,
                    status=row["status"],
                    seed=int(row["seed"]),
                )
            )
    return records


def write_results(records, out_prefix):
    """Write <prefix>.csv (records) and <prefix>.json (records + aggregates)."""
    write_records_csv(records, f"{out_prefix}.csv")
    payload = {
        "records": [asdict(r) for r in records],
        "aggregates": aggregate_records(records),
    }
    with open(f"{out_prefix}.json", "w") as fh:
        json.dump(payload, fh, indent=2)
    return f"{out_prefix}.csv", f"{out_prefix}.json"
