"""Primal partitions from a merge/shift local search.

The search keeps a partition and repeatedly applies the best improving
recombination found over all ordered cluster pairs (an empty cluster is
always available as destination).  For a pair (source, destination) the
candidate recombination is the best prefix of a chain of single-node shifts:
nodes move one at a time by largest gain, each at most once per chain, and
the prefix with the highest cumulative gain is kept.  Ties break toward the
lowest (source id, destination id, node id), which makes a run fully
deterministic; seeds only vary the restart perturbations.

Two branch-specific variants support the search engine: a weight
perturbation that discourages clustering a chosen triple, and a supernode
contraction that forces chosen node sets to stay together.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from ._tolerances import GAIN_TOL
from .errors import InputError
from .graph import Partition, WeightedGraph, partition_weight

KICKS = 8  # seeded restart perturbations per call


@dataclass(frozen=True)
class HeuristicConfig:
    seed: int = 0
    start_mode: str = "separate"  # or "together"
    max_rounds: int = 100
    shift_chain_depth: int | None = None  # None means n


def median_delta(G):
    """|median| of the non-loop edge weights; 0.0 on an edgeless graph."""
    weights = [w for i, j, w in G.edges() if i != j]
    if not weights:
        return 0.0
    return float(abs(np.median(weights)))


def _descend(csr, assign, k, chain_depth, rounds_left, trace):
    """Run improvement sweeps until a local optimum or the round budget."""
    gained = 0.0
    segment = []
    while rounds_left > 0:
        gain, k = kernels.sweep_improve(*csr, assign, k, chain_depth)
        rounds_left -= 1
        if gain <= GAIN_TOL:
            break
        gained += gain
        segment.append(gain)
    if trace is not None and segment:
        trace.append(segment)
    return gained, k, rounds_left


def heuristic_partition(G, cfg=None, trace=None):
    """Deterministic-for-a-seed local-search partition of G.

    Never returns a partition worse than the better of the all-singletons
    and single-cluster baselines.  `trace`, when given, collects one list of
    accepted per-move gains per descent (each is non-negative by
    construction, so descents improve monotonically).
    """
    cfg = cfg or HeuristicConfig()
    n = G.n
    csr = kernels.prepare_csr(*G.csr())
    chain_depth = cfg.shift_chain_depth if cfg.shift_chain_depth is not None else n

    if cfg.start_mode == "together":
        assign = np.zeros(n, dtype=np.int64)
        k = 1
    else:
        assign = np.arange(n, dtype=np.int64)
        k = n
    value = partition_weight(G, Partition(assign))
    gained, k, rounds_left = _descend(csr, assign, k, chain_depth, cfg.max_rounds, trace)
    value += gained

    best_assign = assign.copy()
    best_value = value
    rng = np.random.default_rng(cfg.seed)
    for _ in range(KICKS):
        if rounds_left <= 0:
            break
        assign = best_assign.copy()
        k = _perturb(assign, rng)
        value = partition_weight(G, Partition(assign))
        gained, k, rounds_left = _descend(csr, assign, k, chain_depth, rounds_left, trace)
        value += gained
        if value > best_value:
            best_value = value
            best_assign = assign.copy()

    # baseline floor: singletons and one-cluster are always available
    best = Partition(best_assign)
    best_value = partition_weight(G, best)  # drop accumulated float drift
    for cand in (Partition.singletons(n), Partition.together(n)):
        if partition_weight(G, cand) > best_value:
            best_value = partition_weight(G, cand)
            best = cand
    return best


def _perturb(assign, rng):
    """Move a few random nodes to random (possibly fresh) clusters."""
    n = len(assign)
    k = int(assign.max()) + 1
    count = max(1, n // 8)
    nodes = rng.choice(n, size=count, replace=False)
    for v in nodes:
        assign[v] = int(rng.integers(0, k + 1))
    relabel = {}
    for v in range(n):
        c = int(assign[v])
        if c not in relabel:
            relabel[c] = len(relabel)
        assign[v] = relabel[c]
    return len(relabel)


def heuristic_right_branch(G, triple, delta, cfg=None, trace=None):
    """Partition search biased against keeping `triple` together.

    `delta` is subtracted once from every non-loop edge incident to the
    triple's nodes (self-loops are cluster-independent and stay untouched);
    the search runs on the perturbed copy and the returned partition is for
    the original graph, where callers evaluate it on the true weights.
    Compliance with the right-branch constraint is not guaranteed.
    """
    if delta < 0:
        raise InputError(f"delta must be nonnegative, got {delta}")
    touched = set(triple)
    edges = []
    for i, j, w in G.edges():
        if i != j and (i in touched or j in touched):
            w = w - delta
        if w != 0:
            edges.append((i, j, w))
    perturbed = WeightedGraph(G.n, edges)
    return heuristic_partition(perturbed, cfg, trace=trace)


def heuristic_left_branch(G, merged_sets, cfg=None, trace=None):
    """Partition search with each node set contracted to a supernode.

    Parallel edges into a supernode are summed; edges internal to a set (and
    the members' self-loops) become the supernode's self-loop, so contracted
    objective values match expanded ones exactly.  Every merged set ends up
    inside a single cluster of the result.
    """
    merged_sets = [frozenset(s) for s in merged_sets]
    seen = set()
    for s in merged_sets:
        if seen & s:
            raise InputError("merged node sets must be disjoint")
        seen |= s
    if not merged_sets:
        return heuristic_partition(G, cfg, trace=trace)

    rep = {}
    for sid, s in enumerate(merged_sets):
        for v in s:
            rep[v] = sid
    nxt = len(merged_sets)
    for v in range(G.n):
        if v not in rep:
            rep[v] = nxt
            nxt += 1

    agg = {}
    loops = np.zeros(nxt)
    for v in range(G.n):
        loops[rep[v]] += G.loop(v)
    for i, j, w in G.edges():
        if i == j:
            continue
        a, b = rep[i], rep[j]
        if a == b:
            loops[a] += w
        else:
            key = (min(a, b), max(a, b))
            agg[key] = agg.get(key, 0.0) + w
    edges = [(i, j, w) for (i, j), w in sorted(agg.items()) if w != 0]
    edges += [(v, v, loops[v]) for v in range(nxt) if loops[v] != 0]
    contracted = WeightedGraph(nxt, edges)
    inner = heuristic_partition(contracted, cfg, trace=trace)
    return Partition([inner.assignment[rep[v]] for v in range(G.n)])
