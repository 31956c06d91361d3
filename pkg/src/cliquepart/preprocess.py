"""Problem-size reduction: component decomposition and pendant collapsing.

Pendant structures are removed without changing the optimal objective value:

* a pendant node joined by a positive edge always sits with its sole
  neighbor, so the edge becomes a self-loop on the neighbor;
* a pendant node joined by a negative edge is always a singleton, so the
  edge contributes nothing and the node is dropped;
* a pendant clique (complete, all-positive interior, attached to the rest
  of the graph through a single connector edge) always forms one cluster
  with its connector, so the interior collapses to a self-loop there.

Every removal is recorded so partitions of the reduced graph can be lifted
back to the original node set with identical objective value.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import InputError
from .graph import Partition, WeightedGraph, connected_components


@dataclass(frozen=True)
class PendantNode:
    pendant: int
    neighbor: int
    weight: float
    kept_separate: bool


@dataclass(frozen=True)
class PendantClique:
    members: tuple  # clique nodes, connector included
    connector: int
    internal_weight: float


@dataclass
class ReductionLog:
    """Replayable record of pendant removals, in application order."""

    original_n: int
    steps: list = field(default_factory=list)
    id_map: list = field(default_factory=list)  # reduced id -> original id


def decompose_components(G):
    """Split into connected induced subgraphs; returns [(subgraph, id_map)].

    Solving each component and concatenating the partitions with disjoint
    cluster ids is equivalent to solving the whole graph: only within-cluster
    edges count, and no edge crosses components.
    """
    return [G.subgraph(comp) for comp in connected_components(G)]


def reduce_pendants(G):
    """Collapse pendant nodes and pendant cliques to fixpoint.

    Returns (reduced graph, ReductionLog).  The reduced graph has contiguous
    node ids; the log carries the id map and the removal records needed by
    `lift_partition`.  The optimal objective value is preserved exactly.
    """
    adj = {v: {} for v in range(G.n)}
    loops = [G.loop(v) for v in range(G.n)]
    for i, j, w in G.edges():
        if i != j:
            adj[i][j] = w
            adj[j][i] = w
    steps = []

    changed = True
    while changed:
        changed = _reduce_pendant_nodes(adj, loops, steps)
        if _reduce_pendant_cliques(adj, loops, steps):
            changed = True

    alive = sorted(adj)
    back = {old: new for new, old in enumerate(alive)}
    edges = []
    for old in alive:
        new = back[old]
        if loops[old] != 0:
            edges.append((new, new, loops[old]))
        for u, w in sorted(adj[old].items()):
            if old < u:
                edges.append((new, back[u], w))
    reduced = WeightedGraph(len(alive), edges)
    return reduced, ReductionLog(original_n=G.n, steps=steps, id_map=alive)


def _reduce_pendant_nodes(adj, loops, steps):
    changed = False
    again = True
    while again:
        again = False
        for v in sorted(adj):
            if len(adj[v]) != 1:
                continue
            (u, w), = adj[v].items()
            if w > 0:
                loops[u] += w + loops[v]
                steps.append(PendantNode(v, u, w, kept_separate=False))
            else:
                # negative edge never internal at an optimum; loop weight is
                # an objective constant and rides along on the neighbor
                loops[u] += loops[v]
                steps.append(PendantNode(v, u, w, kept_separate=True))
            del adj[u][v]
            del adj[v]
            again = True
            changed = True
    return changed


def _reduce_pendant_cliques(adj, loops, steps):
    """One pass of pendant-clique collapsing, smallest cliques first."""
    changed = False
    for size in sorted({len(adj[v]) + 1 for v in adj}):
        if size < 3:
            continue
        for v in sorted(adj):
            if v not in adj or len(adj[v]) != size - 1:
                continue
            clique = _pendant_clique_at(adj, v, size)
            if clique is None:
                continue
            members, connector = clique
            internal = 0.0
            for a in members:
                for b, w in adj[a].items():
                    if a < b and b in members:
                        internal += w
            for a in members:
                if a == connector:
                    continue
                loops[connector] += loops[a]
                for b in list(adj[a]):
                    del adj[b][a]
                del adj[a]
            loops[connector] += internal
            steps.append(PendantClique(tuple(sorted(members)), connector, internal))
            changed = True
    return changed


def _pendant_clique_at(adj, v, size):
    """Check whether v plus its neighborhood is a pendant `size`-clique."""
    members = {v} | set(adj[v])
    if len(members) != size:
        return None
    connector = None
    for a in sorted(members):
        inside = [b for b in adj[a] if b in members]
        outside = [b for b in adj[a] if b not in members]
        if len(inside) != size - 1:
            return None  # interior not complete for this node
        if any(adj[a][b] <= 0 for b in inside):
            return None  # internal weights must all be positive
        if len(outside) == 0:
            continue
        if len(outside) == 1 and connector is None:
            connector = a
        else:
            return None  # more than one attachment point
    if connector is None:
        return None  # an isolated clique is a whole component, not pendant
    return members, connector


def lift_partition(log, P_reduced):
    """Expand a partition of the reduced graph back to the original nodes.

    Pendant nodes rejoin their neighbor's cluster (or become singletons when
    the connecting edge was negative); clique members rejoin their connector.
    The objective value is preserved exactly because removed weight lives on
    as self-loops.
    """
    if len(P_reduced) != len(log.id_map):
        raise InputError(
            f"partition covers {len(P_reduced)} nodes, reduced graph has {len(log.id_map)}"
        )
    assign = [-1] * log.original_n
    for reduced_id, original_id in enumerate(log.id_map):
        assign[original_id] = int(P_reduced.assignment[reduced_id])
    next_cluster = P_reduced.k
    for step in reversed(log.steps):
        if isinstance(step, PendantClique):
            for a in step.members:
                if a != step.connector:
                    assign[a] = assign[step.connector]
        elif step.kept_separate:
            assign[step.pendant] = next_cluster
            next_cluster += 1
        else:
            assign[step.pendant] = assign[step.neighbor]
    if any(c < 0 for c in assign):
        raise InputError("reduction log does not cover the original node set")
    return Partition(assign)
