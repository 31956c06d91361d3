"""Branch-and-cut search with triple branching and gap-certified termination.

The search solves each connected component separately after pendant
reduction.  Per component it keeps an incumbent (best known partition) and a
best bound, starting from a local-search lower bound and the minimum of a
combinatorial and an LP upper bound.  While the relative gap exceeds the
tolerance it explores the tree level by level: every open node gets its LP
solved to a cut-separation fixpoint, is fathomed when the LP is integral,
infeasible, or dominated by the incumbent, and otherwise branches on a node
triple (i,j,k) into a left child (x_ij = x_ik = x_jk = 0, the triple merged
into a supernode for the node's heuristic) and a right child (cut
x_ij + x_ik + x_jk >= 2, heuristic run on delta-perturbed weights).
Reduced-cost fixing and logical propagation shrink the children.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from threading import Lock

import numpy as np

from ._tolerances import FEAS_TOL, FIX_SLACK, GAP_ABS, GAP_EPS, INT_TOL, OPT_TOL
from .errors import CliquePartError, InternalInconsistencyError
from .graph import Partition, partition_weight
from .heuristic import (
    HeuristicConfig,
    heuristic_left_branch,
    heuristic_partition,
    heuristic_right_branch,
    median_delta,
)
from .lp import SimplexBackend, lp_upper_bound, solve_to_separation_fixpoint
from .model import build_model, make_ge2_cut, pp_postprocess, violated_branch_triples
from .preprocess import ReductionLog, decompose_components, lift_partition, reduce_pendants

FATHOM_SLACK = 1e-9  # strictness of the bound-domination check

GAP_REACHED = "GapReached"
TIME_LIMIT = "TimeLimit"
EXHAUSTED = "Exhausted"


class InvalidBranchError(CliquePartError):
    pass


@dataclass
class SolveConfig:
    gap_tolerance: float = 1e-6
    time_limit: float | None = None
    seed: int = 0
    workers: int = 1
    sep_rounds: int = 50
    sep_cuts_per_round: int = 500
    max_active_cuts: int = 5000
    delta: float | None = None  # right-branch perturbation override
    heuristic_rounds: int = 100
    start_mode: str = "separate"
    use_pendant_reduction: bool = True
    use_reduced_cost_fixing: bool = True
    use_logical_propagation: bool = True
    use_implied_cuts: bool = True

    def __post_init__(self):
        if not (self.gap_tolerance > 0):
            raise CliquePartError("gap_tolerance must be positive")


@dataclass
class SolveStats:
    nodes_explored: int = 0
    lp_solves: int = 0
    cuts_added: int = 0
    vars_fixed: int = 0
    wall_time: float = 0.0


@dataclass
class SolveReport:
    best_partition: Partition
    incumbent: float
    best_bound: float
    gap: float
    status: str
    stats: SolveStats
    trace: tuple = ()  # per component: tuple of (depth, incumbent, bound)


@dataclass
class SearchNode:
    depth: int
    node_id: int
    branch_history: tuple = ()  # ((i,j,k), "left"/"right") entries
    fixed_vars: dict = field(default_factory=dict)  # (i,j) pair -> 0/1
    local_cuts: tuple = ()  # right-branch and implied >=2 cuts
    merged_sets: tuple = ()  # disjoint frozensets from left branches
    ge2_triples: tuple = ()  # node triples carrying a >=2 cut
    all_cuts: tuple = ()  # working cut set for this node's LP
    parent_bound: float = np.inf
    basis: object = None  # warm-start token from the parent LP
    lp_bound: float | None = None
    heuristic_value: float | None = None
    heuristic_partition: Partition | None = None
    status: object = "open"  # or ("fathomed", reason)

    @property
    def fathomed(self):
        return self.status != "open"

    def side(self):
        return self.branch_history[-1][1] if self.branch_history else None

    def last_triple(self):
        return self.branch_history[-1][0] if self.branch_history else None


def compute_gap(b, i):
    """Relative optimality gap (b - i) / b with a degenerate-denominator rule.

    When the bound b is at or below zero the relative formula is meaningless;
    the gap is then 0 if the bound and incumbent agree absolutely, else 1.
    """
    if b < i - 1e-6 * max(1.0, abs(b), abs(i)):
        raise InternalInconsistencyError(f"best bound {b} below incumbent {i}")
    b_eff = max(b, i)
    if b_eff > GAP_EPS:
        return max(0.0, (b_eff - i) / b_eff)
    return 0.0 if b_eff - i <= GAP_ABS else 1.0


def _tighten_bound(previous, candidate, incumbent_value):
    """Monotone bound update; the incumbent may exceed it only by LP noise."""
    raw = min(previous, candidate)
    if incumbent_value > raw + 1e-6 * max(1.0, abs(raw)):
        raise InternalInconsistencyError(
            f"incumbent {incumbent_value} above proven bound {raw}"
        )
    return max(raw, incumbent_value)


def upper_bound_subnetwork(G):
    """Combinatorial upper bound from packing mixed-sign triangles.

    Edges are greedily packed into edge-disjoint triangles containing at
    least one positive and one negative edge; each triangle contributes its
    exact 3-node optimum instead of its positive-weight sum, so the result
    never exceeds the trivial bound (positives plus self-loops).
    """
    trivial = G.positive_sum() + G.loop_sum()
    adj = [dict(G.neighbors(v)) for v in range(G.n)]
    seen = set()
    candidates = []
    for i, j, w in G.edges():
        if i == j or w >= 0:
            continue
        for k in sorted(adj[i].keys() & adj[j].keys()):
            t = tuple(sorted((i, j, k)))
            if t in seen:
                continue
            seen.add(t)
            ws = (G.weight(t[0], t[1]), G.weight(t[0], t[2]), G.weight(t[1], t[2]))
            pos = sum(w for w in ws if w > 0)
            opt = max(sum(ws), ws[0], ws[1], ws[2], 0.0)
            if pos - opt > 0:
                candidates.append((-(pos - opt), t, pos - opt))
    candidates.sort()
    used = set()
    bound = trivial
    for _, (a, b, c), improvement in candidates:
        tri_edges = ((a, b), (a, c), (b, c))
        if any(e in used for e in tri_edges):
            continue
        used.update(tri_edges)
        bound -= improvement
    return bound


def root_bounds(G, cfg=None):
    """Initial bounds: local-search lower, min(combinatorial, LP) upper."""
    cfg = cfg or SolveConfig()
    part = heuristic_partition(G, _heuristic_cfg(cfg))
    lower = partition_weight(G, part)
    upper = min(upper_bound_subnetwork(G), lp_upper_bound(G))
    if lower > upper + 1e-6 * max(1.0, abs(upper)):
        raise InternalInconsistencyError(f"lower bound {lower} above upper bound {upper}")
    return (lower, part), max(upper, lower)


def _heuristic_cfg(cfg, salt=0):
    return HeuristicConfig(
        seed=cfg.seed + salt, start_mode=cfg.start_mode, max_rounds=cfg.heuristic_rounds
    )


def _triple_pairs(triple):
    i, j, k = sorted(triple)
    return ((i, j), (i, k), (j, k))


def propagate_logical(node, use_implied_cuts=True, pair_index=None, max_implied=200):
    """Close the node's fixings under the equivalence rules; derive cuts.

    Rules, applied to fixpoint: x_ij=0 and x_jk=1 imply x_ik=1; x_ij=0 and
    x_jk=0 imply x_ik=0 (so left-branch supernodes absorb later fixings);
    a >=2 cut on (i,j,k) combined with x_ip=0 yields the same cut on the
    triple with p substituted for i.  A variable forced both ways marks the
    node infeasible.  Returns (fixings_added, cuts_added).
    """
    parent = {}

    def find(a):
        parent.setdefault(a, a)
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    diff_pairs = []
    for (i, j), val in node.fixed_vars.items():
        if val == 0:
            union(i, j)
        else:
            find(i), find(j)  # register both endpoints before grouping
            diff_pairs.append((i, j))
    for s in node.merged_sets:
        members = sorted(s)
        for v in members[1:]:
            union(members[0], v)

    groups = {}
    for v in sorted(parent):
        groups.setdefault(find(v), []).append(v)
    diff_roots = set()
    for i, j in diff_pairs:
        ri, rj = find(i), find(j)
        if ri == rj:
            node.status = ("fathomed", "InfeasibleLp")
            return 0, 0
        diff_roots.add((min(ri, rj), max(ri, rj)))

    fixings_added = 0
    for members in groups.values():
        for a_idx in range(len(members)):
            for b_idx in range(a_idx + 1, len(members)):
                pair = (members[a_idx], members[b_idx])
                if node.fixed_vars.get(pair) == 1:
                    node.status = ("fathomed", "InfeasibleLp")
                    return fixings_added, 0
                if pair not in node.fixed_vars:
                    node.fixed_vars[pair] = 0
                    fixings_added += 1
    for ra, rb in sorted(diff_roots):
        for a in groups[ra]:
            for b in groups[rb]:
                pair = (min(a, b), max(a, b))
                if node.fixed_vars.get(pair) == 0:
                    node.status = ("fathomed", "InfeasibleLp")
                    return fixings_added, 0
                if pair not in node.fixed_vars:
                    node.fixed_vars[pair] = 1
                    fixings_added += 1

    cuts_added = 0
    if use_implied_cuts and node.ge2_triples and pair_index is not None:
        known = set(node.ge2_triples)
        queue = list(node.ge2_triples)
        new_cuts = []
        while queue and len(known) - len(node.ge2_triples) < max_implied:
            tri = queue.pop(0)
            for m in tri:
                rm = find(m) if m in parent else None
                if rm is None:
                    continue
                others = tuple(v for v in tri if v != m)
                for p in groups.get(rm, ()):
                    if p == m or p in tri:
                        continue
                    derived = tuple(sorted(others + (p,)))
                    if derived in known:
                        continue
                    known.add(derived)
                    queue.append(derived)
                    vids = [pair_index.get(pp) for pp in _triple_pairs(derived)]
                    if all(v is not None for v in vids):
                        new_cuts.append(make_ge2_cut(*vids, tag="implied2"))
        if new_cuts:
            active = {c.key for c in node.all_cuts}
            fresh = tuple(c for c in new_cuts if c.key not in active)
            node.all_cuts = node.all_cuts + fresh
            node.local_cuts = node.local_cuts + fresh
            cuts_added = len(fresh)
        node.ge2_triples = tuple(sorted(known))
    return fixings_added, cuts_added


def fix_by_reduced_cost(node, lp, incumbent, model):
    """Fix nonbasic variables whose reduced cost proves them immovable.

    With LP value z and incumbent LB: a variable at its lower bound with
    reduced cost c can only reach z + c when raised to 1, so it is fixed to
    0 once z + c clears below LB; symmetrically at the upper bound it is
    fixed to 1 once z - c clears below LB.
    """
    if not lp.optimal:
        return 0
    z = lp.objective
    x = lp.primal
    rc = lp.reduced_costs
    lo, hi = model.effective_bounds()
    movable = hi - lo > 1e-12
    at_lo = movable & (x <= lo + FEAS_TOL) & (rc <= OPT_TOL)
    at_hi = movable & (x >= hi - FEAS_TOL) & (rc >= -OPT_TOL)
    fix0 = at_lo & (z + rc <= incumbent - FIX_SLACK)
    fix1 = at_hi & (z - rc <= incumbent - FIX_SLACK)
    added = 0
    for v in np.flatnonzero(fix0 | fix1):
        pair = (int(model.pairs[v, 0]), int(model.pairs[v, 1]))
        val = 0 if fix0[v] else 1
        if pair not in node.fixed_vars:
            node.fixed_vars[pair] = val
            added += 1
    return added


def select_triple(node, candidates, stratification, rng, graph=None, degrees=None):
    """Pick the branching triple by stratified roulette-wheel selection.

    Only the richest available stratum is considered: all-positive triples
    first, then two-positive, then one-positive.  Node scores combine the
    count of incident fixed variables f, membership in ancestor branching
    triples, and relative degree: s = 1 - exp(-f) + beta + |d|/(n-1).
    """
    if not candidates:
        raise InvalidBranchError("no branching candidates")
    strata = (set(stratification.t3), set(stratification.t2), set(stratification.t1))
    chosen = None
    for stratum in strata:
        level = sorted(t for t in candidates if t in stratum)
        if level:
            chosen = level
            break
    if chosen is None:
        chosen = sorted(candidates)
    if len(chosen) == 1:
        return chosen[0]

    if degrees is None:
        degrees = [graph.degree(v) for v in range(graph.n)]
    n = len(degrees)
    f_count = {}
    for (i, j) in node.fixed_vars:
        f_count[i] = f_count.get(i, 0) + 1
        f_count[j] = f_count.get(j, 0) + 1
    in_history = set()
    for tri, _ in node.branch_history:
        in_history.update(tri)

    def node_score(v):
        f = f_count.get(v, 0)
        beta = 1.0 if v in in_history else 0.0
        rel = abs(degrees[v]) / (n - 1) if n > 1 else 0.0
        return 1.0 - np.exp(-f) + beta + rel

    scores = np.array([sum(node_score(v) for v in tri) for tri in chosen])
    total = scores.sum()
    if total <= 0:
        return chosen[int(rng.integers(0, len(chosen)))]
    pick = rng.random() * total
    acc = 0.0
    for tri, s in zip(chosen, scores):
        acc += s
        if pick < acc:
            return tri
    return chosen[-1]


def _coalesce(sets):
    """Union overlapping frozensets (disjoint-set semantics), sorted."""
    out = []
    for s in sets:
        merged = set(s)
        keep = []
        for t in out:
            if merged & t:
                merged |= t
            else:
                keep.append(t)
        keep.append(frozenset(merged))
        out = keep
    return tuple(sorted(out, key=min))


def branch(node, triple, pair_index=None, use_propagation=True, use_implied_cuts=True):
    """Create the (left, right) children for a violated triple.

    Left: all three pairs fixed to 0 and the triple merged for the
    supernode heuristic.  Right: the >=2 cut added.  Both children inherit
    fixings and cuts and are propagated immediately.
    """
    triple = tuple(sorted(triple))
    pairs = _triple_pairs(triple)
    if all(p in node.fixed_vars for p in pairs):
        raise InvalidBranchError(f"triple {triple} already decided by fixings")

    left = SearchNode(
        depth=node.depth + 1,
        node_id=node.node_id * 2 + 1,
        branch_history=node.branch_history + ((triple, "left"),),
        fixed_vars=dict(node.fixed_vars),
        local_cuts=node.local_cuts,
        merged_sets=_coalesce(node.merged_sets + (frozenset(triple),)),
        ge2_triples=node.ge2_triples,
        all_cuts=node.all_cuts,
        parent_bound=node.lp_bound if node.lp_bound is not None else node.parent_bound,
        basis=node.basis,
    )
    for p in pairs:
        if left.fixed_vars.get(p) == 1:
            left.status = ("fathomed", "InfeasibleLp")
        left.fixed_vars[p] = 0

    right = SearchNode(
        depth=node.depth + 1,
        node_id=node.node_id * 2 + 2,
        branch_history=node.branch_history + ((triple, "right"),),
        fixed_vars=dict(node.fixed_vars),
        local_cuts=node.local_cuts,
        merged_sets=node.merged_sets,
        ge2_triples=tuple(sorted(set(node.ge2_triples) | {triple})),
        all_cuts=node.all_cuts,
        parent_bound=node.lp_bound if node.lp_bound is not None else node.parent_bound,
        basis=node.basis,
    )
    if pair_index is not None:
        vids = [pair_index.get(p) for p in pairs]
        if all(v is not None for v in vids):
            cut = make_ge2_cut(*vids, tag="branch2")
            if cut.key not in {c.key for c in right.all_cuts}:
                right.all_cuts = right.all_cuts + (cut,)
                right.local_cuts = right.local_cuts + (cut,)

    if use_propagation:
        for child in (left, right):
            if not child.fathomed:
                propagate_logical(
                    child, use_implied_cuts=use_implied_cuts, pair_index=pair_index
                )
    return left, right


class _IncumbentCell:
    """Thread-safe monotone max of (value, partition)."""

    def __init__(self, value, partition):
        self.value = value
        self.partition = partition
        self._lock = Lock()

    def offer(self, value, partition):
        with self._lock:
            if value > self.value:
                self.value = value
                self.partition = partition
                return True
            return False


class _ComponentContext:
    def __init__(self, graph, cfg, comp_idx, stats, deadline):
        self.graph = graph
        self.cfg = cfg
        self.comp_idx = comp_idx
        self.stats = stats
        self.deadline = deadline
        self.model = build_model(graph)
        self.triples = self.model.triple_sets()
        self.degrees = [graph.degree(v) for v in range(graph.n)]
        self.delta = cfg.delta if cfg.delta is not None else median_delta(graph)

    def rng_for(self, node_id):
        return np.random.default_rng((self.cfg.seed, self.comp_idx, node_id))

    def out_of_time(self):
        return self.deadline is not None and time.monotonic() > self.deadline


def _node_heuristic(ctx, node):
    side = node.side()
    hcfg = _heuristic_cfg(ctx.cfg, salt=node.depth)
    if side == "left" and node.merged_sets:
        part = heuristic_left_branch(ctx.graph, node.merged_sets, hcfg)
    elif side == "right" and len(node.last_triple()) == 3:
        part = heuristic_right_branch(ctx.graph, node.last_triple(), ctx.delta, hcfg)
    else:
        part = heuristic_partition(ctx.graph, hcfg)
    return part, partition_weight(ctx.graph, part)


def _evaluate_node(ctx, node, incumbent):
    """LP fixpoint, fathom checks, heuristic, fixing, and branching."""
    cfg = ctx.cfg
    ctx.stats.nodes_explored += 1
    if node.fathomed:
        return []
    model = ctx.model.child()
    model.cuts = node.all_cuts
    skipped = False
    for (i, j), val in node.fixed_vars.items():
        v = model.pair_index.get((i, j))
        if v is None:
            skipped = True  # pair outside variable scope; bound stays valid
            continue
        model.fix(v, val)
    del skipped
    sol = solve_to_separation_fixpoint(
        model,
        backend=SimplexBackend(),
        warm_start=node.basis,
        rounds=cfg.sep_rounds,
        cuts_per_round=cfg.sep_cuts_per_round,
        max_rows=cfg.max_active_cuts,
        stats=ctx.stats,
    )
    node.all_cuts = model.cuts
    if sol.status == "infeasible":
        node.status = ("fathomed", "InfeasibleLp")
        return []
    if sol.status == "iteration_limit":
        node.lp_bound = node.parent_bound
        x = None
    else:
        node.lp_bound = min(sol.objective, node.parent_bound)
        node.basis = sol.basis
        x = sol.primal

    if x is not None:
        frac = np.abs(x - np.round(x))
        if frac.max() <= INT_TOL:
            part = pp_postprocess(ctx.graph, np.round(x), pair_index=ctx.model.pair_index)
            incumbent.offer(partition_weight(ctx.graph, part), part)
            node.status = ("fathomed", "IntegralLp")
            return []

    if node.heuristic_value is None:  # root's heuristic is computed up front
        part, value = _node_heuristic(ctx, node)
        node.heuristic_partition = part
        node.heuristic_value = value
        incumbent.offer(value, part)

    if node.lp_bound < incumbent.value + FATHOM_SLACK:
        node.status = ("fathomed", "BoundDominated")
        return []

    if cfg.use_reduced_cost_fixing and x is not None:
        ctx.stats.vars_fixed += fix_by_reduced_cost(node, sol, incumbent.value, model)
    if cfg.use_logical_propagation:
        fixed, cuts = propagate_logical(
            node,
            use_implied_cuts=cfg.use_implied_cuts,
            pair_index=ctx.model.pair_index,
        )
        ctx.stats.vars_fixed += fixed
        ctx.stats.cuts_added += cuts
        if node.fathomed:
            return []

    if x is None:
        # LP did not finish; branch on the first undecided pool triple
        return _branch_fallback(ctx, node, None)
    cand_idx = violated_branch_triples(ctx.model, x)
    history = {tri for tri, _ in node.branch_history}
    candidates = [
        tuple(map(int, ctx.model.tri_nodes[t]))
        for t in cand_idx
        if tuple(map(int, ctx.model.tri_nodes[t])) not in history
    ]
    if not candidates:
        return _branch_fallback(ctx, node, x)
    triple = select_triple(
        node, candidates, ctx.triples, ctx.rng_for(node.node_id), degrees=ctx.degrees
    )
    left, right = branch(
        node,
        triple,
        pair_index=ctx.model.pair_index,
        use_propagation=cfg.use_logical_propagation,
        use_implied_cuts=cfg.use_implied_cuts,
    )
    return [left, right]


def _branch_fallback(ctx, node, x):
    """Dichotomy on a single fractional variable; a defensive path only.

    Taken when no pool triple violates both branching constraints at a
    fractional vertex (not observed in practice).  The children fix the most
    fractional pair to 0 and 1, which keeps the search exhaustive.
    """
    if x is None:
        pool = [
            tuple(map(int, tri))
            for tri in ctx.model.tri_nodes.tolist()
            if not all(tuple(p) in node.fixed_vars for p in _triple_pairs(tri))
        ]
        if not pool:
            node.status = ("fathomed", "BoundDominated")
            return []
        left, right = branch(
            node,
            pool[0],
            pair_index=ctx.model.pair_index,
            use_propagation=ctx.cfg.use_logical_propagation,
            use_implied_cuts=ctx.cfg.use_implied_cuts,
        )
        return [left, right]
    frac = np.abs(np.asarray(x) - np.round(np.asarray(x)))
    order = np.argsort(-frac)
    for v in order:
        if frac[v] <= INT_TOL:
            break
        pair = (int(ctx.model.pairs[v, 0]), int(ctx.model.pairs[v, 1]))
        if pair in node.fixed_vars:
            continue
        left = SearchNode(
            depth=node.depth + 1,
            node_id=node.node_id * 2 + 1,
            branch_history=node.branch_history + ((pair, "left"),),
            fixed_vars={**node.fixed_vars, pair: 0},
            local_cuts=node.local_cuts,
            merged_sets=_coalesce(node.merged_sets + (frozenset(pair),)),
            ge2_triples=node.ge2_triples,
            all_cuts=node.all_cuts,
            parent_bound=node.lp_bound,
            basis=node.basis,
        )
        right = SearchNode(
            depth=node.depth + 1,
            node_id=node.node_id * 2 + 2,
            branch_history=node.branch_history + ((pair, "right"),),
            fixed_vars={**node.fixed_vars, pair: 1},
            local_cuts=node.local_cuts,
            merged_sets=node.merged_sets,
            ge2_triples=node.ge2_triples,
            all_cuts=node.all_cuts,
            parent_bound=node.lp_bound,
            basis=node.basis,
        )
        if ctx.cfg.use_logical_propagation:
            for child in (left, right):
                propagate_logical(
                    child,
                    use_implied_cuts=ctx.cfg.use_implied_cuts,
                    pair_index=ctx.model.pair_index,
                )
        return [left, right]
    node.status = ("fathomed", "IntegralLp")
    return []


def _solve_component(Gc, cfg, comp_idx, stats, deadline, gap_tolerance):
    """Solve one connected component; returns (value, partition, bound, status, trace)."""
    if cfg.use_pendant_reduction:
        G, rlog = reduce_pendants(Gc)
    else:
        G, rlog = Gc, ReductionLog(original_n=Gc.n, steps=[], id_map=list(range(Gc.n)))

    trace = []

    def finish(value, partition, bound, status):
        lifted = lift_partition(rlog, partition)
        return value, lifted, bound, status, tuple(trace)

    loops_only = all(i == j for i, j, _ in G.edges())
    if G.n == 1 or loops_only:
        part = Partition.singletons(G.n)
        value = partition_weight(G, part)
        trace.append((0, value, value))
        return finish(value, part, value, GAP_REACHED)

    ctx = _ComponentContext(G, cfg, comp_idx, stats, deadline)
    part = heuristic_partition(G, _heuristic_cfg(cfg))
    incumbent = _IncumbentCell(partition_weight(G, part), part)
    comb_ub = upper_bound_subnetwork(G)

    root = SearchNode(depth=0, node_id=0, parent_bound=comb_ub)
    root.heuristic_partition = incumbent.partition
    root.heuristic_value = incumbent.value
    bound = comb_ub
    gap = compute_gap(max(bound, incumbent.value), incumbent.value)
    if gap <= gap_tolerance:
        trace.append((0, incumbent.value, max(bound, incumbent.value)))
        return finish(incumbent.value, incumbent.partition, max(bound, incumbent.value), GAP_REACHED)

    children = _evaluate_node(ctx, root, incumbent)
    if root.fathomed:
        bound = incumbent.value
    else:
        bound = _tighten_bound(bound, root.lp_bound, incumbent.value)
    trace.append((0, incumbent.value, bound))
    gap = compute_gap(bound, incumbent.value)
    if gap <= gap_tolerance:
        return finish(incumbent.value, incumbent.partition, bound, GAP_REACHED)
    if not children:
        return finish(incumbent.value, incumbent.partition, bound, EXHAUSTED)

    frontier = children
    depth = 1
    while frontier:
        if ctx.out_of_time():
            return finish(incumbent.value, incumbent.partition, bound, TIME_LIMIT)
        if cfg.workers > 1 and len(frontier) > 1:
            with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
                child_lists = list(
                    pool.map(lambda nd: _evaluate_node(ctx, nd, incumbent), frontier)
                )
        else:
            child_lists = []
            for nd in frontier:
                child_lists.append(_evaluate_node(ctx, nd, incumbent))
                if ctx.out_of_time():
                    # graceful stop: remaining siblings keep the frontier bound
                    return finish(incumbent.value, incumbent.partition, bound, TIME_LIMIT)
        next_frontier = []
        level_bounds = [incumbent.value]
        for nd, kids in zip(frontier, child_lists):
            if nd.fathomed:
                continue
            level_bounds.append(nd.lp_bound)
            next_frontier.extend(k for k in kids if not k.fathomed)
        bound = _tighten_bound(bound, max(level_bounds), incumbent.value)
        trace.append((depth, incumbent.value, bound))
        gap = compute_gap(bound, incumbent.value)
        if gap <= gap_tolerance:
            return finish(incumbent.value, incumbent.partition, bound, GAP_REACHED)
        frontier = next_frontier
        depth += 1

    bound = incumbent.value
    trace.append((depth, incumbent.value, bound))
    return finish(incumbent.value, incumbent.partition, bound, EXHAUSTED)


def solve(G, cfg=None):
    """Solve the clique partitioning problem on G to the configured gap."""
    cfg = cfg or SolveConfig()
    start = time.perf_counter()
    deadline = time.monotonic() + cfg.time_limit if cfg.time_limit is not None else None
    stats = SolveStats()

    components = decompose_components(G)
    tolerances = [cfg.gap_tolerance] * len(components)
    results = [None] * len(components)
    for attempt in range(20):
        for ci, (Gc, id_map) in enumerate(components):
            if results[ci] is not None and attempt > 0:
                value, part, bound, status, trace = results[ci]
                if status != GAP_REACHED or compute_gap(bound, value) <= tolerances[ci]:
                    continue
            results[ci] = _solve_component(
                Gc, cfg, ci, stats, deadline, tolerances[ci]
            )
        inc_total = sum(r[0] for r in results)
        bound_total = sum(r[2] for r in results)
        statuses = [r[3] for r in results]
        gap = compute_gap(max(bound_total, inc_total), inc_total)
        if TIME_LIMIT in statuses or gap <= cfg.gap_tolerance or all(
            s == EXHAUSTED for s in statuses
        ):
            break
        # degenerate corner: negative component bounds can inflate the
        # aggregate gap; retighten the slackest component and re-solve
        worst = max(range(len(results)), key=lambda i: results[i][2] - results[i][0])
        tolerances[worst] /= 4.0
        results[worst] = None
        results[worst] = _solve_component(
            components[worst][0], cfg, worst, stats, deadline, tolerances[worst]
        )

    # stitch per-component partitions back onto the original node ids
    assign = np.zeros(G.n, dtype=np.int64)
    offset = 0
    for (Gc, id_map), (value, part, bound, status, trace) in zip(components, results):
        for local, original in enumerate(id_map):
            assign[original] = part.assignment[local] + offset
        offset += part.k
    best = Partition(assign)

    inc_total = sum(r[0] for r in results)
    bound_total = max(sum(r[2] for r in results), inc_total)
    statuses = [r[3] for r in results]
    if TIME_LIMIT in statuses:
        status = TIME_LIMIT
    elif all(s == EXHAUSTED for s in statuses):
        status = EXHAUSTED
    else:
        status = GAP_REACHED

    check = partition_weight(G, best)
    if abs(check - inc_total) > 1e-6 * max(1.0, abs(check)):
        raise InternalInconsistencyError(
            f"stitched partition weight {check} != summed incumbents {inc_total}"
        )
    stats.wall_time = time.perf_counter() - start
    return SolveReport(
        best_partition=best,
        incumbent=check,
        best_bound=bound_total,
        gap=compute_gap(bound_total, inc_total),
        status=status,
        stats=stats,
        trace=tuple(r[4] for r in results),
    )


def heuristic_solve(G, cfg=None):
    """Reduction pipeline plus the primal heuristic only (no search)."""
    cfg = cfg or SolveConfig()
    components = decompose_components(G)
    assign = np.zeros(G.n, dtype=np.int64)
    offset = 0
    for ci, (Gc, id_map) in enumerate(components):
        if cfg.use_pendant_reduction:
            Gr, rlog = reduce_pendants(Gc)
        else:
            Gr, rlog = Gc, ReductionLog(original_n=Gc.n, steps=[], id_map=list(range(Gc.n)))
        part = lift_partition(rlog, heuristic_partition(Gr, _heuristic_cfg(cfg)))
        for local, original in enumerate(id_map):
            assign[original] = part.assignment[local] + offset
        offset += part.k
    best = Partition(assign)
    return best, partition_weight(G, best)
