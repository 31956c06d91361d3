"""LP/IP model for clique partitioning with redundant triples removed.

Variables x_ij in [0,1] exist for every edge pair and every pair covered by a
relevant triple; x_ij = 0 means "same cluster".  The objective is
``const + sum(coeff * x)`` with const = total edge weight (self-loops
included) and coeff = -w_ij, so it reproduces the partition weight for
integral transitive x.

A triple is *relevant* iff at least one of its three pair weights is
strictly positive; for each relevant triple only the transitivity
orientations whose left-hand pairs include a positive weight are kept.
Constraints are never materialized up front: `separate_violations` finds the
most violated ones on demand.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._tolerances import VIOL_TOL
from .errors import InputError
from .graph import Partition

# orientation o has RHS pair o and LHS the other two:
#   o=0:  x_ik + x_jk >= x_ij   kept iff w_ik > 0 or w_jk > 0
#   o=1:  x_ij + x_jk >= x_ik   kept iff w_ij > 0 or w_jk > 0
#   o=2:  x_ij + x_ik >= x_jk   kept iff w_ij > 0 or w_ik > 0
_RHS = (0, 1, 2)
_LHS = ((1, 2), (0, 2), (0, 1))


class Cut(NamedTuple):
    """One linear inequality  sum(coefs * x[vars]) >= rhs."""

    vars: tuple
    coefs: tuple
    rhs: float
    tag: str  # "tri" separation cut, "branch2" right-branch cut, "implied2"

    @property
    def key(self):
        return (self.tag if self.tag == "tri" else "ge2", self.vars, self.coefs)


@dataclass
class TripleSets:
    """Relevant triples stratified by their count of strictly positive pairs."""

    t3: list
    t2: list
    t1: list


class CpModel:
    """Objective, variable bounds, triple pool, and active cuts for one graph."""

    def __init__(self, graph, pairs, obj, const, tri_nodes, tri_vars, tri_keep, tri_pos):
        self.graph = graph
        self.n = graph.n
        self.pairs = pairs  # (nv, 2) int64, i < j
        self.pair_index = {(int(i), int(j)): v for v, (i, j) in enumerate(pairs)}
        self.obj = obj
        self.const = const
        self.tri_nodes = tri_nodes  # (nt, 3) node ids i < j < k
        self.tri_vars = tri_vars  # (nt, 3) var ids for pairs (ij, ik, jk)
        self.tri_keep = tri_keep  # (nt, 3) orientation retained
        self.tri_pos = tri_pos  # (nt,) count of strictly positive pairs
        self.lo = np.zeros(len(pairs))
        self.hi = np.ones(len(pairs))
        self.fixings = {}
        self.cuts = ()

    @property
    def num_vars(self):
        return len(self.pairs)

    @property
    def num_triples(self):
        return len(self.tri_nodes)

    def child(self):
        """Shallow copy sharing the immutable pool; own bounds/fixings/cuts."""
        clone = CpModel.__new__(CpModel)
        clone.__dict__.update(self.__dict__)
        clone.lo = self.lo.copy()
        clone.hi = self.hi.copy()
        clone.fixings = dict(self.fixings)
        clone.cuts = self.cuts
        return clone

    def fix(self, var, value):
        """Fix a variable to 0 or 1 (folded into its bounds)."""
        prior = self.fixings.get(var)
        if prior is not None and prior != value:
            raise InputError(f"variable {var} fixed to both 0 and 1")
        self.fixings[var] = value
        self.lo[var] = value
        self.hi[var] = value

    def triple_sets(self):
        strata = {3: [], 2: [], 1: []}
        for (i, j, k), p in zip(self.tri_nodes.tolist(), self.tri_pos.tolist()):
            strata[p].append((i, j, k))
        return TripleSets(strata[3], strata[2], strata[1])

    def effective_bounds(self):
        return self.lo, self.hi


def build_model(G):
    """Assemble the model for a (typically connected) graph."""
    edge_pairs = [(i, j) for i, j, _ in G.edges() if i != j]
    n = G.n

    # relevant triples: at least one strictly positive pair -> enumerate
    # third nodes over positive edges, then deduplicate
    pos_pairs = [(i, j) for i, j, w in G.edges() if i != j and w > 0]
    tri_set = set()
    for i, j in pos_pairs:
        for k in range(n):
            if k != i and k != j:
                tri_set.add(tuple(sorted((i, j, k))))
    tri_list = sorted(tri_set)

    pair_set = set(edge_pairs)
    for i, j, k in tri_list:
        pair_set.update(((i, j), (i, k), (j, k)))
    pair_list = sorted(pair_set)
    pair_pos = {p: v for v, p in enumerate(pair_list)}

    obj = np.zeros(len(pair_list))
    const = G.loop_sum()
    for i, j, w in G.edges():
        if i != j:
            const += w
            obj[pair_pos[(i, j)]] = -w

    nt = len(tri_list)
    tri_nodes = np.array(tri_list, dtype=np.int64).reshape(nt, 3)
    tri_vars = np.empty((nt, 3), dtype=np.int64)
    tri_keep = np.empty((nt, 3), dtype=bool)
    tri_pos_count = np.empty(nt, dtype=np.int8)
    for t, (i, j, k) in enumerate(tri_list):
        wij, wik, wjk = G.weight(i, j), G.weight(i, k), G.weight(j, k)
        tri_vars[t] = (pair_pos[(i, j)], pair_pos[(i, k)], pair_pos[(j, k)])
        positive = (wij > 0, wik > 0, wjk > 0)
        for o, (a, b) in enumerate(_LHS):
            tri_keep[t, o] = positive[a] or positive[b]
        tri_pos_count[t] = sum(positive)
    if nt and not tri_pos_count.all():
        raise InputError("triple with no positive pair slipped into the pool")

    pairs_arr = np.array(pair_list, dtype=np.int64).reshape(len(pair_list), 2)
    return CpModel(G, pairs_arr, obj, const, tri_nodes, tri_vars, tri_keep, tri_pos_count)


def classic_constraint_count(n):
    """Constraint count 3*C(n,3) of the unreduced transitivity system."""
    if n < 3:
        return 0
    return 3 * (n * (n - 1) * (n - 2) // 6)


def triple_in_pool(wij, wik, wjk):
    """Pool membership from the three pair weights (non-edges weigh 0)."""
    return wij > 0 or wik > 0 or wjk > 0


def make_tri_cut(model, t, o):
    """Transitivity cut for triple index t, orientation o (RHS pair o)."""
    rhs_var = int(model.tri_vars[t, o])
    a, b = _LHS[o]
    return Cut(
        vars=(int(model.tri_vars[t, a]), int(model.tri_vars[t, b]), rhs_var),
        coefs=(1.0, 1.0, -1.0),
        rhs=0.0,
        tag="tri",
    )


def make_ge2_cut(v1, v2, v3, tag="branch2"):
    """Right-branch style cut x1 + x2 + x3 >= 2."""
    vs = tuple(sorted((int(v1), int(v2), int(v3))))
    return Cut(vars=vs, coefs=(1.0, 1.0, 1.0), rhs=2.0, tag=tag)


def separate_violations(model, x, cap):
    """Up to `cap` most violated transitivity cuts at the point x.

    Violation of orientation o is x[rhs] - x[lhs1] - x[lhs2]; cuts with
    violation above the tolerance are returned sorted by violation
    descending, ties broken by lexicographic (i, j, k, orientation).
    """
    if model.num_triples == 0 or cap <= 0:
        return []
    xv = np.asarray(x)
    vals = xv[model.tri_vars]  # (nt, 3) values for pairs (ij, ik, jk)
    total = vals.sum(axis=1)
    found = []
    for o in range(3):
        viol = 2.0 * vals[:, o] - total  # x_rhs - (x_lhs1 + x_lhs2)
        mask = model.tri_keep[:, o] & (viol > VIOL_TOL)
        for t in np.flatnonzero(mask):
            found.append((-viol[t], int(model.tri_nodes[t, 0]), int(model.tri_nodes[t, 1]),
                          int(model.tri_nodes[t, 2]), o, int(t)))
    found.sort()
    return [make_tri_cut(model, t, o) for _, _, _, _, o, t in found[:cap]]


def violated_branch_triples(model, x):
    """Indices of pool triples with 0 < x_ij + x_ik + x_jk < 2 (strict)."""
    if model.num_triples == 0:
        return np.empty(0, dtype=np.int64)
    total = np.asarray(x)[model.tri_vars].sum(axis=1)
    return np.flatnonzero((total > VIOL_TOL) & (total < 2.0 - VIOL_TOL))


def pp_postprocess(G, x, pair_index=None):
    """Repair an integral model solution into a valid partition.

    Clusters are the connected components over the positive-weight pairs
    priced "same" (x = 0).  `x` is either a mapping {(i, j): value} or a
    vector indexed by `pair_index`.  In any solution feasible for the
    reduced constraint pool, two nodes joined by a positive zero-weight path
    have their own pair priced zero as well (the retained orientations force
    it transitively), so merging never loses weight; a zero-priced pair of
    nonpositive weight that ends up split only adds weight.  Hence the
    partition weight is at least the model objective of x.
    """
    parent = list(range(G.n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    if pair_index is None:
        items = x.items()
    else:
        xv = np.asarray(x)
        items = (((i, j), xv[v]) for (i, j), v in pair_index.items())
    for (i, j), val in items:
        if val < 0.5 and G.weight(i, j) > 0:
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[ri] = rj
    return Partition([find(v) for v in range(G.n)])


def dump_lp(model, fh):
    """Write the active model in LP interchange format (for cross-checks)."""
    names = [f"x_{i}_{j}" for i, j in model.pairs.tolist()]
    fh.write("Maximize\n obj:")
    terms = [f" {c:+g} {names[v]}" for v, c in enumerate(model.obj) if c != 0]
    fh.write("".join(terms) or " 0 " + names[0])
    fh.write(f"\n\\ constant offset {model.const!r}\nSubject To\n")
    for idx, cut in enumerate(model.cuts):
        lhs = " ".join(f"{c:+g} {names[v]}" for v, c in zip(cut.vars, cut.coefs))
        fh.write(f" c{idx}: {lhs} >= {cut.rhs:g}\n")
    fh.write("Bounds\n")
    for v, name in enumerate(names):
        fh.write(f" {model.lo[v]:g} <= {name} <= {model.hi[v]:g}\n")
    fh.write("End\n")
