"""Constructors turning other problems and raw data into solver instances.

Covers the modularity-maximization conversion, attribute-agreement graphs,
Fisher-screened correlation networks, and three synthetic benchmark
generators.  All constructors are pure and seeded generators are
deterministic.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .graph import WeightedGraph

Z_CAP = np.arctanh(1.0 - 1e-12)  # stand-in for |r| = 1 in the Fisher screen


@dataclass(frozen=True)
class AttributeMatrix:
    """Objects x categorical attributes, with None marking missing cells."""

    rows: tuple  # tuple of tuples of str | None

    def __post_init__(self):
        if len(self.rows) < 2:
            raise InputError("attribute matrix needs at least 2 objects")
        q = len(self.rows[0])
        if q < 1 or any(len(r) != q for r in self.rows):
            raise InputError("attribute rows must share at least one column")

    @property
    def z(self):
        return len(self.rows)

    @property
    def q(self):
        return len(self.rows[0])


@dataclass(frozen=True)
class ReturnsMatrix:
    """Time periods x assets; column ids must be unique."""

    periods: tuple
    assets: tuple
    values: np.ndarray  # (T, A)

    def __post_init__(self):
        if len(self.assets) != len(set(self.assets)):
            raise InputError("asset ids must be unique")
        if self.values.shape != (len(self.periods), len(self.assets)):
            raise InputError("returns matrix shape does not match its labels")
        if len(self.periods) < 3:
            raise InputError("correlation screening needs at least 3 periods")


def read_attribute_csv(path, missing_tokens=("", "?")):
    rows = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row:
                continue
            rows.append(tuple(None if c.strip() in missing_tokens else c.strip() for c in row))
    return AttributeMatrix(tuple(rows))


def read_returns_csv(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or len(header) < 2:
            raise InputError("returns CSV needs a header with asset columns")
        assets = tuple(c.strip() for c in header[1:])
        periods = []
        data = []
        for row in reader:
            if not row:
                continue
            periods.append(row[0].strip())
            try:
                data.append([float(c) for c in row[1:]])
            except ValueError as exc:
                raise InputError(f"bad return value in row {row[0]!r}: {exc}") from None
    return ReturnsMatrix(tuple(periods), assets, np.array(data, dtype=float))


# -- modularity ---------------------------------------------------------------


def _modularity_matrix(G, gamma):
    """Dense matrix b_ij = a_ij - gamma d_i d_j / total, loops counted twice.

    The diagonal carries 2x the self-loop weight so that the ordered double
    sum over all node pairs equals twice the edge weight plus twice the loop
    weight, and degrees are the matrix row sums.
    """
    A = np.zeros((G.n, G.n))
    for i, j, w in G.edges():
        if w < 0:
            raise InputError("modularity needs nonnegative edge weights")
        if i == j:
            A[i, i] = 2.0 * w
        else:
            A[i, j] = w
            A[j, i] = w
    total = A.sum()
    if total <= 0:
        raise InputError("modularity needs positive total weight")
    d = A.sum(axis=1)
    return A - gamma * np.outer(d, d) / total, total


def modularity(G, P, gamma=1.0):
    """Modularity of a partition: sum of within-cluster b_ij over total weight."""
    if len(P) != G.n:
        raise InputError(f"partition covers {len(P)} nodes, graph has {G.n}")
    B, total = _modularity_matrix(G, gamma)
    same = P.assignment[:, None] == P.assignment[None, :]
    return float(B[same].sum() / total)


def modularity_to_cp(G, gamma=1.0):
    """Graph whose partition weight equals modularity times total weight.

    Off-diagonal entries are emitted once per unordered pair with weight
    2*b_ij (the ordered double sum counts them twice); diagonals become
    self-loops.  Maximizing the partition weight of the result maximizes
    modularity of the input.
    """
    B, _ = _modularity_matrix(G, gamma)
    edges = []
    for i in range(G.n):
        if B[i, i] != 0:
            edges.append((i, i, B[i, i]))
        for j in range(i + 1, G.n):
            if B[i, j] != 0:
                edges.append((i, j, 2.0 * B[i, j]))
    return WeightedGraph(G.n, edges)


# -- attribute agreement -------------------------------------------------------


def abr_to_cp(A):
    """Agreement graph: w_ij = 2 * (attributes equal for i and j) - q.

    Zero-weight pairs (agreement on exactly half the attributes) are
    omitted.  Missing cells are not supported and raise.
    """
    for r, row in enumerate(A.rows):
        if any(c is None for c in row):
            raise InputError(f"object {r} has missing attribute values (unsupported)")
    q = A.q
    edges = []
    for i in range(A.z):
        for j in range(i + 1, A.z):
            agree = sum(1 for a, b in zip(A.rows[i], A.rows[j]) if a == b)
            w = 2 * agree - q
            if w != 0:
                edges.append((i, j, float(w)))
    return WeightedGraph(A.z, edges)


# -- correlation screening -----------------------------------------------------


def fisher_transform(r):
    """z = 0.5 * ln((1+r)/(1-r)); |r| = 1 maps to the capped value +-Z_CAP."""
    arr = np.atleast_1d(np.asarray(r, dtype=float))
    out = np.empty_like(arr)
    extreme = np.abs(arr) >= 1.0
    out[extreme] = np.sign(arr[extreme]) * Z_CAP
    safe = ~extreme
    out[safe] = 0.5 * np.log((1.0 + arr[safe]) / (1.0 - arr[safe]))
    return float(out[0]) if np.isscalar(r) or np.asarray(r).ndim == 0 else out


def fisher_portfolio_graph(R):
    """Correlation network keeping pairs whose Fisher z is 2 sigma from the mean.

    Pearson correlations are computed for every asset pair; the transformed
    values' mean and (population) standard deviation define the screen, the
    kept edge weight is the raw correlation, and assets left isolated are
    dropped (the returned graph's labels map new ids to asset ids).
    """
    X = R.values
    std = X.std(axis=0)
    dead = np.flatnonzero(std == 0)
    if dead.size:
        raise InputError(f"zero-variance asset columns: {[R.assets[i] for i in dead]}")
    corr = np.corrcoef(X.T)
    n = len(R.assets)
    iu, ju = np.triu_indices(n, k=1)
    r = np.clip(corr[iu, ju], -1.0, 1.0)
    z = fisher_transform(r)
    mu, sigma = float(z.mean()), float(z.std())
    keep = np.abs(z - mu) > 2.0 * sigma
    touched = sorted(set(iu[keep].tolist()) | set(ju[keep].tolist()))
    back = {old: new for new, old in enumerate(touched)}
    edges = [
        (back[i], back[j], float(w))
        for i, j, w in zip(iu[keep], ju[keep], r[keep])
        if w != 0
    ]
    labels = [R.assets[i] for i in touched]
    if not touched:
        raise InputError("no pair passed the 2-sigma screen; graph would be empty")
    return WeightedGraph(len(touched), edges, labels=labels)


# -- synthetic generators ------------------------------------------------------


def _draw_nonzero_weight(rng, w_lo, w_hi):
    while True:
        w = int(rng.integers(w_lo, w_hi + 1))
        if w != 0:
            return float(w)


def gen_ba_weighted(n_range=(100, 150), attach_range=(3, 6), weight_range=(-10, 10), seed=0):
    """Preferential-attachment graph with uniform integer signed weights.

    Node count and attachment count are drawn uniformly from their ranges;
    growth starts from a clique on `attach` nodes so the result is connected.
    Edge weights are uniform over the range with 0 excluded.
    """
    rng = np.random.default_rng(seed)
    n = int(rng.integers(n_range[0], n_range[1] + 1))
    attach = int(rng.integers(attach_range[0], attach_range[1] + 1))
    attach = min(attach, n - 1) if n > 1 else 1
    w_lo, w_hi = weight_range

    edges = {}
    deg = np.zeros(n)
    for i in range(attach):
        for j in range(i + 1, attach):
            edges[(i, j)] = _draw_nonzero_weight(rng, w_lo, w_hi)
            deg[i] += 1
            deg[j] += 1
    for v in range(attach, n):
        existing = np.arange(v)
        targets = set()
        while len(targets) < min(attach, v):
            probs = deg[:v] + 1e-9
            probs = probs / probs.sum()
            t = int(rng.choice(existing, p=probs))
            targets.add(t)
        for t in sorted(targets):
            edges[(t, v)] = _draw_nonzero_weight(rng, w_lo, w_hi)
            deg[t] += 1
            deg[v] += 1
    return WeightedGraph(n, [(i, j, w) for (i, j), w in sorted(edges.items())])


def gen_correlation_instance(cols, rows, seed=0):
    """Complete graph weighted by column correlations of a uniform matrix."""
    if rows < 3:
        raise InputError("need at least 3 rows for meaningful correlations")
    rng = np.random.default_rng(seed)
    M = rng.random((rows, cols))
    corr = np.corrcoef(M.T)
    edges = []
    for i in range(cols):
        for j in range(i + 1, cols):
            w = float(corr[i, j])
            if w != 0:
                edges.append((i, j, w))
    return WeightedGraph(cols, edges)


def gen_clusedit_instance(n, neg_fraction, seed=0):
    """Complete +-1 graph; each edge is -1 with probability neg_fraction."""
    if not (0 < neg_fraction < 1):
        raise InputError("neg_fraction must be strictly between 0 and 1")
    rng = np.random.default_rng(seed)
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            w = -1.0 if rng.random() < neg_fraction else 1.0
            edges.append((i, j, w))
    return WeightedGraph(n, edges)
