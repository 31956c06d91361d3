"""Weighted signed graphs, node partitions, and the partition-weight objective.

A graph holds ``n`` nodes (ids ``0..n-1``) and a set of undirected edges with
nonzero real weights; ``i == j`` denotes a self-loop.  At most one edge may
exist per unordered node pair.  Graphs and partitions are immutable after
construction and safe to share across workers.
"""

from __future__ import annotations

import numpy as np

from .errors import DuplicateEdgeError, GraphFormatError, InputError


class WeightedGraph:
    """Undirected real-weighted graph with optional self-loops.

    Parameters
    ----------
    n : int
        Number of nodes (node ids are 0..n-1).
    edges : iterable of (i, j, w)
        Undirected weighted edges; i == j adds a self-loop; w must be nonzero.
    labels : sequence, optional
        Original node labels from an input file, index-aligned with node ids.
    """

    __slots__ = ("n", "_pairs", "_adj", "_loops", "labels", "remap_note", "_arrays")

    def __init__(self, n, edges, labels=None, remap_note=None):
        if n < 1:
            raise InputError(f"graph needs at least one node, got n={n}")
        self.n = int(n)
        self._pairs = {}
        self._loops = np.zeros(self.n)
        self._adj = [[] for _ in range(self.n)]
        for i, j, w in edges:
            i, j = int(i), int(j)
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise InputError(f"edge ({i},{j}) out of range for n={self.n}")
            if w == 0:
                raise InputError(f"edge ({i},{j}) has zero weight")
            a, b = (i, j) if i <= j else (j, i)
            if (a, b) in self._pairs:
                raise DuplicateEdgeError(f"duplicate edge ({a},{b})")
            w = float(w)
            self._pairs[(a, b)] = w
            if a == b:
                self._loops[a] = w
            else:
                self._adj[a].append((b, w))
                self._adj[b].append((a, w))
        for nbrs in self._adj:
            nbrs.sort()
        self.labels = tuple(labels) if labels is not None else None
        self.remap_note = remap_note
        self._arrays = None

    # -- basic queries ----------------------------------------------------

    @property
    def m(self):
        """Number of edges, self-loops included."""
        return len(self._pairs)

    def edges(self):
        """Iterate (i, j, w) with i <= j in sorted pair order."""
        for (i, j) in sorted(self._pairs):
            yield i, j, self._pairs[(i, j)]

    def weight(self, i, j):
        """Weight of the edge {i, j}, or 0.0 if absent."""
        a, b = (i, j) if i <= j else (j, i)
        return self._pairs.get((a, b), 0.0)

    def has_edge(self, i, j):
        a, b = (i, j) if i <= j else (j, i)
        return (a, b) in self._pairs

    def neighbors(self, i):
        """Non-loop neighbors of i as (j, w) pairs, sorted by j."""
        return self._adj[i]

    def loop(self, i):
        return float(self._loops[i])

    def loop_sum(self):
        return float(self._loops.sum())

    def degree(self, i):
        """d_i: sum of incident edge weights, the self-loop counted once."""
        if not (0 <= i < self.n):
            raise InputError(f"node id {i} out of range for n={self.n}")
        return float(sum(w for _, w in self._adj[i]) + self._loops[i])

    def positive_sum(self):
        """Sum of positive non-loop edge weights."""
        return float(sum(w for (i, j), w in self._pairs.items() if i != j and w > 0))

    def nonloop_sum(self):
        return float(sum(w for (i, j), w in self._pairs.items() if i != j))

    # -- array views (cached; used by kernels and the objective) ----------

    def _build_arrays(self):
        nonloop = [(i, j, w) for (i, j), w in sorted(self._pairs.items()) if i != j]
        ei = np.array([e[0] for e in nonloop], dtype=np.int64)
        ej = np.array([e[1] for e in nonloop], dtype=np.int64)
        ew = np.array([e[2] for e in nonloop], dtype=np.float64)
        deg = np.zeros(self.n, dtype=np.int64)
        for i, nbrs in enumerate(self._adj):
            deg[i] = len(nbrs)
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(deg, out=indptr[1:])
        indices = np.empty(indptr[-1], dtype=np.int64)
        weights = np.empty(indptr[-1], dtype=np.float64)
        pos = indptr[:-1].copy()
        for i, nbrs in enumerate(self._adj):
            for j, w in nbrs:
                indices[pos[i]] = j
                weights[pos[i]] = w
                pos[i] += 1
        self._arrays = (ei, ej, ew, indptr, indices, weights)

    def edge_arrays(self):
        """(ei, ej, ew) arrays over non-loop edges with ei < ej."""
        if self._arrays is None:
            self._build_arrays()
        return self._arrays[:3]

    def csr(self):
        """Symmetric CSR adjacency (indptr, indices, weights), loops excluded."""
        if self._arrays is None:
            self._build_arrays()
        return self._arrays[3:]

    # -- derived graphs ----------------------------------------------------

    def subgraph(self, nodes):
        """Induced subgraph on `nodes`; returns (graph, id_map new->old)."""
        id_map = sorted(nodes)
        back = {old: new for new, old in enumerate(id_map)}
        sub_edges = []
        for (i, j), w in sorted(self._pairs.items()):
            if i in back and j in back:
                sub_edges.append((back[i], back[j], w))
        return WeightedGraph(len(id_map), sub_edges), id_map

    def __repr__(self):
        return f"WeightedGraph(n={self.n}, m={self.m})"


class Partition:
    """Assignment of nodes to disjoint clusters, in canonical form.

    Cluster ids are renumbered to 0..k-1 in order of first appearance, so two
    partitions of the same node set compare equal iff they group nodes
    identically.
    """

    __slots__ = ("assignment", "k")

    def __init__(self, assignment):
        assignment = np.asarray(assignment, dtype=np.int64)
        if assignment.ndim != 1 or assignment.size == 0:
            raise InputError("partition assignment must be a non-empty 1-d sequence")
        relabel = {}
        canon = np.empty_like(assignment)
        for idx, c in enumerate(assignment.tolist()):
            if c not in relabel:
                relabel[c] = len(relabel)
            canon[idx] = relabel[c]
        canon.setflags(write=False)
        self.assignment = canon
        self.k = len(relabel)

    @classmethod
    def from_clusters(cls, clusters, n=None):
        nodes = [v for cluster in clusters for v in cluster]
        size = n if n is not None else (max(nodes) + 1 if nodes else 0)
        assignment = np.full(size, -1, dtype=np.int64)
        for cid, cluster in enumerate(clusters):
            for v in cluster:
                if assignment[v] != -1:
                    raise InputError(f"node {v} appears in two clusters")
                assignment[v] = cid
        if (assignment == -1).any():
            missing = np.flatnonzero(assignment == -1).tolist()
            raise InputError(f"nodes {missing} not covered by any cluster")
        return cls(assignment)

    @classmethod
    def singletons(cls, n):
        return cls(np.arange(n))

    @classmethod
    def together(cls, n):
        return cls(np.zeros(n, dtype=np.int64))

    def __len__(self):
        return self.assignment.size

    def clusters(self):
        """Clusters as lists of node ids, indexed by cluster id."""
        out = [[] for _ in range(self.k)]
        for v, c in enumerate(self.assignment.tolist()):
            out[c].append(v)
        return out

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return self.assignment.shape == other.assignment.shape and bool(
            (self.assignment == other.assignment).all()
        )

    def __hash__(self):
        return hash(self.assignment.tobytes())

    def __repr__(self):
        return f"Partition(k={self.k}, n={len(self)})"


def partition_weight(G, P):
    """Sum of within-cluster edge weights; self-loops always count.

    For edges (i,j) the term w_ij is collected iff i and j share a cluster;
    self-loop weights are internal to every partition.
    """
    if len(P) != G.n:
        raise InputError(f"partition covers {len(P)} nodes, graph has {G.n}")
    ei, ej, ew = G.edge_arrays()
    a = P.assignment
    if ei.size == 0:
        return G.loop_sum()
    return float(ew[a[ei] == a[ej]].sum() + G.loop_sum())


def degree(G, i):
    """d_i = sum of incident edge weights (self-loop counted once)."""
    return G.degree(i)


def connected_components(G):
    """Connected components over the underlying structure, signs ignored.

    Returns a list of sorted node-id lists; their union covers all nodes.
    """
    seen = np.zeros(G.n, dtype=bool)
    comps = []
    for start in range(G.n):
        if seen[start]:
            continue
        stack = [start]
        seen[start] = True
        comp = []
        while stack:
            v = stack.pop()
            comp.append(v)
            for u, _ in G.neighbors(v):
                if not seen[u]:
                    seen[u] = True
                    stack.append(u)
        comps.append(sorted(comp))
    return comps


# -- file formats ----------------------------------------------------------


def load_graph(path, fmt="auto"):
    """Load a graph from an edge-list or lower-triangle matrix file.

    Edge list: first line ``n m``, then m lines ``i j w``.  Lower triangle:
    first line ``n``, then the n(n-1)/2 entries of the strictly lower triangle
    in row order (line breaks are not significant); zero entries mean "no
    edge".  ``fmt`` is one of ``auto``, ``edgelist``, ``triangle``; auto
    detection keys on the number of tokens in the first non-empty line.
    """
    with open(path) as fh:
        raw_lines = fh.read().splitlines()
    lines = [(no + 1, ln.split()) for no, ln in enumerate(raw_lines) if ln.split()]
    if not lines:
        raise GraphFormatError("empty graph file")
    header_no, header = lines[0]
    if fmt == "auto":
        if len(header) == 2:
            fmt = "edgelist"
        elif len(header) == 1:
            fmt = "triangle"
        else:
            raise GraphFormatError(
                f"cannot detect format from {len(header)} header tokens", header_no
            )
    if fmt == "edgelist":
        return _load_edge_list(lines)
    if fmt == "triangle":
        return _load_triangle(lines)
    raise InputError(f"unknown graph format {fmt!r}")


def _parse_int(token, line_no, what):
    try:
        return int(token)
    except ValueError:
        raise GraphFormatError(f"expected integer {what}, got {token!r}", line_no) from None


def _parse_float(token, line_no, what):
    try:
        return float(token)
    except ValueError:
        raise GraphFormatError(f"expected number {what}, got {token!r}", line_no) from None


def _load_edge_list(lines):
    line_no, header = lines[0]
    if len(header) != 2:
        raise GraphFormatError("edge-list header must be 'n m'", line_no)
    n = _parse_int(header[0], line_no, "node count")
    m = _parse_int(header[1], line_no, "edge count")
    body = lines[1:]
    if len(body) != m:
        raise GraphFormatError(
            f"header announces {m} edges but file has {len(body)} edge lines", line_no
        )
    raw = []
    for line_no, toks in body:
        if len(toks) != 3:
            raise GraphFormatError("edge line must be 'i j w'", line_no)
        w = _parse_float(toks[2], line_no, "edge weight")
        if w == 0:
            raise GraphFormatError("zero-weight edges are not allowed", line_no)
        raw.append((line_no, toks[0], toks[1], w))

    labels = sorted({t for _, a, b, _ in raw for t in (a, b)}, key=_label_key)
    remap_note = None
    as_int = None
    if all(_is_int(t) for t in labels):
        as_int = sorted(int(t) for t in labels)
    if as_int is not None and (not as_int or (as_int[0] >= 0 and as_int[-1] <= n - 1)):
        to_id = None  # already contiguous-compatible 0-based ids
    elif as_int is not None and as_int[0] >= 1 and as_int[-1] <= n:
        to_id = {t: int(t) - 1 for t in labels}
        remap_note = "1-based node ids shifted to 0-based"
    else:
        to_id = {t: i for i, t in enumerate(labels)}
        if len(to_id) > n:
            raise GraphFormatError(f"{len(to_id)} distinct node labels exceed n={n}")
        remap_note = f"{len(to_id)} node labels remapped to contiguous ids"

    edges = []
    seen = set()
    for line_no, a, b, w in raw:
        if to_id is None:
            i, j = int(a), int(b)
        else:
            i, j = to_id[a], to_id[b]
        key = (min(i, j), max(i, j))
        if key in seen:
            raise DuplicateEdgeError(f"duplicate edge ({a},{b})", line_no)
        seen.add(key)
        edges.append((i, j, w))

    out_labels = None
    if remap_note is not None and to_id is not None:
        if remap_note.startswith("1-based"):
            out_labels = [str(i + 1) for i in range(n)]
        else:
            inv = {v: k for k, v in to_id.items()}
            out_labels = [inv.get(i, str(i)) for i in range(n)]
    return WeightedGraph(n, edges, labels=out_labels, remap_note=remap_note)


def _is_int(token):
    try:
        int(token)
        return True
    except ValueError:
        return False


def _label_key(token):
    return (0, int(token), "") if _is_int(token) else (1, 0, token)


def _load_triangle(lines):
    line_no, header = lines[0]
    if len(header) != 1:
        raise GraphFormatError("lower-triangle header must be a single 'n'", line_no)
    n = _parse_int(header[0], line_no, "node count")
    tokens = [(ln, tok) for ln, toks in lines[1:] for tok in toks]
    expected = n * (n - 1) // 2
    if len(tokens) != expected:
        raise GraphFormatError(
            f"lower triangle for n={n} needs {expected} entries, found {len(tokens)}"
        )
    edges = []
    pos = 0
    for r in range(1, n):
        for c in range(r):
            ln, tok = tokens[pos]
            w = _parse_float(tok, ln, f"entry w[{r}][{c}]")
            pos += 1
            if w != 0:
                edges.append((c, r, w))
    return WeightedGraph(n, edges)


def write_edge_list(G, path):
    """Write the edge-list format; self-loops appear as 'i i w' lines."""
    with open(path, "w") as fh:
        fh.write(f"{G.n} {G.m}\n")
        for i, j, w in G.edges():
            fh.write(f"{i} {j} {w!r}\n")
