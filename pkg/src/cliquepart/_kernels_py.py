"""Pure-Python fallback for the compiled hot kernels.

The two entry points mirror `_kernels_cy` statement for statement so the
compiled and interpreted paths produce bit-identical results (same operation
order, same tie-breaking).  Keep the implementations in sync.
"""

IMPL = "python"

GAIN_TOL = 1e-10


def sweep_improve(indptr, indices, weights, assign, k, chain_depth):
    """One improvement round of the merge/shift local search.

    Scans every ordered cluster pair (source, destination), destination
    including a fresh empty cluster, builds the best chain of single-node
    shifts for each pair (each node moved at most once, best cumulative-gain
    prefix kept), and applies the single best improving recombination found.

    `assign` is modified in place.  Returns (gain, new_cluster_count);
    gain == 0.0 means no improving move exists and `assign` is unchanged.
    """
    n = len(assign)
    members = [[] for _ in range(k)]
    for v in range(n):
        members[assign[v]].append(v)

    # link[v*(k+1)+c] = total weight from v to current members of cluster c
    link = [0.0] * (n * (k + 1))
    for v in range(n):
        base = v * (k + 1)
        for e in range(indptr[v], indptr[v + 1]):
            link[base + assign[indices[e]]] += weights[e]

    pos = [0] * n  # position of a node inside its source-cluster member list
    best_gain = 0.0
    best_src = -1
    best_dst = -1
    best_chain = None

    for s in range(k):
        ms = members[s]
        sz = len(ms)
        for idx in range(sz):
            pos[ms[idx]] = idx
        depth = chain_depth if chain_depth < sz else sz
        for d in range(k + 1):
            if d == s:
                continue
            gains = [0.0] * sz
            for idx in range(sz):
                v = ms[idx]
                gains[idx] = link[v * (k + 1) + d] - link[v * (k + 1) + s]
            moved = [False] * sz
            order = []
            cum = 0.0
            chain_best = 0.0
            chain_len = 0
            for step in range(depth):
                pick = -1
                pick_gain = 0.0
                for idx in range(sz):
                    if moved[idx]:
                        continue
                    if pick < 0 or gains[idx] > pick_gain:
                        pick = idx
                        pick_gain = gains[idx]
                cum += pick_gain
                moved[pick] = True
                order.append(ms[pick])
                if cum > chain_best:
                    chain_best = cum
                    chain_len = step + 1
                v = ms[pick]
                for e in range(indptr[v], indptr[v + 1]):
                    u = indices[e]
                    if assign[u] == s:
                        pu = pos[u]
                        if not moved[pu]:
                            gains[pu] += 2.0 * weights[e]
            if chain_best > best_gain:
                best_gain = chain_best
                best_src = s
                best_dst = d
                best_chain = order[:chain_len]

    if best_src < 0 or best_gain <= GAIN_TOL:
        return 0.0, k
    for v in best_chain:
        assign[v] = best_dst
    return best_gain, _canonicalize(assign, n)


def _canonicalize(assign, n):
    """Relabel cluster ids to 0..k-1 in order of first appearance."""
    relabel = {}
    for v in range(n):
        c = assign[v]
        if c not in relabel:
            relabel[c] = len(relabel)
        assign[v] = relabel[c]
    return len(relabel)


def enumerate_partitions_max(indptr, indices, weights, n):
    """Maximize the within-cluster weight over all set partitions.

    Enumerates restricted-growth strings in lexicographic order, maintaining
    the objective incrementally.  Self-loops are a constant and must be added
    by the caller.  Returns (best_value, best_assignment, partition_count);
    ties keep the earliest enumerated partition.
    """
    a = [0] * n
    maxp = [0] * n
    contrib = [0.0] * n

    value = 0.0
    for v in range(n):
        s = 0.0
        for e in range(indptr[v], indptr[v + 1]):
            u = indices[e]
            if u < v and a[u] == 0:
                s += weights[e]
        contrib[v] = s
        value += s
    best_value = value
    best = a[:]
    count = 1

    while True:
        j = n - 1
        while j > 0 and a[j] > maxp[j - 1]:
            j -= 1
        if j == 0:
            break
        for v in range(n - 1, j - 1, -1):
            value -= contrib[v]
        a[j] += 1
        maxp[j] = maxp[j - 1] if maxp[j - 1] > a[j] else a[j]
        for v in range(j, n):
            if v > j:
                a[v] = 0
                maxp[v] = maxp[v - 1]
            c = a[v]
            s = 0.0
            for e in range(indptr[v], indptr[v + 1]):
                u = indices[e]
                if u < v and a[u] == c:
                    s += weights[e]
            contrib[v] = s
            value += s
        count += 1
        if value > best_value:
            best_value = value
            best = a[:]

    return best_value, best, count
