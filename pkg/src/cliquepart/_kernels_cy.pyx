# Compiled hot kernels: local-search sweep and set-partition enumeration.
# Mirrors _kernels_py statement for statement; keep both in sync so the
# compiled and pure paths stay bit-identical (operation order, tie-breaking).

import numpy as np

cimport numpy as cnp

cnp.import_array()

IMPL = "cython"

cdef double GAIN_TOL = 1e-10


def sweep_improve(cnp.int64_t[::1] indptr, cnp.int64_t[::1] indices,
                  cnp.float64_t[::1] weights, cnp.int64_t[::1] assign,
                  long k, long chain_depth):
    """One improvement round of the merge/shift local search (see _kernels_py)."""
    cdef long n = assign.shape[0]
    cdef long v, u, e, s, d, idx, step, sz, depth, pick, base, pu
    cdef double pick_gain, cum, chain_best, w

    cdef cnp.int64_t[::1] cluster_size = np.zeros(k, dtype=np.int64)
    for v in range(n):
        cluster_size[assign[v]] += 1
    cdef cnp.int64_t[::1] cluster_start = np.zeros(k + 1, dtype=np.int64)
    for s in range(k):
        cluster_start[s + 1] = cluster_start[s] + cluster_size[s]
    cdef cnp.int64_t[::1] member = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] fill = np.asarray(cluster_start[:k]).copy()
    for v in range(n):
        s = assign[v]
        member[fill[s]] = v
        fill[s] += 1

    cdef cnp.float64_t[::1] link = np.zeros(n * (k + 1), dtype=np.float64)
    for v in range(n):
        base = v * (k + 1)
        for e in range(indptr[v], indptr[v + 1]):
            link[base + assign[indices[e]]] += weights[e]

    cdef cnp.int64_t[::1] pos = np.zeros(n, dtype=np.int64)
    cdef cnp.float64_t[::1] gains = np.zeros(n, dtype=np.float64)
    cdef cnp.uint8_t[::1] moved = np.zeros(n, dtype=np.uint8)
    cdef cnp.int64_t[::1] order = np.zeros(n, dtype=np.int64)
    cdef cnp.int64_t[::1] best_chain = np.zeros(n, dtype=np.int64)

    cdef double best_gain = 0.0
    cdef long best_src = -1
    cdef long best_dst = -1
    cdef long best_len = 0
    cdef long chain_len

    for s in range(k):
        sz = cluster_size[s]
        for idx in range(sz):
            pos[member[cluster_start[s] + idx]] = idx
        depth = chain_depth if chain_depth < sz else sz
        for d in range(k + 1):
            if d == s:
                continue
            for idx in range(sz):
                v = member[cluster_start[s] + idx]
                gains[idx] = link[v * (k + 1) + d] - link[v * (k + 1) + s]
                moved[idx] = 0
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
                moved[pick] = 1
                order[step] = member[cluster_start[s] + pick]
                if cum > chain_best:
                    chain_best = cum
                    chain_len = step + 1
                v = member[cluster_start[s] + pick]
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
                best_len = chain_len
                for idx in range(chain_len):
                    best_chain[idx] = order[idx]

    if best_src < 0 or best_gain <= GAIN_TOL:
        return 0.0, k
    for idx in range(best_len):
        assign[best_chain[idx]] = best_dst
    return best_gain, _canonicalize(assign, n, k + 1)


cdef long _canonicalize(cnp.int64_t[::1] assign, long n, long id_space):
    cdef cnp.int64_t[::1] relabel = np.full(id_space, -1, dtype=np.int64)
    cdef long v, nxt = 0
    cdef long c
    for v in range(n):
        c = assign[v]
        if relabel[c] < 0:
            relabel[c] = nxt
            nxt += 1
        assign[v] = relabel[c]
    return nxt


def enumerate_partitions_max(cnp.int64_t[::1] indptr, cnp.int64_t[::1] indices,
                             cnp.float64_t[::1] weights, long n):
    """Exact maximum over all set partitions via restricted-growth strings."""
    cdef cnp.int64_t[::1] a = np.zeros(n, dtype=np.int64)
    cdef cnp.int64_t[::1] maxp = np.zeros(n, dtype=np.int64)
    cdef cnp.float64_t[::1] contrib = np.zeros(n, dtype=np.float64)
    cdef cnp.int64_t[::1] best = np.zeros(n, dtype=np.int64)

    cdef long v, u, e, j, c
    cdef double s, value = 0.0
    cdef double best_value
    cdef long long count = 1

    for v in range(n):
        s = 0.0
        for e in range(indptr[v], indptr[v + 1]):
            u = indices[e]
            if u < v and a[u] == 0:
                s += weights[e]
        contrib[v] = s
        value += s
    best_value = value

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
            for v in range(n):
                best[v] = a[v]

    return best_value, np.asarray(best).tolist(), count
