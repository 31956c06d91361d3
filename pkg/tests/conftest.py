import numpy as np
import pytest

from cliquepart import WeightedGraph


def rand_signed_graph(n, p=0.5, w_lo=-5, w_hi=5, seed=0):
    """Random signed graph: each pair present with prob p, weight U{w_lo..w_hi}\\{0}."""
    rng = np.random.default_rng(seed)
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                w = 0
                while w == 0:
                    w = int(rng.integers(w_lo, w_hi + 1))
                edges.append((i, j, float(w)))
    return WeightedGraph(n, edges)


def all_partitions(n):
    """Every set partition of range(n) as assignment lists (RGS order)."""
    a = [0] * n
    maxp = [0] * n
    yield a[:]
    while True:
        j = n - 1
        while j > 0 and a[j] > maxp[j - 1]:
            j -= 1
        if j == 0:
            return
        a[j] += 1
        maxp[j] = max(maxp[j - 1], a[j])
        for v in range(j + 1, n):
            a[v] = 0
            maxp[v] = maxp[v - 1]
        yield a[:]


@pytest.fixture
def triangle_mixed():
    """The canonical 3-cycle with weights (+1, +1, -1)."""
    return WeightedGraph(3, [(0, 1, 1.0), (0, 2, 1.0), (1, 2, -1.0)])
