"""Brute-force optimum over all set partitions; the testing oracle."""

from __future__ import annotations

from .errors import OracleSizeError
from .graph import Partition
from . import kernels

MAX_ORACLE_NODES = 12  # Bell(12) = 4,213,597 partitions


def bell_number(n):
    """Number of set partitions of n elements (Bell triangle)."""
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for x in row:
            nxt.append(nxt[-1] + x)
        row = nxt
    return row[0]


def brute_force_optimum(G, with_count=False):
    """Exact maximum of the partition weight by full enumeration.

    Enumerates every set partition of the nodes (restricted-growth strings)
    and returns (optimum, Partition); ties keep the first partition in
    enumeration order.  Refuses graphs with more than 12 nodes.
    """
    if G.n > MAX_ORACLE_NODES:
        raise OracleSizeError(
            f"brute force refused: n={G.n} > {MAX_ORACLE_NODES} "
            f"(Bell({MAX_ORACLE_NODES}) = {bell_number(MAX_ORACLE_NODES):,} partitions)"
        )
    indptr, indices, weights = kernels.prepare_csr(*G.csr())
    value, assign, count = kernels.enumerate_partitions_max(indptr, indices, weights, G.n)
    best = float(value) + G.loop_sum()
    part = Partition(assign)
    if with_count:
        return best, part, count
    return best, part
