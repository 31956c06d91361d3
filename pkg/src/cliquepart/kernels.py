"""Selects the compiled kernels when available, pure Python otherwise.

Set CLIQUEPART_PURE_PYTHON=1 to force the interpreted fallback (used by the
kernel parity tests and the benchmark script).  Both implementations produce
bit-identical results; the compiled one is just much faster.
"""

import os

import numpy as np

if os.environ.get("CLIQUEPART_PURE_PYTHON") == "1":
    from . import _kernels_py as _impl
else:
    try:
        from . import _kernels_cy as _impl
    except ImportError:
        from . import _kernels_py as _impl

IMPL = _impl.IMPL


def prepare_csr(indptr, indices, weights):
    """Convert CSR arrays to the container type the active kernel prefers."""
    if IMPL == "cython":
        return (
            np.ascontiguousarray(indptr, dtype=np.int64),
            np.ascontiguousarray(indices, dtype=np.int64),
            np.ascontiguousarray(weights, dtype=np.float64),
        )
    # plain lists: scalar indexing is ~3x faster than numpy in the interpreter
    return (
        [int(x) for x in indptr],
        [int(x) for x in indices],
        [float(x) for x in weights],
    )


def sweep_improve(indptr, indices, weights, assign, k, chain_depth):
    return _impl.sweep_improve(indptr, indices, weights, assign, k, chain_depth)


def enumerate_partitions_max(indptr, indices, weights, n):
    return _impl.enumerate_partitions_max(indptr, indices, weights, n)
