"""Kernel selection.

The compiled extension is used when it was built; set
``MINCLONES_PURE_PYTHON=1`` to force the numpy fallback.
"""
import os

import numpy as np

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py
if not os.environ.get("MINCLONES_PURE_PYTHON"):
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py


def hash_multipliers(length):
    """Fixed odd 64-bit multipliers used for row hashing."""
    rng = np.random.default_rng(0x5EED)
    return rng.integers(0, 2**63, size=length, dtype=np.uint64) * np.uint64(2) + np.uint64(1)


def compose_batch(f, n, tables, idx, mult):
    return _impl.compose_batch(
        np.ascontiguousarray(f, dtype=np.uint8),
        int(n),
        np.ascontiguousarray(tables, dtype=np.uint8),
        np.ascontiguousarray(idx, dtype=np.int64),
        np.ascontiguousarray(mult, dtype=np.uint64),
    )


def row_hashes(rows, mult):
    return _impl.row_hashes(
        np.ascontiguousarray(rows, dtype=np.uint8), np.ascontiguousarray(mult, dtype=np.uint64)
    )
