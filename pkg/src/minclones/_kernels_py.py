"""Pure numpy implementation of the composition kernel."""
import numpy as np


def compose_batch(f, n, tables, idx, mult):
    """Apply the table ``f`` (arity ``idx.shape[1]``) to rows of ``tables``.

    Row ``t`` of the result is ``f(tables[idx[t, 0]], ..., tables[idx[t, k-1]])``
    evaluated pointwise.  Returns the new rows and their 64-bit hashes.
    """
    idx = np.asarray(idx, dtype=np.int64)
    m, k = idx.shape
    code = np.zeros((m, tables.shape[1]), dtype=np.int64)
    for j in range(k):
        code *= n
        code += tables[idx[:, j]]
    out = np.asarray(f)[code]
    return out, row_hashes(out, mult)


def row_hashes(rows, mult):
    # uint64 arithmetic wraps, matching the compiled version
    with np.errstate(over="ignore"):
        return (rows.astype(np.uint64) * mult).sum(axis=1, dtype=np.uint64)
