# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled composition kernel.

Same contract as ``_kernels_py.compose_batch``; the two must agree bit for bit.
"""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint8_t, uint64_t, int64_t

cnp.import_array()


def compose_batch(const uint8_t[::1] f, int n,
                  const uint8_t[:, ::1] tables,
                  const int64_t[:, ::1] idx,
                  const uint64_t[::1] mult):
    cdef Py_ssize_t m = idx.shape[0]
    cdef Py_ssize_t k = idx.shape[1]
    cdef Py_ssize_t length = tables.shape[1]
    out_arr = np.empty((m, length), dtype=np.uint8)
    hash_arr = np.empty(m, dtype=np.uint64)
    cdef uint8_t[:, ::1] out = out_arr
    cdef uint64_t[::1] hashes = hash_arr
    cdef Py_ssize_t t, e, j
    cdef Py_ssize_t code
    cdef uint64_t h
    cdef uint8_t v
    with nogil:
        for t in range(m):
            h = 0
            for e in range(length):
                code = 0
                for j in range(k):
                    code = code * n + tables[idx[t, j], e]
                v = f[code]
                out[t, e] = v
                h = h + <uint64_t>v * mult[e]
            hashes[t] = h
    return out_arr, hash_arr


def row_hashes(const uint8_t[:, ::1] rows, const uint64_t[::1] mult):
    cdef Py_ssize_t m = rows.shape[0]
    cdef Py_ssize_t length = rows.shape[1]
    hash_arr = np.empty(m, dtype=np.uint64)
    cdef uint64_t[::1] hashes = hash_arr
    cdef Py_ssize_t t, e
    cdef uint64_t h
    with nogil:
        for t in range(m):
            h = 0
            for e in range(length):
                h = h + <uint64_t>rows[t, e] * mult[e]
            hashes[t] = h
    return hash_arr
