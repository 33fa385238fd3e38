# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled bounded lattice-point search (hot kernel).

Contract and traversal order are identical to heisenspec._enum_py; the
backend selector in heisenspec._enum picks this module when available.
"""

from libc.math cimport ceil, floor, sqrt
from libc.stdlib cimport free, malloc

import numpy as np

BACKEND = "compiled"


def enumerate_coefficients(r, double bound, long long budget):
    """All integer vectors x with ||R x||^2 <= bound.

    R is upper triangular with positive diagonal. Returns (coeffs,
    truncated) with coeffs an int64 array of shape (k, m).
    """
    cdef double[:, ::1] rv = np.ascontiguousarray(r, dtype=np.float64)
    cdef Py_ssize_t m = rv.shape[0]
    if bound < 0.0:
        return np.empty((0, m), dtype=np.int64), False

    cdef long long *x = <long long *> malloc(m * sizeof(long long))
    cdef long long *hi = <long long *> malloc(m * sizeof(long long))
    cdef double *y = <double *> malloc(m * sizeof(double))
    cdef double *rem = <double *> malloc(m * sizeof(double))
    if x == NULL or hi == NULL or y == NULL or rem == NULL:
        free(x); free(hi); free(y); free(rem)
        raise MemoryError()

    cdef list chunks = []
    cdef long long total = 0
    cdef bint truncated = False
    cdef Py_ssize_t i, l, kk, nkeep
    cdef double s, t, nr, acc, y0, s0, t0
    cdef long long lo0, hi0, xs0
    cdef long long[:, ::1] block

    try:
        if m == 1:
            s = sqrt(bound)
            lo0 = <long long> ceil(-s / rv[0, 0])
            hi0 = <long long> floor(s / rv[0, 0])
            out1 = []
            for xs0 in range(lo0, hi0 + 1):
                t0 = rv[0, 0] * xs0
                if t0 * t0 <= bound:
                    out1.append(xs0)
            arr1 = np.asarray(out1, dtype=np.int64).reshape(-1, 1)
            return arr1, arr1.shape[0] > budget

        i = m - 1
        rem[i] = bound
        acc = 0.0
        y[i] = acc
        s = sqrt(rem[i]) if rem[i] > 0.0 else 0.0
        x[i] = <long long> ceil((-s - y[i]) / rv[i, i]) - 1
        hi[i] = <long long> floor((s - y[i]) / rv[i, i])

        while True:
            x[i] += 1
            if x[i] > hi[i]:
                i += 1
                if i == m:
                    break
                continue
            t = rv[i, i] * x[i] + y[i]
            nr = rem[i] - t * t
            if nr < 0.0:
                continue
            if i == 1:
                y0 = 0.0
                for l in range(1, m):
                    y0 += rv[0, l] * x[l]
                s0 = sqrt(nr) if nr > 0.0 else 0.0
                lo0 = <long long> ceil((-s0 - y0) / rv[0, 0])
                hi0 = <long long> floor((s0 - y0) / rv[0, 0])
                if lo0 > hi0:
                    continue
                nkeep = 0
                for xs0 in range(lo0, hi0 + 1):
                    t0 = rv[0, 0] * xs0 + y0
                    if t0 * t0 <= nr:
                        nkeep += 1
                if nkeep == 0:
                    continue
                block_arr = np.empty((nkeep, m), dtype=np.int64)
                block = block_arr
                kk = 0
                for xs0 in range(lo0, hi0 + 1):
                    t0 = rv[0, 0] * xs0 + y0
                    if t0 * t0 <= nr:
                        block[kk, 0] = xs0
                        for l in range(1, m):
                            block[kk, l] = x[l]
                        kk += 1
                chunks.append(block_arr)
                total += nkeep
                if total > budget:
                    truncated = True
                    break
            else:
                rem[i - 1] = nr
                i -= 1
                acc = 0.0
                for l in range(i + 1, m):
                    acc += rv[i, l] * x[l]
                y[i] = acc
                s = sqrt(rem[i]) if rem[i] > 0.0 else 0.0
                x[i] = <long long> ceil((-s - y[i]) / rv[i, i]) - 1
                hi[i] = <long long> floor((s - y[i]) / rv[i, i])
    finally:
        free(x)
        free(hi)
        free(y)
        free(rem)

    if chunks:
        out = np.concatenate(chunks, axis=0)
    else:
        out = np.empty((0, m), dtype=np.int64)
    return out, truncated
