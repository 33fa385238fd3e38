"""Pure-Python fallback for the bounded lattice-point search.

Mirrors the compiled kernel in ``heisenspec._enumcore``: same traversal
order, same floating-point comparisons, same output. The innermost level is
vectorized with numpy so desk-scale enumerations stay usable without the
extension.
"""

from __future__ import annotations

import math

import numpy as np

BACKEND = "python"


def enumerate_coefficients(r, bound, budget):
    """All integer vectors x with ||R x||^2 <= bound.

    R is upper triangular with positive diagonal (Cholesky factor of the
    Gram matrix, so x^T G x = ||R x||^2). Returns ``(coeffs, truncated)``
    where coeffs is an int64 array of shape (k, m) and truncated is set when
    the budget cut the search short. The zero vector is always emitted for
    bound >= 0.
    """
    r = np.ascontiguousarray(r, dtype=np.float64)
    m = r.shape[0]
    if bound < 0.0:
        return np.empty((0, m), dtype=np.int64), False

    diag = [float(r[i, i]) for i in range(m)]
    if m == 1:
        s = math.sqrt(bound)
        lo = math.ceil(-s / diag[0])
        hi = math.floor(s / diag[0])
        xs = np.arange(lo, hi + 1, dtype=np.int64)
        t = diag[0] * xs.astype(np.float64)
        out = xs[t * t <= bound].reshape(-1, 1)
        return out, out.shape[0] > budget

    x = [0] * m
    y = [0.0] * m
    rem = [0.0] * m
    hi = [0] * m
    chunks: list[np.ndarray] = []
    total = 0
    truncated = False

    def open_level(i: int) -> None:
        # Plain left-to-right accumulation, bit-compatible with the
        # compiled kernel.
        acc = 0.0
        for l in range(i + 1, m):
            acc += r[i, l] * x[l]
        y[i] = acc
        s = math.sqrt(rem[i]) if rem[i] > 0.0 else 0.0
        x[i] = math.ceil((-s - y[i]) / diag[i]) - 1
        hi[i] = math.floor((s - y[i]) / diag[i])

    i = m - 1
    rem[i] = float(bound)
    open_level(i)

    while True:
        x[i] += 1
        if x[i] > hi[i]:
            i += 1
            if i == m:
                break
            continue
        t = diag[i] * x[i] + y[i]
        nr = rem[i] - t * t
        if nr < 0.0:
            continue
        if i == 1:
            # Vectorize the innermost coordinate.
            y0 = 0.0
            for l in range(1, m):
                y0 += r[0, l] * x[l]
            s0 = math.sqrt(nr) if nr > 0.0 else 0.0
            lo0 = math.ceil((-s0 - y0) / diag[0])
            hi0 = math.floor((s0 - y0) / diag[0])
            if lo0 > hi0:
                continue
            xs = np.arange(lo0, hi0 + 1, dtype=np.int64)
            t0 = diag[0] * xs.astype(np.float64) + y0
            keep = t0 * t0 <= nr
            if not keep.any():
                continue
            block = np.empty((int(keep.sum()), m), dtype=np.int64)
            block[:, 0] = xs[keep]
            for l in range(1, m):
                block[:, l] = x[l]
            chunks.append(block)
            total += block.shape[0]
            if total > budget:
                truncated = True
                break
        else:
            rem[i - 1] = nr
            i -= 1
            open_level(i)

    if chunks:
        out = np.concatenate(chunks, axis=0)
    else:
        out = np.empty((0, m), dtype=np.int64)
    return out, truncated
