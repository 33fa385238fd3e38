"""Independent oracles used by the test suite.

Everything here deliberately avoids the library's search kernel: shells are
counted by scanning explicit coefficient boxes, sums-of-squares counts come
from theta-series convolution, and lattice power sums are brute-forced.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np


def box_shells(rows, norm_sq_max):
    """Exact shells by brute-force box scan.

    The box bounds come from the rows of the inverse Cholesky factor:
    |x_i| <= sqrt(C) * ||row_i(R^{-1})||. Norms are evaluated exactly with
    the integer-rescaled Gram matrix.
    """
    b = np.array([[float(v) for v in r] for r in rows], dtype=np.float64)
    g = b @ b.T
    r_up = np.linalg.cholesky(g).T
    rinv = np.linalg.inv(r_up)
    bounds = np.ceil(
        math.sqrt(float(norm_sq_max)) * np.linalg.norm(rinv, axis=1) * (1 + 1e-9)
    ).astype(int)
    grids = np.meshgrid(*[np.arange(-bb, bb + 1) for bb in bounds], indexing="ij")
    coeffs = np.stack([gg.ravel() for gg in grids], axis=1)

    gram = [
        [sum(Fraction(a) * Fraction(c) for a, c in zip(ri, rj)) for rj in rows]
        for ri in rows
    ]
    den = math.lcm(*(v.denominator for row in gram for v in row))
    gn = np.array([[int(v * den) for v in row] for row in gram], dtype=np.int64)
    nums = np.einsum("ij,jk,ik->i", coeffs, gn, coeffs)
    lim = Fraction(norm_sq_max) * den
    keep = nums <= (lim.numerator // lim.denominator)
    vals, counts = np.unique(nums[keep], return_counts=True)
    return [(Fraction(int(v), den), int(c)) for v, c in zip(vals, counts)]


def sums_of_squares_counts(m: int, kmax: int) -> list[int]:
    """r_m(k), k <= kmax, by convolving the one-dimensional theta series."""
    theta = np.zeros(kmax + 1, dtype=np.int64)
    a = 0
    while a * a <= kmax:
        theta[a * a] += 1 if a == 0 else 2
        a += 1
    out = np.zeros(kmax + 1, dtype=np.int64)
    out[0] = 1
    for _ in range(m):
        out = np.convolve(out, theta)[: kmax + 1]
    return [int(v) for v in out]


def z2_power_sum(norm_sq_max: int, power: float) -> float:
    """sum over 0 < |z|^2 <= norm_sq_max of |z|^{-2*power} on Z^2."""
    r = math.isqrt(norm_sq_max) + 1
    terms = []
    for a in range(-r, r + 1):
        for b in range(-r, r + 1):
            q = a * a + b * b
            if q == 0 or q > norm_sq_max:
                continue
            terms.append(float(q) ** (-power))
    return math.fsum(terms)


def z2_count_within(radius: float) -> int:
    r = int(radius) + 1
    return sum(
        1
        for a in range(-r, r + 1)
        for b in range(-r, r + 1)
        if a * a + b * b <= radius * radius
    )
