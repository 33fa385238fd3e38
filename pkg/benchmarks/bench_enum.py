#!/usr/bin/env python3
"""Benchmark: compiled enumeration kernel vs the pure-Python fallback.

Times the bounded lattice-point search on integer lattices of growing
dimension and one skewed basis. Run after `pip install -e .`:

    python benchmarks/bench_enum.py
"""

import time

import numpy as np

from heisenspec import make_lattice, zn_lattice
from heisenspec import _enum_py

try:
    from heisenspec import _enumcore
except ImportError:
    _enumcore = None


def timed(fn, r, bound, repeats=3):
    best = float("inf")
    points = 0
    for _ in range(repeats):
        t0 = time.perf_counter()
        out, truncated = fn(r, bound, 50_000_000)
        best = min(best, time.perf_counter() - t0)
        assert not truncated
        points = out.shape[0]
    return points, best


def main():
    rng = np.random.default_rng(7)
    skew = make_lattice((2 * np.eye(6, dtype=int) + rng.integers(-1, 2, (6, 6))).tolist())
    cases = [
        ("Z^2,  |x|^2 <= 2000", zn_lattice(2), 2000.0),
        ("Z^4,  |x|^2 <= 150", zn_lattice(4), 150.0),
        ("Z^6,  |x|^2 <= 60", zn_lattice(6), 60.0),
        ("Z^8,  |x|^2 <= 25", zn_lattice(8), 25.0),
        ("skew 6-dim, |x|^2 <= 120", skew, 120.0),
    ]

    print(f"{'case':<28} {'points':>9} {'python':>10} {'compiled':>10} {'speedup':>8}")
    for name, basis, bound in cases:
        r = basis.cholesky_upper
        n_py, t_py = timed(_enum_py.enumerate_coefficients, r, bound)
        if _enumcore is None:
            print(f"{name:<28} {n_py:>9} {t_py:>9.4f}s {'n/a':>10} {'n/a':>8}")
            continue
        n_cy, t_cy = timed(_enumcore.enumerate_coefficients, r, bound)
        assert n_py == n_cy, "backends disagree"
        print(
            f"{name:<28} {n_py:>9} {t_py:>9.4f}s {t_cy:>9.4f}s {t_py / t_cy:>7.1f}x"
        )


if __name__ == "__main__":
    main()
