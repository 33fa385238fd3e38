"""Full-rank lattices in R^{2d}: exact bases, duals, norm-ordered shells.

A basis is given by rows spanning R^m with m even. When every entry is
rational the Gram matrix is carried exactly (``fractions.Fraction``) and
points are grouped into shells by exact squared norm, so shell counts are
exact integers. Otherwise grouping falls back to a relative float tolerance
of 1e-9.

Enumeration is a Fincke-Pohst bounded search on the Cholesky factor of the
Gram matrix: the search tree prunes by the remaining quadratic budget at
each level, so the candidate set is exhaustive for the requested cutoff
(the float cutoff is slightly inflated, then candidates are re-filtered
with exact arithmetic when the basis is rational).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import _enum
from .errors import BudgetExceeded, SingularBasis, ValidationError

Scalar = Fraction | float

#: default cap on predicted/actual point counts per enumeration
DEFAULT_BUDGET = 10_000_000

#: relative tolerance for float shell grouping and cutoff filtering
FLOAT_SHELL_RTOL = 1e-9

# safety inflation of the float search cutoff so exact points on the
# boundary are never missed before the exact re-filter
_CUTOFF_INFLATION = 1e-6


def _as_entry(v) -> Scalar:
    """Normalize a matrix entry: ints and Fractions stay exact."""
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int) and not isinstance(v, bool):
        return Fraction(v)
    if isinstance(v, float):
        return v
    raise ValidationError(f"unsupported matrix entry {v!r}")


def _exact_det(mat: list[list[Fraction]]) -> Fraction:
    """Determinant by fraction-exact Gaussian elimination."""
    m = [row[:] for row in mat]
    n = len(m)
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        det *= m[col][col]
        inv = 1 / m[col][col]
        for r in range(col + 1, n):
            if m[r][col] == 0:
                continue
            f = m[r][col] * inv
            for cc in range(col, n):
                m[r][cc] -= f * m[col][cc]
    return det


def _exact_inverse(mat: list[list[Fraction]]) -> list[list[Fraction]] | None:
    """Gauss-Jordan inverse over the rationals; None when singular."""
    n = len(mat)
    aug = [row[:] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(mat)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for r in range(n):
            if r == col or aug[r][col] == 0:
                continue
            f = aug[r][col]
            aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


@dataclass(frozen=True)
class LatticePoint:
    """A lattice vector given by integer coefficients in the basis."""

    coeffs: tuple[int, ...]
    norm_sq: Scalar


@dataclass(frozen=True)
class Shell:
    """All lattice vectors sharing one squared norm."""

    norm_sq: Scalar
    count: int
    points: tuple[LatticePoint, ...] | None = field(default=None, compare=False)


@dataclass(frozen=True)
class LatticeBasis:
    """Validated full-rank basis; immutable and safe to share."""

    rows: tuple[tuple[Scalar, ...], ...]
    exact: bool

    @property
    def dim(self) -> int:
        return len(self.rows)

    @property
    def gram_exact(self) -> tuple[tuple[Fraction, ...], ...]:
        """Exact Gram matrix (only when ``exact``)."""
        cached = _gram_exact_cache.get(self)
        if cached is None:
            rows = [[Fraction(v) for v in r] for r in self.rows]
            cached = tuple(
                tuple(sum(a * b for a, b in zip(ri, rj)) for rj in rows) for ri in rows
            )
            _gram_exact_cache[self] = cached
        return cached

    @property
    def gram(self) -> np.ndarray:
        b = np.array([[float(v) for v in r] for r in self.rows], dtype=np.float64)
        return b @ b.T

    @property
    def cholesky_upper(self) -> np.ndarray:
        """Upper-triangular R with x^T G x = ||R x||^2."""
        try:
            low = np.linalg.cholesky(self.gram)
        except np.linalg.LinAlgError as exc:
            raise SingularBasis("Gram matrix is not positive definite") from exc
        return np.ascontiguousarray(low.T)

    @property
    def covolume(self) -> float:
        if self.exact:
            return math.sqrt(float(_exact_det([list(r) for r in self.gram_exact])))
        sign, logdet = np.linalg.slogdet(self.gram)
        return math.exp(0.5 * logdet) if sign > 0 else 0.0


# gram matrices are pure functions of the (hashable) basis
_gram_exact_cache: dict[LatticeBasis, tuple[tuple[Fraction, ...], ...]] = {}


def make_lattice(rows) -> LatticeBasis:
    """Validate a square, even-dimensional, nonsingular row basis.

    Entries may be ints, Fractions or floats; the basis is exact iff no
    entry is a float. Raises SingularBasis when the Gram determinant
    vanishes (exactly for rational bases, below 1e-12 relative otherwise).
    """
    norm_rows = tuple(tuple(_as_entry(v) for v in r) for r in rows)
    n = len(norm_rows)
    if n == 0 or any(len(r) != n for r in norm_rows):
        raise ValidationError("basis must be a square matrix")
    if n % 2 != 0:
        raise ValidationError(f"basis dimension must be even, got {n}")
    exact = all(isinstance(v, Fraction) for r in norm_rows for v in r)
    basis = LatticeBasis(rows=norm_rows, exact=exact)
    if exact:
        det = _exact_det([list(r) for r in basis.gram_exact])
        if det == 0:
            raise SingularBasis("rows are linearly dependent")
    else:
        g = basis.gram
        scale = float(np.prod(np.diag(g))) or 1.0
        if abs(float(np.linalg.det(g))) < 1e-12 * scale:
            raise SingularBasis("rows are numerically dependent (det below 1e-12 relative)")
    return basis


def zn_lattice(dim: int) -> LatticeBasis:
    """The integer lattice Z^dim (self-dual)."""
    return make_lattice([[int(i == j) for j in range(dim)] for i in range(dim)])


def dual_lattice(basis: LatticeBasis) -> LatticeBasis:
    """Basis of the dual lattice under the integer pairing <xi, lam> in Z.

    The dual rows D satisfy D B^T = I, i.e. D = G^{-1} B; dualizing twice
    returns the original rows (exactly, for rational bases).
    """
    if basis.exact:
        ginv = _exact_inverse([list(r) for r in basis.gram_exact])
        if ginv is None:
            raise SingularBasis("rows are linearly dependent")
        rows = [
            [sum(f * Fraction(v) for f, v in zip(gr, col)) for col in zip(*basis.rows)]
            for gr in ginv
        ]
        return make_lattice(rows)
    b = np.array([[float(v) for v in r] for r in basis.rows], dtype=np.float64)
    rows = np.linalg.solve(basis.gram, b)
    return make_lattice(rows.tolist())


def shell_count_upper_bound(basis: LatticeBasis, radius: float) -> float:
    """Certified upper bound on #{xi in lattice : |xi| <= radius}.

    Every Voronoi cell around a counted point lies inside the ball of
    radius ``radius + rho`` where rho = (1/2) sum of basis vector lengths
    bounds the covering radius (Babai rounding), so the count is at most
    vol(ball(radius + rho)) / covolume. Monotone nondecreasing in radius.
    """
    if radius < 0:
        raise ValidationError("radius must be nonnegative")
    m = basis.dim
    g = basis.gram
    rho = 0.5 * float(np.sum(np.sqrt(np.diag(g))))
    unit_ball = math.pi ** (m / 2) / math.gamma(m / 2 + 1)
    return unit_ball * (radius + rho) ** m / basis.covolume


def _exact_norm_numerators(basis: LatticeBasis, coeffs: np.ndarray) -> tuple[np.ndarray, int]:
    """Squared norms as integers: returns (numerators, common denominator)."""
    gram = basis.gram_exact
    den = math.lcm(*(v.denominator for r in gram for v in r)) if gram else 1
    gn = [[int(v * den) for v in r] for r in gram]
    max_g = max((abs(v) for r in gn for v in r), default=0)
    max_x = int(np.abs(coeffs).max()) if coeffs.size else 0
    m = basis.dim
    # int64 is safe when the worst-case |x^T Gn x| stays well below 2^62
    if m * m * max_x * max_x * max_g < 2**62:
        gn_arr = np.array(gn, dtype=np.int64)
        nums = np.einsum("ij,jk,ik->i", coeffs, gn_arr, coeffs)
    else:
        gn_obj = np.array(gn, dtype=object)
        xo = coeffs.astype(object)
        nums = np.array([(row @ gn_obj @ row) for row in xo], dtype=object)
    return nums, den


def _predicted_count(basis: LatticeBasis, norm_sq_max: float) -> float:
    """Upper bound on the point count, used as the budget gate.

    Minimum of the ball-volume bound (tight for round lattices) and the
    coefficient-box product |x_i| <= sqrt(C) ||row_i(R^{-1})|| (tight in
    high dimension, and also a bound on the search-tree breadth).
    """
    radius = math.sqrt(max(norm_sq_max, 0.0))
    ball = shell_count_upper_bound(basis, radius)
    rinv = np.linalg.inv(basis.cholesky_upper)
    box = float(
        np.prod(2.0 * np.floor(radius * np.linalg.norm(rinv, axis=1) * (1 + 1e-9)) + 1.0)
    )
    return min(ball, box)


def enumerate_by_norm(
    basis: LatticeBasis,
    norm_sq_max,
    include_zero: bool = True,
    *,
    budget: int = DEFAULT_BUDGET,
    keep_points: bool = False,
) -> list[Shell]:
    """Shells of lattice points with |xi|^2 <= norm_sq_max, ascending.

    Grouping is exact for rational bases and within relative tolerance
    1e-9 otherwise. Raises BudgetExceeded when the predicted point count
    (ball-volume bound) exceeds ``budget`` or the search emits more than
    ``budget`` points.
    """
    cutoff_f = float(norm_sq_max)
    if cutoff_f < 0:
        raise ValidationError("norm_sq_max must be nonnegative")
    if _predicted_count(basis, cutoff_f) > budget:
        raise BudgetExceeded(
            f"predicted point count exceeds budget {budget} "
            f"for norm_sq_max={cutoff_f!r}"
        )
    if keep_points:
        return list(_shells_with_points(basis, _cutoff_key(basis, norm_sq_max), include_zero, budget))
    return list(_shells_cached(basis, _cutoff_key(basis, norm_sq_max), include_zero, budget))


def _cutoff_key(basis: LatticeBasis, norm_sq_max) -> Scalar:
    if basis.exact:
        return norm_sq_max if isinstance(norm_sq_max, Fraction) else Fraction(norm_sq_max)
    return float(norm_sq_max)


@lru_cache(maxsize=64)
def _shells_cached(basis, cutoff, include_zero, budget) -> tuple[Shell, ...]:
    return _shells_with_points(basis, cutoff, include_zero, budget, keep_points=False)


def _shells_with_points(basis, cutoff, include_zero, budget, keep_points=True) -> tuple[Shell, ...]:
    cutoff_f = float(cutoff)
    search_bound = cutoff_f * (1.0 + _CUTOFF_INFLATION) + 1e-9
    coeffs, truncated = _enum.enumerate_coefficients(basis.cholesky_upper, search_bound, budget)
    if truncated:
        raise BudgetExceeded(f"enumeration exceeded budget {budget}")

    if basis.exact:
        nums, den = _exact_norm_numerators(basis, coeffs)
        # keep num/den <= cutoff  <=>  num <= floor(cutoff * den), all integers
        lim_frac = Fraction(cutoff) * den
        int_lim = lim_frac.numerator // lim_frac.denominator
        if nums.dtype == object:
            keep = np.array([int(n) <= int_lim for n in nums], dtype=bool)
        else:
            keep = nums <= int_lim
        nums = nums[keep]
        coeffs = coeffs[keep]
        if nums.dtype == object:
            nums = nums.astype(object)
            order = np.argsort(np.array([float(n) for n in nums]), kind="stable")
        else:
            order = np.argsort(nums, kind="stable")
        nums = nums[order]
        coeffs = coeffs[order]
        values, starts, counts = np.unique(nums, return_index=True, return_counts=True)
        shells = []
        for v, st, ct in zip(values, starts, counts):
            ns = Fraction(int(v), den)
            if ns == 0 and not include_zero:
                continue
            pts = None
            if keep_points:
                block = coeffs[st : st + ct]
                block = block[np.lexsort(block.T[::-1])]
                pts = tuple(LatticePoint(tuple(int(x) for x in row), ns) for row in block)
            shells.append(Shell(norm_sq=ns, count=int(ct), points=pts))
        return tuple(shells)

    # float path: norms from the float Gram matrix
    g = basis.gram
    q = np.einsum("ij,jk,ik->i", coeffs.astype(np.float64), g, coeffs.astype(np.float64))
    keep = q <= cutoff_f * (1.0 + FLOAT_SHELL_RTOL)
    q = q[keep]
    coeffs = coeffs[keep]
    order = np.argsort(q, kind="stable")
    q = q[order]
    coeffs = coeffs[order]
    shells = []
    start = 0
    for k in range(1, len(q) + 1):
        if k == len(q) or (q[k] - q[start]) > FLOAT_SHELL_RTOL * max(abs(q[k]), abs(q[start]), 1e-300):
            ns = float(q[start])
            if not (ns == 0.0 and not include_zero):
                pts = None
                if keep_points:
                    block = coeffs[start:k]
                    block = block[np.lexsort(block.T[::-1])]
                    pts = tuple(LatticePoint(tuple(int(x) for x in row), float(qq)) for row, qq in zip(block, q[start:k]))
                shells.append(Shell(norm_sq=ns, count=k - start, points=pts))
            start = k
    return tuple(shells)


def minimal_vector(basis: LatticeBasis, *, budget: int = DEFAULT_BUDGET) -> Shell:
    """First nonzero shell; its norm_sq is the squared minimal length."""
    if basis.exact:
        cutoff: Scalar = min(basis.gram_exact[i][i] for i in range(basis.dim))
    else:
        cutoff = float(np.min(np.diag(basis.gram)))
    shells = enumerate_by_norm(basis, cutoff, include_zero=False, budget=budget)
    return shells[0]


# --- file format -----------------------------------------------------------
#
# {"dim": 2, "rows": [[1, 0], ["1/2", 0.5]], "is_dual": false}
# Rational entries are strings "p/q" (or plain ints) and round-trip without
# any float conversion.


def entry_to_jsonable(v: Scalar):
    if isinstance(v, Fraction):
        if v.denominator == 1:
            return int(v)
        return f"{v.numerator}/{v.denominator}"
    return float(v)


def entry_from_jsonable(v) -> Scalar:
    if isinstance(v, str):
        num, _, den = v.partition("/")
        try:
            return Fraction(int(num), int(den)) if den else Fraction(int(num))
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError(f"bad rational entry {v!r}") from exc
    if isinstance(v, bool):
        raise ValidationError(f"bad matrix entry {v!r}")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, float):
        return v
    raise ValidationError(f"bad matrix entry {v!r}")


def lattice_to_jsonable(basis: LatticeBasis, is_dual: bool = True) -> dict:
    return {
        "dim": basis.dim,
        "rows": [[entry_to_jsonable(v) for v in r] for r in basis.rows],
        "is_dual": bool(is_dual),
    }


def lattice_from_jsonable(doc: dict) -> tuple[LatticeBasis, bool]:
    """Parse the lattice file schema; returns (basis, is_dual)."""
    if not isinstance(doc, dict) or "rows" not in doc:
        raise ValidationError("lattice document must contain 'rows'")
    rows = [[entry_from_jsonable(v) for v in r] for r in doc["rows"]]
    basis = make_lattice(rows)
    if "dim" in doc and int(doc["dim"]) != basis.dim:
        raise ValidationError(
            f"declared dim {doc['dim']} does not match rows ({basis.dim})"
        )
    return basis, bool(doc.get("is_dual", False))
