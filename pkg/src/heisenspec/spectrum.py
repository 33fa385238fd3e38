"""Eigenvalue and multiplicity formulas on compact Heisenberg quotients.

The spectrum consists of two families:

* type (a), indexed by a nonzero integer n and a level j >= 0, with
  eigenvalue ``pi*|n|/(2c) * (d + 2j - alpha*sgn n)`` and multiplicity
  ``|n|^d * L * binom(j+d-1, d-1)``;
* type (b), indexed by dual-lattice shells, with eigenvalue
  ``pi/2 * |xi|^2`` and multiplicity equal to the shell count.

The companion Laplace-Beltrami eigenvalue on the same joint eigenspace is
``pi*|n|/(2c) * (d + 2j) + eps * pi^2/(4c^2) * n^2`` for type (a) and equals
the operator eigenvalue for type (b).

Eigenvalues are carried as floats next to exact descriptors; all grouping
(coalescing) goes through exact rational keys, never float equality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import BudgetExceeded, ValidationError
from .lattice import DEFAULT_BUDGET, LatticeBasis, Shell, enumerate_by_norm


@dataclass(frozen=True)
class ManifoldParams:
    """Problem instance: dimensions, operator parameter and dual lattice.

    ``c`` is the period of the center, ``alpha`` the operator parameter with
    |alpha| <= d, ``big_l`` the lattice-determined multiplicity constant (an
    input, not derived), ``dual_lattice`` the dual lattice in R^{2d} and
    ``epsilon`` the metric parameter of the Laplace-Beltrami family.
    """

    d: int
    c: float
    alpha: float
    dual_lattice: LatticeBasis
    big_l: int = 1
    epsilon: float = 1.0

    def __post_init__(self):
        if not isinstance(self.d, int) or self.d < 1:
            raise ValidationError("d must be a positive integer")
        if not self.c > 0:
            raise ValidationError("c must be positive")
        if abs(self.alpha) > self.d:
            raise ValidationError(f"alpha must satisfy |alpha| <= d, got {self.alpha}")
        if not isinstance(self.big_l, int) or self.big_l < 1:
            raise ValidationError("big_l must be a positive integer")
        if not self.epsilon > 0:
            raise ValidationError("epsilon must be positive")
        if self.dual_lattice.dim != 2 * self.d:
            raise ValidationError(
                f"dual lattice dimension {self.dual_lattice.dim} != 2*d = {2 * self.d}"
            )


@dataclass(frozen=True)
class TypeAIndex:
    """Ladder index (n, j), n != 0, j >= 0."""

    n: int
    j: int

    def __post_init__(self):
        if self.n == 0:
            raise ValidationError("type (a) index needs n != 0")
        if self.j < 0:
            raise ValidationError("type (a) index needs j >= 0")


@dataclass(frozen=True)
class TypeBIndex:
    """Dual-lattice shell index."""

    shell: Shell


EigenIndex = TypeAIndex | TypeBIndex


@dataclass(frozen=True)
class EigenRecord:
    """One spectral point: eigenvalue, companion value, multiplicity.

    ``multiplicity`` is ``math.inf`` exactly on the aggregated record of the
    infinite flat family at |alpha| = d (all n of one sign, j = 0); there
    ``mu`` is None since the companion eigenvalue varies over the family.
    """

    index: EigenIndex
    lam: float
    mu: float | None
    multiplicity: int | float
    is_kernel: bool


@dataclass(frozen=True)
class CoalescedLine:
    """Records merged at one eigenvalue; ``coincidence`` marks merges across
    families that relied on float tolerance rather than exact keys."""

    lam: float
    multiplicity: int | float
    records: tuple[EigenRecord, ...]
    coincidence: bool


def _sgn(n: int) -> int:
    return 1 if n > 0 else -1


def type_a_lambda(p: ManifoldParams, n: int, j: int) -> float:
    """pi*|n|/(2c) * (d + 2j - alpha*sgn n); nonnegative for |alpha| <= d."""
    return (math.pi * abs(n) / (2.0 * p.c)) * (p.d + 2 * j - p.alpha * _sgn(n))


def type_a_multiplicity(p: ManifoldParams, n: int, j: int) -> int:
    """|n|^d * L * binom(j+d-1, d-1), exact."""
    return abs(n) ** p.d * p.big_l * math.comb(j + p.d - 1, p.d - 1)


def type_b_lambda(shell: Shell) -> float:
    """pi/2 * |xi|^2."""
    return (math.pi / 2.0) * float(shell.norm_sq)


def lambda_of(p: ManifoldParams, idx: EigenIndex) -> float:
    if isinstance(idx, TypeAIndex):
        return type_a_lambda(p, idx.n, idx.j)
    return type_b_lambda(idx.shell)


def mu_of(p: ManifoldParams, idx: EigenIndex, epsilon: float | None = None) -> float:
    """Laplace-Beltrami eigenvalue on the joint eigenspace of ``idx``.

    ``epsilon`` overrides the instance value (the Sobolev machinery pins
    it to 1 regardless of the params).
    """
    eps = p.epsilon if epsilon is None else epsilon
    if isinstance(idx, TypeAIndex):
        n, j = idx.n, idx.j
        return (math.pi * abs(n) / (2.0 * p.c)) * (p.d + 2 * j) + eps * (
            math.pi**2 / (4.0 * p.c * p.c)
        ) * n * n
    return type_b_lambda(idx.shell)


def multiplicity_of(p: ManifoldParams, idx: EigenIndex) -> int:
    if isinstance(idx, TypeAIndex):
        return type_a_multiplicity(p, idx.n, idx.j)
    return idx.shell.count


def is_kernel(p: ManifoldParams, idx: EigenIndex) -> bool:
    """True iff the eigenvalue vanishes.

    That happens for the zero shell (constants) and, when |alpha| = d, for
    the whole half-family j = 0 with sgn n = sgn alpha.
    """
    if isinstance(idx, TypeBIndex):
        return idx.shell.norm_sq == 0
    return abs(p.alpha) == p.d and idx.j == 0 and _sgn(idx.n) * p.alpha > 0


def kernel_type_a_indices(p: ManifoldParams, max_abs_n: int) -> list[TypeAIndex]:
    """The flat type (a) indices with |n| <= max_abs_n (empty for |alpha| < d)."""
    if abs(p.alpha) != p.d:
        return []
    s = 1 if p.alpha > 0 else -1
    return [TypeAIndex(n=s * k, j=0) for k in range(1, max_abs_n + 1)]


def _lambda_key(p: ManifoldParams, idx: EigenIndex) -> Fraction | None:
    """Exact value of lambda/pi when available (always for type (a),
    for type (b) only on exact lattices)."""
    if isinstance(idx, TypeAIndex):
        q = (
            Fraction(abs(idx.n))
            * (Fraction(p.d) + 2 * idx.j - Fraction(p.alpha) * _sgn(idx.n))
        )
        return q / (2 * Fraction(p.c))
    if isinstance(idx.shell.norm_sq, Fraction):
        return idx.shell.norm_sq / 2
    return None


def _record(p: ManifoldParams, idx: EigenIndex) -> EigenRecord:
    return EigenRecord(
        index=idx,
        lam=lambda_of(p, idx),
        mu=mu_of(p, idx),
        multiplicity=multiplicity_of(p, idx),
        is_kernel=is_kernel(p, idx),
    )


def _sort_key(rec: EigenRecord):
    idx = rec.index
    if isinstance(idx, TypeBIndex):
        return (rec.lam, 0, float(idx.shell.norm_sq), 0, 0)
    return (rec.lam, 1, abs(idx.n), -_sgn(idx.n), idx.j)


def _type_a_records(p: ManifoldParams, lambda_max: float, budget: int):
    """All non-kernel type (a) records with lambda <= lambda_max, plus the
    aggregated flat-family record when |alpha| = d."""
    out: list[EigenRecord] = []
    q_max = 2.0 * p.c * lambda_max / math.pi
    count = 0
    for s in (1, -1):
        a = p.d - p.alpha * s
        if a == 0.0:
            # infinite flat family: one aggregated record
            out.append(
                EigenRecord(
                    index=TypeAIndex(n=s, j=0),
                    lam=0.0,
                    mu=None,
                    multiplicity=math.inf,
                    is_kernel=True,
                )
            )
            j_start = 1
        else:
            j_start = 0
        m = 1
        while True:
            j = j_start
            emitted = False
            while True:
                lam = type_a_lambda(p, s * m, j)
                if lam > lambda_max:
                    break
                out.append(_record(p, TypeAIndex(n=s * m, j=j)))
                emitted = True
                count += 1
                if count > budget:
                    raise BudgetExceeded(
                        f"type (a) index count exceeds budget {budget}"
                    )
                j += 1
            if not emitted and m * (a + 2 * j_start) > q_max:
                break
            m += 1
    return out


def spectrum_stream(
    p: ManifoldParams,
    lambda_max: float,
    coalesce: bool = False,
    *,
    budget: int = DEFAULT_BUDGET,
):
    """All spectral records with lambda <= lambda_max, ascending.

    With ``coalesce`` records of equal eigenvalue are merged (exact
    descriptor keys when both sides have them, relative tolerance 1e-9
    otherwise, with tolerance-based cross-family merges flagged).
    """
    if lambda_max < 0:
        raise ValidationError("lambda_max must be nonnegative")
    records = _type_a_records(p, lambda_max, budget)
    norm_cut = 2.0 * lambda_max / math.pi
    for shell in enumerate_by_norm(p.dual_lattice, norm_cut, include_zero=True, budget=budget):
        rec = _record(p, TypeBIndex(shell))
        if rec.lam <= lambda_max:
            records.append(rec)
    records.sort(key=_sort_key)
    if not coalesce:
        return records
    return _coalesce(p, records)


def _coalesce(p: ManifoldParams, records: list[EigenRecord]) -> list[CoalescedLine]:
    lines: list[CoalescedLine] = []
    group: list[EigenRecord] = []
    group_keys: list[Fraction | None] = []

    def flush():
        if not group:
            return
        mult: int | float = 0
        for r in group:
            mult = mult + r.multiplicity
        families = {type(r.index) for r in group}
        inexact = any(k is None for k in group_keys)
        lines.append(
            CoalescedLine(
                lam=group[0].lam,
                multiplicity=mult,
                records=tuple(group),
                coincidence=(len(families) > 1 and inexact),
            )
        )

    for rec in records:
        key = _lambda_key(p, rec.index)
        if group:
            gkey = next((k for k in group_keys if k is not None), None)
            if key is not None and gkey is not None:
                same = key == gkey
            else:
                ref = group[-1].lam
                same = abs(rec.lam - ref) <= 1e-9 * max(abs(rec.lam), abs(ref), 1e-300)
            if same:
                group.append(rec)
                group_keys.append(key)
                continue
            flush()
            group, group_keys = [], []
        group.append(rec)
        group_keys.append(key)
    flush()
    return lines


def counting_function(
    p: ManifoldParams, lambda_max: float, *, budget: int = DEFAULT_BUDGET
) -> int:
    """Sum of multiplicities of non-kernel eigenvalues <= lambda_max."""
    total = 0
    for rec in spectrum_stream(p, lambda_max, budget=budget):
        if not rec.is_kernel:
            total += rec.multiplicity
    return total
