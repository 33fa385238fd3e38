"""Green operator on spectral coefficient vectors, Sobolev norms, and the
sharp one-derivative gain constant.

Functions are finite coefficient vectors on the abstract orthonormal
eigenbasis: each term addresses an eigenspace (by its index) and a slot
below its multiplicity. The Green operator divides coefficients by the
eigenvalue off the kernel and annihilates the kernel.

The gain constant is the supremum of (1 + mu)^{1/2} / lambda over the
nonzero spectrum. It is computed two ways: in closed form from the two
candidate indices (minimal ladder index of the small-denominator sign, and
the shortest dual-lattice vector), certified by the monotonicity of the
ratio surrogate in both ladder coordinates and in the shell norm; and as a
numeric supremum over an enumerated stretch of the spectrum, which must
agree to near machine precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Union

from .errors import (
    BudgetExceeded,
    FunctionFormatError,
    InvalidGrid,
    KernelIndex,
    ProbeTooSmall,
    ValidationError,
)
from .lattice import (
    DEFAULT_BUDGET,
    Shell,
    enumerate_by_norm,
    minimal_vector,
    shell_count_upper_bound,
)
from .spectrum import (
    EigenIndex,
    ManifoldParams,
    TypeAIndex,
    TypeBIndex,
    is_kernel,
    lambda_of,
    mu_of,
    multiplicity_of,
)


@dataclass(frozen=True)
class SpectralTerm:
    index: EigenIndex
    slot: int
    coeff: complex


@dataclass(frozen=True)
class SpectralFunction:
    """Finite spectral coefficient vector; (index, slot) pairs distinct."""

    terms: tuple[SpectralTerm, ...]

    @classmethod
    def from_terms(cls, terms) -> "SpectralFunction":
        return cls(terms=tuple(terms))

    def __len__(self) -> int:
        return len(self.terms)


def validate_function(p: ManifoldParams, f: SpectralFunction) -> None:
    seen = set()
    for k, t in enumerate(f.terms):
        if t.slot < 0:
            raise ValidationError(f"term {k}: slot must be nonnegative")
        mult = multiplicity_of(p, t.index)
        if t.slot >= mult:
            raise ValidationError(
                f"term {k}: slot {t.slot} >= multiplicity {mult}"
            )
        key = (t.index, t.slot)
        if key in seen:
            raise ValidationError(f"term {k}: duplicate (index, slot)")
        seen.add(key)


def l2_norm(f: SpectralFunction) -> float:
    """Parseval: sqrt of the sum of squared coefficient moduli."""
    return math.sqrt(math.fsum(abs(t.coeff) ** 2 for t in f.terms))


def sobolev_norm(p: ManifoldParams, f: SpectralFunction, s: float) -> float:
    """|| (I + L)^{s/2} f ||_{L^2} with the metric Laplacian at epsilon = 1."""
    return math.sqrt(
        math.fsum(
            (1.0 + mu_of(p, t.index, epsilon=1.0)) ** s * abs(t.coeff) ** 2
            for t in f.terms
        )
    )


def green_apply(p: ManifoldParams, f: SpectralFunction) -> SpectralFunction:
    """Divide by the eigenvalue off the kernel; kernel terms map to zero."""
    validate_function(p, f)
    out = []
    for t in f.terms:
        if is_kernel(p, t.index):
            continue
        out.append(SpectralTerm(t.index, t.slot, t.coeff / lambda_of(p, t.index)))
    return SpectralFunction(terms=tuple(out))


def operator_apply(p: ManifoldParams, f: SpectralFunction) -> SpectralFunction:
    """Multiply by the eigenvalue (kernel terms are annihilated)."""
    validate_function(p, f)
    out = []
    for t in f.terms:
        if is_kernel(p, t.index):
            continue
        out.append(SpectralTerm(t.index, t.slot, t.coeff * lambda_of(p, t.index)))
    return SpectralFunction(terms=tuple(out))


def scale(f: SpectralFunction, k: complex) -> SpectralFunction:
    return SpectralFunction(
        terms=tuple(SpectralTerm(t.index, t.slot, k * t.coeff) for t in f.terms)
    )


def ratio(p: ManifoldParams, idx: EigenIndex, s: float) -> float:
    """(1 + mu)^{s/2} / lambda at a nonzero eigenvalue."""
    if is_kernel(p, idx):
        raise KernelIndex(f"ratio undefined on the kernel: {idx}")
    return (1.0 + mu_of(p, idx, epsilon=1.0)) ** (s / 2.0) / lambda_of(p, idx)


# --- sharp constant ----------------------------------------------------------


@dataclass(frozen=True)
class ConstantReport:
    closed_form: float
    numeric_sup: float
    argmax: EigenIndex
    candidates: tuple[tuple[EigenIndex, float], ...]


def _candidate_indices(p: ManifoldParams) -> list[EigenIndex]:
    """Where the s = 1 ratio can attain its sup.

    For |alpha| < d: the minimal ladder index with the small denominator,
    (|n| = 1, j = 0, sgn n = sgn alpha). For |alpha| = d that index is
    kernel; the two survivors (1, j=1) along sgn alpha and (1, j=0) against
    it are both evaluated rather than trusting which one dominates. The
    lattice candidate is always the shortest nonzero dual vector.
    """
    out: list[EigenIndex] = []
    s_star = 1 if p.alpha >= 0 else -1
    if abs(p.alpha) == p.d:
        out.append(TypeAIndex(n=s_star, j=1))
        out.append(TypeAIndex(n=-s_star, j=0))
    else:
        out.append(TypeAIndex(n=s_star, j=0))
    out.append(TypeBIndex(minimal_vector(p.dual_lattice)))
    return out


def closed_form_constant(p: ManifoldParams) -> float:
    """Sharp gain constant from the candidate indices alone."""
    return max(ratio(p, idx, 1.0) for idx in _candidate_indices(p))


def _shell_probe(p: ManifoldParams, lambda_max: float, budget: int) -> list[Shell]:
    """Nonzero shells entering a ratio probe.

    The shell cutoff is capped so the enumeration stays within budget;
    since the shell ratio decreases in the norm, truncating deep shells
    cannot change the supremum once the first shell is present.
    """
    norm_cut = 2.0 * lambda_max / math.pi
    first = minimal_vector(p.dual_lattice, budget=budget)
    lo, hi = float(first.norm_sq), norm_cut
    if hi <= lo:
        return [first]
    while shell_count_upper_bound(p.dual_lattice, math.sqrt(hi)) > budget and hi > lo:
        hi = max(lo, hi / 2.0)
    shells = enumerate_by_norm(p.dual_lattice, hi, include_zero=False, budget=budget)
    return list(shells) if shells else [first]


def sharp_constant(
    p: ManifoldParams,
    lambda_max_probe: float,
    *,
    budget: int = DEFAULT_BUDGET,
) -> ConstantReport:
    """Closed-form constant versus numeric sup over the probed spectrum.

    Raises ProbeTooSmall when the probe excludes a candidate index, since
    then the numeric sup cannot witness the closed form.
    """
    candidates = [(idx, ratio(p, idx, 1.0)) for idx in _candidate_indices(p)]
    needed = max(lambda_of(p, idx) for idx, _ in candidates)
    if lambda_max_probe < needed:
        raise ProbeTooSmall(
            f"probe lambda_max={lambda_max_probe} excludes a candidate at "
            f"lambda={needed}"
        )
    closed = max(v for _, v in candidates)

    best_val = -math.inf
    best_idx: EigenIndex | None = None
    for idx in _probe_indices(p, lambda_max_probe, budget):
        v = ratio(p, idx, 1.0)
        if v > best_val:
            best_val, best_idx = v, idx
    assert best_idx is not None
    return ConstantReport(
        closed_form=closed,
        numeric_sup=best_val,
        argmax=best_idx,
        candidates=tuple(candidates),
    )


def _probe_indices(p: ManifoldParams, lambda_max: float, budget: int):
    """Non-kernel indices with lambda <= lambda_max (shells budget-capped)."""
    q_max = 2.0 * p.c * lambda_max / math.pi
    count = 0
    for s in (1, -1):
        a = p.d - p.alpha * s
        j_start = 1 if a == 0.0 else 0
        m = 1
        while True:
            j = j_start
            emitted = False
            while True:
                idx = TypeAIndex(n=s * m, j=j)
                if lambda_of(p, idx) > lambda_max:
                    break
                yield idx
                emitted = True
                count += 1
                if count > budget:
                    raise BudgetExceeded(f"probe index count exceeds budget {budget}")
                j += 1
            if not emitted and m * (a + 2 * j_start) > q_max:
                break
            m += 1
    for shell in _shell_probe(p, lambda_max, budget):
        if type_b_lambda_ok(p, shell, lambda_max):
            yield TypeBIndex(shell)


def type_b_lambda_ok(p: ManifoldParams, shell: Shell, lambda_max: float) -> bool:
    return (math.pi / 2.0) * float(shell.norm_sq) <= lambda_max


# --- boundedness of the ratio sequence --------------------------------------


@dataclass(frozen=True)
class Bounded:
    sup: float
    certified_upper: float


@dataclass(frozen=True)
class Unbounded:
    """Witness pairs (|n|, ratio) along j = 0 against the sign of alpha."""

    witness: tuple[tuple[int, float], ...]


RatioVerdict = Union[Bounded, Unbounded]


def _witness_start(p: ManifoldParams, s: float) -> int:
    """Smallest power of two past the turning point of the witness ratio.

    Along the subsequence (|n| = m, j = 0, sgn n chosen against alpha) the
    ratio is g(m) = (1 + B m + C m^2)^{s/2} / (A m) with B = pi d/(2c),
    C = pi^2/(4c^2), A = pi (d+|alpha|)/(2c). g'(m) > 0 exactly when
    C(s-1) m^2 + B(s/2-1) m - 1 > 0, so for s > 1 the sequence increases
    strictly from the positive root onward.
    """
    b = math.pi * p.d / (2.0 * p.c)
    cc = math.pi**2 / (4.0 * p.c * p.c)
    qa = cc * (s - 1.0)
    qb = b * (s / 2.0 - 1.0)
    disc = qb * qb + 4.0 * qa
    m_star = (-qb + math.sqrt(disc)) / (2.0 * qa)
    k0 = 1
    while 2.0**k0 <= m_star:
        k0 += 1
    return k0


def ratio_bounded_verdict(
    p: ManifoldParams,
    s: float,
    probe_depth: int,
    *,
    family: str = "all",
    budget: int = DEFAULT_BUDGET,
) -> RatioVerdict:
    """Boundedness of {(1 + mu)^{s/2} / lambda} over the chosen family.

    Over the full spectrum the sequence is bounded iff s <= 1; restricted
    to the lattice family alone the threshold is s <= 2 (there mu equals
    lambda). For bounded s the numeric sup over a probe is returned with a
    certified upper bound (the ratio is at most C_alpha * (1+mu)^{(s-1)/2}
    <= C_alpha for s <= 1; on the lattice family the shell ratio decreases,
    so the first-shell value is exact). For unbounded s the witness
    subsequence j = 0, sgn n against alpha is evaluated at |n| = 2^k from
    the certified turning point on, which makes it strictly increasing.
    """
    if probe_depth < 1:
        raise ValidationError("probe_depth must be >= 1")
    if family not in ("all", "type_a", "type_b"):
        raise ValidationError(f"unknown family {family!r}")
    threshold = 2.0 if family == "type_b" else 1.0

    if s > threshold:
        if family == "type_b":
            # shell ratio (1+u)^{s/2}/u increases for u > 2/(s-2); witness
            # with the first shells past that turning point
            t_star = 2.0 * (2.0 / (s - 2.0)) / math.pi
            first = float(minimal_vector(p.dual_lattice).norm_sq)
            cutoff = max(t_star, first) + (probe_depth + 1) * max(first, 1.0)
            shells = enumerate_by_norm(
                p.dual_lattice, cutoff, include_zero=False, budget=budget
            )
            past = [sh for sh in shells if float(sh.norm_sq) > t_star]
            wit = tuple(
                (k, ratio(p, TypeBIndex(sh), s))
                for k, sh in enumerate(past[: probe_depth + 1], start=1)
            )
            return Unbounded(witness=wit)
        s_w = -1 if p.alpha >= 0 else 1
        k0 = _witness_start(p, s)
        wit = tuple(
            (2**k, ratio(p, TypeAIndex(n=s_w * 2**k, j=0), s))
            for k in range(k0, k0 + probe_depth)
        )
        return Unbounded(witness=wit)

    lam_probe = (math.pi / (2.0 * p.c)) * (2.0**probe_depth) * (2 * p.d + 2)
    sup = -math.inf
    for idx in _probe_indices(p, lam_probe, budget):
        if family == "type_a" and not isinstance(idx, TypeAIndex):
            continue
        if family == "type_b" and not isinstance(idx, TypeBIndex):
            continue
        sup = max(sup, ratio(p, idx, s))
    cert = closed_form_constant(p)
    if family == "type_b":
        cert = ratio(p, TypeBIndex(minimal_vector(p.dual_lattice)), s)
    return Bounded(sup=sup, certified_upper=max(cert, sup))


# --- monotonicity of the ratio surrogate -------------------------------------


def _surrogate(p: ManifoldParams, x: float, y: float) -> float:
    """f(x, y) = (1 + (pi x/(2c))(d+2y) + pi^2 x^2/(4c^2))
    / ((pi^2 x^2/(4c^2)) (d + 2y - |alpha|)^2), the squared s = 1 ratio
    with (x, y) continuous stand-ins for (|n|, j)."""
    c, d, aa = p.c, p.d, abs(p.alpha)
    num = 1.0 + (math.pi * x / (2.0 * c)) * (d + 2.0 * y) + math.pi**2 * x * x / (4.0 * c * c)
    den = (math.pi**2 * x * x / (4.0 * c * c)) * (d + 2.0 * y - aa) ** 2
    return num / den


def _surrogate_dx(p: ManifoldParams, x: float, y: float) -> float:
    """Closed-form x-partial: -2c((pi d + 2 pi y)x + 4c)
    / (pi^2 (d + 2y - |alpha|)^2 x^3)."""
    c, d, aa = p.c, p.d, abs(p.alpha)
    return -2.0 * c * ((math.pi * d + 2.0 * math.pi * y) * x + 4.0 * c) / (
        math.pi**2 * (d + 2.0 * y - aa) ** 2 * x**3
    )


def _surrogate_dy(p: ManifoldParams, x: float, y: float) -> float:
    """Closed-form y-partial: -4(2 pi c x y + pi^2 x^2 + pi c (d + |alpha|) x
    + 4c^2) / (pi^2 x^2 (d + 2y - |alpha|)^3)."""
    c, d, aa = p.c, p.d, abs(p.alpha)
    return -4.0 * (
        2.0 * math.pi * c * x * y
        + math.pi**2 * x * x
        + math.pi * c * (d + aa) * x
        + 4.0 * c * c
    ) / (math.pi**2 * x * x * (d + 2.0 * y - aa) ** 3)


def monotonicity_check(p: ManifoldParams, xs, ys, h: float = 1e-5) -> bool:
    """Verify the ratio surrogate decreases along both grid axes.

    Checks (i) f is nonincreasing along rows and columns of the grid,
    (ii) both closed-form partial derivatives are negative at every grid
    point, and (iii) they match central finite differences within
    max(1e-6, 1e-4 * |value|).
    """
    xs = [float(v) for v in xs]
    ys = [float(v) for v in ys]
    if not xs or not ys:
        raise InvalidGrid("grid must be nonempty")
    if any(v <= 0 for v in xs) or any(v < 0 for v in ys):
        raise InvalidGrid("grid needs x > 0 and y >= 0")
    if abs(p.alpha) >= p.d:
        raise InvalidGrid("surrogate monotonicity needs |alpha| < d")
    if sorted(xs) != xs or sorted(ys) != ys:
        raise InvalidGrid("grid axes must be increasing")

    vals = [[_surrogate(p, x, y) for y in ys] for x in xs]
    for i, x in enumerate(xs):
        for k, y in enumerate(ys):
            v = vals[i][k]
            if i + 1 < len(xs) and vals[i + 1][k] > v:
                return False
            if k + 1 < len(ys) and vals[i][k + 1] > v:
                return False
            dx = _surrogate_dx(p, x, y)
            dy = _surrogate_dy(p, x, y)
            if not (dx < 0 and dy < 0):
                return False
            fd_x = (_surrogate(p, x + h, y) - _surrogate(p, x - h, y)) / (2 * h)
            fd_y = (_surrogate(p, x, y + h) - _surrogate(p, x, y - h)) / (2 * h)
            if abs(fd_x - dx) > max(1e-6, 1e-4 * abs(dx)):
                return False
            if abs(fd_y - dy) > max(1e-6, 1e-4 * abs(dy)):
                return False
    return True


# --- the gain inequality ------------------------------------------------------


class GainCheck(NamedTuple):
    lhs: float
    rhs: float
    holds: bool


def sobolev_gain_check(p: ManifoldParams, f: SpectralFunction, s: float) -> GainCheck:
    """||G f||_{s+1} against C_alpha ||f||_s with slack 1 + 1e-12."""
    lhs = sobolev_norm(p, green_apply(p, f), s + 1.0)
    rhs = closed_form_constant(p) * sobolev_norm(p, f, s)
    return GainCheck(lhs=lhs, rhs=rhs, holds=lhs <= rhs * (1.0 + 1e-12))


# --- file format --------------------------------------------------------------
#
# {"terms": [{"kind": "A", "n": 1, "j": 0, "slot": 0, "re": 1.0, "im": 0.0},
#            {"kind": "B", "normSq": "1/2", "slot": 0, "re": 0.0, "im": 1.0}]}
# Rational shell norms round-trip as "p/q" strings.


def _shell_for_norm(p: ManifoldParams, norm_sq, ordinal: int) -> Shell:
    if norm_sq == 0:
        return enumerate_by_norm(p.dual_lattice, 0, include_zero=True)[0]
    shells = enumerate_by_norm(p.dual_lattice, norm_sq, include_zero=True)
    for sh in shells:
        if isinstance(sh.norm_sq, Fraction) and isinstance(norm_sq, Fraction):
            if sh.norm_sq == norm_sq:
                return sh
        else:
            a, b = float(sh.norm_sq), float(norm_sq)
            if abs(a - b) <= 1e-9 * max(abs(a), abs(b), 1e-300):
                return sh
    raise FunctionFormatError(
        f"term {ordinal}: no dual-lattice shell at normSq={norm_sq}"
    )


def function_to_jsonable(f: SpectralFunction) -> dict:
    from .lattice import entry_to_jsonable

    terms = []
    for t in f.terms:
        if isinstance(t.index, TypeAIndex):
            terms.append(
                {
                    "kind": "A",
                    "n": t.index.n,
                    "j": t.index.j,
                    "slot": t.slot,
                    "re": float(t.coeff.real),
                    "im": float(t.coeff.imag),
                }
            )
        else:
            terms.append(
                {
                    "kind": "B",
                    "normSq": entry_to_jsonable(t.index.shell.norm_sq),
                    "slot": t.slot,
                    "re": float(t.coeff.real),
                    "im": float(t.coeff.imag),
                }
            )
    return {"terms": terms}


def function_from_jsonable(doc: dict, p: ManifoldParams) -> SpectralFunction:
    from .lattice import entry_from_jsonable

    if not isinstance(doc, dict) or not isinstance(doc.get("terms"), list):
        raise FunctionFormatError("function document must contain a 'terms' list")
    out = []
    for k, td in enumerate(doc["terms"]):
        try:
            kind = td["kind"]
            slot = int(td["slot"])
            coeff = complex(float(td["re"]), float(td["im"]))
            if kind == "A":
                idx: EigenIndex = TypeAIndex(n=int(td["n"]), j=int(td["j"]))
            elif kind == "B":
                norm_sq = entry_from_jsonable(td["normSq"])
                idx = TypeBIndex(_shell_for_norm(p, norm_sq, k))
            else:
                raise FunctionFormatError(f"term {k}: unknown kind {kind!r}")
        except FunctionFormatError:
            raise
        except (KeyError, TypeError, ValueError, ValidationError) as exc:
            raise FunctionFormatError(f"term {k}: {exc}") from exc
        out.append(SpectralTerm(index=idx, slot=slot, coeff=coeff))
    f = SpectralFunction(terms=tuple(out))
    try:
        validate_function(p, f)
    except ValidationError as exc:
        raise FunctionFormatError(str(exc)) from exc
    return f
