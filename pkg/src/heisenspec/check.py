"""Desk-scale invariant suite behind the ``check`` CLI command.

Every check is deterministic given the seed; reports are built from pure
values only (no timestamps), so identical configs produce byte-identical
output. The ``include-kernel`` sabotage knob is a negative control: it
reinstates kernel eigenvalues in the Schatten sum, which must break the
kernel-exclusion invariant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import __version__
from .green import (
    SpectralFunction,
    SpectralTerm,
    green_apply,
    l2_norm,
    monotonicity_check,
    operator_apply,
    ratio_bounded_verdict,
    Bounded,
    Unbounded,
    scale,
    sharp_constant,
    sobolev_gain_check,
    sobolev_norm,
)
from .lattice import (
    enumerate_by_norm,
    make_lattice,
    shell_count_upper_bound,
    zn_lattice,
)
from .schatten import (
    SchattenCutoffs,
    _type_a_terms,
    _type_b_terms,
    divergence_witness,
    schatten_partial,
    witness_growth_prediction,
)
from .spectrum import (
    ManifoldParams,
    TypeAIndex,
    TypeBIndex,
    is_kernel,
    kernel_type_a_indices,
    multiplicity_of,
    spectrum_stream,
    type_a_lambda,
    type_a_multiplicity,
)

SABOTAGE_MODES = ("include-kernel",)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _brute_force_shells(rows, norm_sq_max):
    """Box-scan oracle: exact shell counts from coefficient bounds given by
    the rows of the inverse Cholesky factor."""
    b = np.array([[float(v) for v in r] for r in rows], dtype=np.float64)
    g = b @ b.T
    r_up = np.linalg.cholesky(g).T
    rinv = np.linalg.inv(r_up)
    bounds = np.ceil(math.sqrt(float(norm_sq_max)) * np.linalg.norm(rinv, axis=1)).astype(int)
    grids = np.meshgrid(*[np.arange(-bb, bb + 1) for bb in bounds], indexing="ij")
    coeffs = np.stack([gg.ravel() for gg in grids], axis=1)
    gram_frac = [[sum(Fraction(a) * Fraction(bb) for a, bb in zip(ri, rj)) for rj in rows] for ri in rows]
    den = math.lcm(*(v.denominator for row in gram_frac for v in row))
    gn = np.array([[int(v * den) for v in row] for row in gram_frac], dtype=np.int64)
    nums = np.einsum("ij,jk,ik->i", coeffs, gn, coeffs)
    lim = Fraction(norm_sq_max) * den
    keep = nums <= (lim.numerator // lim.denominator)
    vals, counts = np.unique(nums[keep], return_counts=True)
    return [(Fraction(int(v), den), int(c)) for v, c in zip(vals, counts)]


def _sums_of_squares_counts(m, kmax):
    """r_m(k) for k <= kmax by theta-series convolution (independent of the
    search kernel)."""
    theta = np.zeros(kmax + 1, dtype=np.int64)
    a = 0
    while a * a <= kmax:
        theta[a * a] += 1 if a == 0 else 2
        a += 1
    out = np.zeros(kmax + 1, dtype=np.int64)
    out[0] = 1
    for _ in range(m):
        out = np.convolve(out, theta)[: kmax + 1]
    return out


def _random_rational_basis(rng, dim, scale_num=1):
    while True:
        rows = [
            [
                Fraction(scale_num * int(i == j), 1)
                + Fraction(int(rng.integers(-2, 3)), int(rng.integers(2, 5)))
                for j in range(dim)
            ]
            for i in range(dim)
        ]
        try:
            return make_lattice(rows)
        except Exception:
            continue


def _random_function(rng, pool, p, n_terms):
    terms = []
    used = set()
    for _ in range(n_terms):
        idx = pool[int(rng.integers(0, len(pool)))]
        slot = int(rng.integers(0, min(multiplicity_of(p, idx), 8)))
        if (idx, slot) in used:
            continue
        used.add((idx, slot))
        rad = math.sqrt(rng.uniform(0.0, 1.0))
        ang = rng.uniform(0.0, 2.0 * math.pi)
        terms.append(SpectralTerm(idx, slot, complex(rad * math.cos(ang), rad * math.sin(ang))))
    return SpectralFunction.from_terms(terms)


def _non_kernel_pool(p, lam_max=30.0):
    return [rec.index for rec in spectrum_stream(p, lam_max) if not rec.is_kernel]


def run_all(seed: int = 0, sabotage: str | None = None) -> list[CheckResult]:
    if sabotage is not None and sabotage not in SABOTAGE_MODES:
        raise ValueError(f"unknown sabotage mode {sabotage!r}")
    rng = np.random.default_rng(seed)
    results: list[CheckResult] = []

    def record(name, passed, detail=""):
        results.append(CheckResult(name=name, passed=bool(passed), detail=detail))

    # -- lattice ---------------------------------------------------------
    ok = True
    for _ in range(4):
        dim = int(rng.choice([2, 4]))
        basis = _random_rational_basis(rng, dim, scale_num=2)
        cutoff = Fraction(int(rng.integers(5, 20)))
        expected = _brute_force_shells(basis.rows, cutoff)
        got = [(s.norm_sq, s.count) for s in enumerate_by_norm(basis, cutoff)]
        ok = ok and got == expected
    record("lattice.enumeration_matches_box_oracle", ok)

    ok = True
    for d in (1, 2, 3):
        counts = _sums_of_squares_counts(2 * d, 20)
        shells = enumerate_by_norm(zn_lattice(2 * d), 20)
        by_k = {int(s.norm_sq): s.count for s in shells}
        for k in range(0, 21):
            ok = ok and by_k.get(k, 0) == int(counts[k])
    record("lattice.zn_shells_match_sums_of_squares", ok)

    basis = _random_rational_basis(rng, 4, scale_num=2)
    from .lattice import dual_lattice

    ok = dual_lattice(dual_lattice(basis)).rows == basis.rows
    tw = make_lattice([[2, 0], [0, 2]])
    ok = ok and dual_lattice(tw).rows == ((Fraction(1, 2), Fraction(0)), (Fraction(0), Fraction(1, 2)))
    record("lattice.dual_is_involution", ok)

    ok = True
    prev = 0.0
    z2 = zn_lattice(2)
    for radius in (0.0, 1.0, 2.0, 5.0, 10.0):
        bound = shell_count_upper_bound(z2, radius)
        exact = sum(
            s.count for s in enumerate_by_norm(z2, radius * radius)
        )
        ok = ok and bound >= exact and bound >= prev
        prev = bound
    record("lattice.count_bound_dominates_and_monotone", ok)

    # -- spectrum --------------------------------------------------------
    p0 = ManifoldParams(d=1, c=math.pi / 2, alpha=0.0, dual_lattice=z2)
    pk = ManifoldParams(d=1, c=math.pi / 2, alpha=1.0, dual_lattice=z2)
    p2 = ManifoldParams(d=2, c=1.0, alpha=1.0, dual_lattice=zn_lattice(4), big_l=3)

    ok = True
    for p in (p0, pk, p2):
        for s in (1, -1):
            for m in (1, 2, 5):
                for j in (0, 1, 4):
                    lam = type_a_lambda(p, s * m, j)
                    ok = ok and lam >= 0
                    ok = ok and (lam == 0) == is_kernel(p, TypeAIndex(s * m, j))
    record("spectrum.lambda_nonnegative_zero_iff_kernel", ok)

    ok = True
    for p in (p0, p2):
        raw = spectrum_stream(p, 12.0)
        lines = spectrum_stream(p, 12.0, coalesce=True)
        ok = ok and sum(r.multiplicity for r in raw) == sum(l.multiplicity for l in lines)
    record("spectrum.coalesce_preserves_total_multiplicity", ok)

    shells = enumerate_by_norm(z2, 2 * 12.0 / math.pi)
    stream_b = [r for r in spectrum_stream(p0, 12.0) if isinstance(r.index, TypeBIndex)]
    ok = [r.index.shell for r in stream_b] == [s for s in shells if (math.pi / 2) * float(s.norm_sq) <= 12.0]
    record("spectrum.type_b_records_agree_with_shells", ok)

    kern = kernel_type_a_indices(pk, 10)
    ok = len(kern) == 10 and all(is_kernel(pk, i) for i in kern)
    ok = ok and sum(type_a_multiplicity(pk, i.n, i.j) for i in kern) == sum(
        n**1 * pk.big_l for n in range(1, 11)
    )
    record("spectrum.kernel_family_multiplicity_growth", ok)

    # -- schatten --------------------------------------------------------
    ok = True
    for d in (1, 2):
        lat = zn_lattice(2 * d)
        for alpha in (0.0, d / 2, float(d)):
            pp = ManifoldParams(d=d, c=1.0, alpha=alpha, dual_lattice=lat)
            for r, expect in ((d + 0.5, False), (d + 1.0, False), (d + 1.25, True), (d + 2.0, True)):
                rep = schatten_partial(pp, r, SchattenCutoffs(15, 15, 10.0))
                ok = ok and rep.converges == expect
    record("schatten.threshold_r_gt_d_plus_1", ok)

    cut = SchattenCutoffs(20, 20, 16.0)
    rep = schatten_partial(p0, 3.0, cut)
    rep2 = schatten_partial(p0, 3.0, cut.doubled())
    ok = rep.partial_sum <= rep2.partial_sum <= rep.partial_sum + rep.tail_upper_bound
    record("schatten.certified_sandwich_under_doubling", ok)

    include = sabotage == "include-kernel"
    clean = schatten_partial(pk, 3.0, cut, include_kernel=include)
    polluted = schatten_partial(pk, 3.0, cut, include_kernel=True)
    record(
        "schatten.kernel_exclusion_changes_sum",
        clean.partial_sum != polluted.partial_sum,
        "negative control: sabotaged run must fail here" if include else "",
    )

    pa = ManifoldParams(d=2, c=1.0, alpha=1.5, dual_lattice=zn_lattice(4))
    pb = ManifoldParams(d=2, c=1.0, alpha=-1.5, dual_lattice=zn_lattice(4))
    ra = schatten_partial(pa, 4.0, cut)
    rb = schatten_partial(pb, 4.0, cut)
    record("schatten.alpha_sign_symmetry", ra.partial_sum == rb.partial_sum)

    terms = np.concatenate(
        [_type_a_terms(p0, 3.0, cut, False), _type_b_terms(p0, 3.0, cut, False, 10**7)]
    )
    perm = rng.permutation(len(terms))
    shuffled = math.fsum(terms[perm])
    straight = math.fsum(terms)
    rel = abs(shuffled - straight) / abs(straight)
    record("schatten.shuffled_summation_stable", rel <= 1e-12, f"rel={rel:.3e}")

    w1 = divergence_witness(p0, 2.0, 1000)
    w2 = divergence_witness(p0, 2.0, 10000)
    pred = witness_growth_prediction(p0, 2.0, 1000, 10000)
    record(
        "schatten.witness_monotone_log_growth",
        w2 > w1 and abs((w2 - w1) / pred - 1.0) < 0.05,
    )

    # -- green -----------------------------------------------------------
    ok = True
    for p in (p0, pk, p2):
        rep = sharp_constant(p, 200.0)
        ok = ok and abs(rep.numeric_sup - rep.closed_form) <= 1e-12 * rep.closed_form
    record("green.sharp_constant_numeric_matches_closed_form", ok)

    ok = True
    for p in (p0, p2):
        ok = ok and isinstance(ratio_bounded_verdict(p, 1.0, 6), Bounded)
        ok = ok and isinstance(ratio_bounded_verdict(p, 0.5, 6), Bounded)
        v = ratio_bounded_verdict(p, 1.5, 6)
        ok = ok and isinstance(v, Unbounded)
        ok = ok and all(v.witness[i][1] < v.witness[i + 1][1] for i in range(len(v.witness) - 1))
    record("green.ratio_bounded_iff_s_le_1", ok)

    record(
        "green.surrogate_monotone_on_grid",
        monotonicity_check(p0, range(1, 9), range(0, 9)),
    )

    pool0 = _non_kernel_pool(p0)
    ok = True
    for _ in range(100):
        f = _random_function(rng, pool0, p0, int(rng.integers(1, 20)))
        for s in (-2.0, 0.0, 1.0, 3.5):
            ok = ok and sobolev_gain_check(p0, f, s).holds
    arg = sharp_constant(p0, 100.0).argmax
    fa = SpectralFunction.from_terms([SpectralTerm(arg, 0, 1 + 0j)])
    gc = sobolev_gain_check(p0, fa, 2.0)
    ok = ok and gc.lhs >= (1 - 1e-9) * gc.rhs
    record("green.sobolev_gain_holds", ok)

    ok = True
    for _ in range(100):
        f = _random_function(rng, pool0, p0, int(rng.integers(1, 20)))
        back = operator_apply(p0, green_apply(p0, f))
        orig = {(t.index, t.slot): t.coeff for t in f.terms}
        got = {(t.index, t.slot): t.coeff for t in back.terms}
        ok = ok and set(orig) == set(got)
        for k, v in orig.items():
            ok = ok and abs(got[k] - v) <= 1e-15 * abs(v)
    kf = SpectralFunction.from_terms(
        [SpectralTerm(TypeAIndex(2, 0), 0, 1 + 2j), SpectralTerm(TypeAIndex(5, 0), 1, -1j)]
    )
    ok = ok and green_apply(pk, kf).terms == ()
    record("green.inverse_identity_off_kernel", ok)

    f = _random_function(rng, pool0, p0, 10)
    ok = True
    for k in (2.0, -0.5 + 1.25j):
        ga = green_apply(p0, scale(f, k))
        gb = scale(green_apply(p0, f), k)
        ok = ok and all(abs(a.coeff - b.coeff) <= 1e-15 * abs(b.coeff) for a, b in zip(ga.terms, gb.terms))
    ok = ok and abs(sobolev_norm(p0, scale(f, 3.0), 1.5) - 3.0 * sobolev_norm(p0, f, 1.5)) \
        <= 1e-12 * sobolev_norm(p0, f, 1.5)
    ok = ok and sobolev_norm(p0, f, 0.0) == l2_norm(f)
    record("green.scaling_linearity", ok)

    return results


def report_jsonable(seed: int, sabotage: str | None, results: list[CheckResult]) -> dict:
    return {
        "library": "heisenspec",
        "version": __version__,
        "seed": seed,
        "sabotage": sabotage,
        "all_passed": all(r.passed for r in results),
        "checks": [
            {"name": r.name, "passed": r.passed, "detail": r.detail} for r in results
        ],
    }
