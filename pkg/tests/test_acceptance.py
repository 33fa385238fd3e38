"""Acceptance suite: one test per criterion, each printing a PASS line.

The parameter grid throughout is d in {1,2,3}, alpha in {0, +-d/2, +-d},
c in {1, pi/2}, L in {1, 3}, with the dual lattice Z^{2d}.
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from heisenspec import (
    Bounded,
    ManifoldParams,
    SchattenCutoffs,
    SpectralFunction,
    SpectralTerm,
    TypeAIndex,
    TypeBIndex,
    Unbounded,
    divergence_witness,
    enumerate_by_norm,
    green_apply,
    make_lattice,
    monotonicity_check,
    multiplicity_of,
    operator_apply,
    ratio_bounded_verdict,
    schatten_partial,
    sharp_constant,
    sobolev_gain_check,
    spectrum_stream,
    witness_growth_prediction,
    zn_lattice,
)
from heisenspec.cli import main as cli_main
from heisenspec.schatten import _type_a_terms, _type_b_terms

from oracles import box_shells, sums_of_squares_counts

HALF_PI = math.pi / 2

GRID_D = (1, 2, 3)
GRID_C = (1.0, HALF_PI)
GRID_L = (1, 3)

LATTICE_CUT = {1: 100.0, 2: 64.0, 3: 32.0}


def grid_params():
    for d in GRID_D:
        lattice = zn_lattice(2 * d)
        for alpha_frac in (0.0, 0.5, -0.5, 1.0, -1.0):
            for c in GRID_C:
                for big_l in GRID_L:
                    yield ManifoldParams(
                        d=d, c=c, alpha=alpha_frac * d, dual_lattice=lattice, big_l=big_l
                    )


def cutoffs_for(p):
    return SchattenCutoffs(40, 40, LATTICE_CUT[p.d])


@pytest.fixture(scope="module")
def convergent_reports():
    out = []
    for p in grid_params():
        for r in (p.d + 1.25, p.d + 2.0):
            out.append((p, r, schatten_partial(p, r, cutoffs_for(p))))
    return out


def test_criterion_1_schatten_threshold(convergent_reports):
    t0 = time.time()
    for p, r, rep in convergent_reports:
        assert rep.converges, (p.d, p.alpha, r)
        assert rep.tail_upper_bound < math.inf

    n_grid = (10**3, 10**4, 10**5)
    for p in grid_params():
        for r in (p.d + 0.5, p.d + 1.0):
            rep = schatten_partial(p, r, cutoffs_for(p))
            assert not rep.converges, (p.d, p.alpha, r)
            assert rep.tail_upper_bound == math.inf
            witnesses = [divergence_witness(p, r, n) for n in n_grid]
            assert witnesses[0] < witnesses[1] < witnesses[2]
            for (n1, w1), (n2, w2) in zip(
                zip(n_grid, witnesses), zip(n_grid[1:], witnesses[1:])
            ):
                predicted = witness_growth_prediction(p, r, n1, n2)
                assert abs((w2 - w1) / predicted - 1.0) < 0.05, (p.d, p.alpha, r)
    elapsed = time.time() - t0
    assert elapsed < 300.0, f"criterion 1 exceeded 5 minutes ({elapsed:.1f}s)"
    print(f"\nACCEPTANCE 1 (Schatten threshold iff r > d+1, {elapsed:.1f}s): PASS")


def test_criterion_2_certified_sandwich(convergent_reports):
    for p, r, rep in convergent_reports:
        fine = schatten_partial(p, r, rep.cutoffs.doubled())
        assert rep.partial_sum <= fine.partial_sum, (p.d, p.alpha, r)
        assert fine.partial_sum <= rep.partial_sum + rep.tail_upper_bound, (p.d, p.alpha, r)
    print("\nACCEPTANCE 2 (certified sandwich under cutoff doubling): PASS")


def _expected_candidates(p):
    """Closed-form candidate values evaluated directly from the stated
    formulas (independent of the library path)."""
    d, c, aa = p.d, p.c, abs(p.alpha)
    lattice_cand = math.sqrt(1 + HALF_PI) / HALF_PI  # |xi_0|^2 = 1 on Z^{2d}
    if aa == d:
        a1 = math.sqrt(1 + (math.pi / (2 * c)) * (d + 2) + math.pi**2 / (4 * c * c)) / (
            math.pi / c
        )
        a2 = math.sqrt(1 + (math.pi / (2 * c)) * d + math.pi**2 / (4 * c * c)) / (
            math.pi * d / c
        )
        type_a = max(a1, a2)
    else:
        type_a = math.sqrt(
            1 + (math.pi / (2 * c)) * d + math.pi**2 / (4 * c * c)
        ) / ((math.pi / (2 * c)) * (d - aa))
    return type_a, lattice_cand


def test_criterion_3_sharp_constant():
    for p in grid_params():
        rep = sharp_constant(p, 1000.0)
        assert abs(rep.numeric_sup - rep.closed_form) <= 1e-12 * rep.closed_form
        type_a, lattice_cand = _expected_candidates(p)
        assert rep.closed_form == pytest.approx(max(type_a, lattice_cand), rel=1e-13)
        if type_a > lattice_cand:
            assert isinstance(rep.argmax, TypeAIndex)
            assert abs(rep.argmax.n) == 1
            assert rep.argmax.j == (1 if abs(p.alpha) == p.d else 0)
        else:
            assert isinstance(rep.argmax, TypeBIndex)
            assert rep.argmax.shell.norm_sq == 1

    canon = ManifoldParams(d=1, c=HALF_PI, alpha=0.0, dual_lattice=zn_lattice(2))
    rep = sharp_constant(canon, 1000.0)
    assert rep.closed_form == pytest.approx(math.sqrt(3.0), rel=1e-15)
    print("\nACCEPTANCE 3 (sharp constant: numeric sup == closed form): PASS")


def _random_function(rng, pool, p, max_terms=50):
    used = set()
    terms = []
    for _ in range(int(rng.integers(1, max_terms + 1))):
        idx = pool[int(rng.integers(0, len(pool)))]
        slot = int(rng.integers(0, min(multiplicity_of(p, idx), 8)))
        if (idx, slot) in used:
            continue
        used.add((idx, slot))
        rad = math.sqrt(rng.uniform(0, 1))
        ang = rng.uniform(0, 2 * math.pi)
        terms.append(
            SpectralTerm(idx, slot, complex(rad * math.cos(ang), rad * math.sin(ang)))
        )
    return SpectralFunction.from_terms(terms)


GAIN_CASES = [
    dict(d=1, c=HALF_PI, alpha=0.0, big_l=1, count=1000),
    dict(d=1, c=1.0, alpha=1.0, big_l=3, count=200),
    dict(d=2, c=HALF_PI, alpha=-1.0, big_l=3, count=200),
    dict(d=3, c=1.0, alpha=1.5, big_l=1, count=200),
]


def test_criterion_4_sobolev_gain():
    s_values = (-2.0, 0.0, 1.0, 3.5)
    rng = np.random.default_rng(2024)
    for case in GAIN_CASES:
        count = case.pop("count")
        p = ManifoldParams(dual_lattice=zn_lattice(2 * case["d"]), **case)
        case["count"] = count
        pool = [r.index for r in spectrum_stream(p, 30.0) if not r.is_kernel]
        for _ in range(count):
            f = _random_function(rng, pool, p)
            for s in s_values:
                lhs, rhs, holds = sobolev_gain_check(p, f, s)
                assert holds, (case, s)
                assert lhs <= rhs * (1 + 1e-12)
        rep = sharp_constant(p, 100.0)
        concentrated = SpectralFunction.from_terms([SpectralTerm(rep.argmax, 0, 1 + 0j)])
        for s in s_values:
            lhs, rhs, _ = sobolev_gain_check(p, concentrated, s)
            assert lhs >= (1 - 1e-9) * rhs
    print("\nACCEPTANCE 4 (Sobolev gain on 1000+ random functions): PASS")


def test_criterion_5_ratio_boundedness():
    for p in grid_params():
        for s in (0.5, 1.0):
            assert isinstance(ratio_bounded_verdict(p, s, 6), Bounded), (p.d, p.alpha, s)
        for s in (1.01, 1.5, 2.0):
            verdict = ratio_bounded_verdict(p, s, 6)
            assert isinstance(verdict, Unbounded), (p.d, p.alpha, s)
            vals = [w for _, w in verdict.witness]
            assert all(vals[i] < vals[i + 1] for i in range(len(vals) - 1)), (
                p.d,
                p.alpha,
                s,
            )
    print("\nACCEPTANCE 5 (ratio bounded iff s <= 1, witnesses increase): PASS")


def test_criterion_6_monotonicity():
    xs = range(1, 21)
    ys = range(0, 20)
    for p in grid_params():
        if abs(p.alpha) >= p.d:
            continue
        assert monotonicity_check(p, xs, ys), (p.d, p.alpha, p.c)
    print("\nACCEPTANCE 6 (surrogate monotone on 20x20 grids): PASS")


def test_criterion_7_lattice_oracle_equivalence():
    rng = np.random.default_rng(777)
    specs = [(2, 1)] * 6 + [(2, 2)] * 4 + [(4, 2)] * 8 + [(6, 3)] * 5 + [(8, 6)] * 2
    assert len(specs) == 25
    done = 0
    for dim, scl in specs:
        while True:
            rows = [
                [
                    Fraction(scl * int(i == j))
                    + Fraction(int(rng.integers(-2, 3)), int(rng.integers(2, 5)))
                    for j in range(dim)
                ]
                for i in range(dim)
            ]
            try:
                basis = make_lattice(rows)
                break
            except Exception:
                continue
        cutoff = Fraction(int(rng.integers(30, 51)))
        expected = box_shells(basis.rows, cutoff)
        got = [(s.norm_sq, s.count) for s in enumerate_by_norm(basis, cutoff)]
        assert got == expected, (dim, scl)
        done += 1
    assert done == 25

    for d in (1, 2, 3):
        counts = sums_of_squares_counts(2 * d, 20)
        by_k = {int(s.norm_sq): s.count for s in enumerate_by_norm(zn_lattice(2 * d), 20)}
        for k in range(21):
            assert by_k.get(k, 0) == counts[k]
    print("\nACCEPTANCE 7 (enumeration matches box oracle, r_{2d}(k) counts): PASS")


def test_criterion_8_inverse_identity():
    rng = np.random.default_rng(4096)
    cases = [
        ManifoldParams(d=1, c=HALF_PI, alpha=0.0, dual_lattice=zn_lattice(2)),
        ManifoldParams(d=2, c=1.0, alpha=2.0, dual_lattice=zn_lattice(4), big_l=2),
    ]
    for p in cases:
        pool = [r.index for r in spectrum_stream(p, 30.0) if not r.is_kernel]
        for _ in range(500):
            f = _random_function(rng, pool, p)
            back = operator_apply(p, green_apply(p, f))
            orig = {(t.index, t.slot): t.coeff for t in f.terms}
            got = {(t.index, t.slot): t.coeff for t in back.terms}
            assert set(got) == set(orig)
            for key, val in orig.items():
                assert abs(got[key] - val) <= 1e-15 * abs(val)

    pk = cases[1]
    zero_shell = enumerate_by_norm(pk.dual_lattice, 0, include_zero=True)[0]
    kernel_f = SpectralFunction.from_terms(
        [
            SpectralTerm(TypeBIndex(zero_shell), 0, 1 + 1j),
            SpectralTerm(TypeAIndex(1, 0), 0, 2 - 1j),
            SpectralTerm(TypeAIndex(4, 0), 3, 0.5j),
        ]
    )
    assert green_apply(pk, kernel_f).terms == ()
    assert operator_apply(pk, kernel_f).terms == ()
    print("\nACCEPTANCE 8 (operator o green == identity off kernel): PASS")


def test_criterion_9_determinism(capsys):
    code1 = cli_main(["check", "--seed", "7", "--format", "json"])
    out1 = capsys.readouterr().out
    code2 = cli_main(["check", "--seed", "7", "--format", "json"])
    out2 = capsys.readouterr().out
    assert code1 == code2 == 0
    assert out1.encode() == out2.encode()

    p = ManifoldParams(d=2, c=1.0, alpha=1.0, dual_lattice=zn_lattice(4))
    cut = SchattenCutoffs(40, 40, 30.0)
    rep = schatten_partial(p, 4.0, cut)
    terms = np.concatenate(
        [_type_a_terms(p, 4.0, cut, False), _type_b_terms(p, 4.0, cut, False, 10**7)]
    )
    rng = np.random.default_rng(55)
    for _ in range(5):
        shuffled = math.fsum(terms[rng.permutation(len(terms))])
        assert abs(shuffled - rep.partial_sum) <= 1e-12 * abs(rep.partial_sum)
    print("\nACCEPTANCE 9 (byte-identical check reports, order-free sums): PASS")
