import math

import pytest

from heisenspec import (
    ManifoldParams,
    TypeAIndex,
    TypeBIndex,
    ValidationError,
    counting_function,
    enumerate_by_norm,
    is_kernel,
    kernel_type_a_indices,
    make_lattice,
    mu_of,
    spectrum_stream,
    type_a_lambda,
    type_a_multiplicity,
    type_b_lambda,
    zn_lattice,
)

HALF_PI = math.pi / 2


def params(d=1, c=HALF_PI, alpha=0.0, big_l=1, epsilon=1.0, lattice=None):
    return ManifoldParams(
        d=d,
        c=c,
        alpha=alpha,
        dual_lattice=lattice if lattice is not None else zn_lattice(2 * d),
        big_l=big_l,
        epsilon=epsilon,
    )


class TestParams:
    def test_alpha_range_enforced(self):
        with pytest.raises(ValidationError):
            params(d=1, alpha=1.5)

    def test_dimension_mismatch(self):
        with pytest.raises(ValidationError):
            params(d=2, lattice=zn_lattice(2))

    def test_positive_constraints(self):
        with pytest.raises(ValidationError):
            params(c=0.0)
        with pytest.raises(ValidationError):
            params(big_l=0)
        with pytest.raises(ValidationError):
            params(epsilon=0.0)


class TestEigenvalueFormulas:
    def test_unit_scaling(self):
        # c = pi/2 makes pi/(2c) = 1
        assert type_a_lambda(params(), 1, 0) == 1.0

    def test_kernel_value_at_alpha_d(self):
        assert type_a_lambda(params(alpha=1.0), 1, 0) == 0.0

    def test_direct_substitution(self):
        p = params(d=2, alpha=-1.0)
        assert type_a_lambda(p, -3, 1) == pytest.approx(9.0, rel=1e-15)

    def test_multiplicities(self):
        assert type_a_multiplicity(params(d=2), 2, 1) == 8
        assert type_a_multiplicity(params(d=1, big_l=5), -3, 7) == 15
        assert type_a_multiplicity(params(d=3, big_l=2), 1, 2) == 12

    def test_type_b_lambda(self):
        one = enumerate_by_norm(zn_lattice(2), 1, include_zero=True)
        zero_shell, first = one[0], one[1]
        assert type_b_lambda(first) == pytest.approx(HALF_PI, rel=1e-15)
        assert type_b_lambda(zero_shell) == 0.0
        four = enumerate_by_norm(zn_lattice(2), 4)[-1]
        assert four.norm_sq == 4
        assert type_b_lambda(four) == pytest.approx(2 * math.pi, rel=1e-15)

    def test_mu_values(self):
        assert mu_of(params(), TypeAIndex(1, 0)) == 2.0
        two = enumerate_by_norm(zn_lattice(2), 2)[-1]
        assert mu_of(params(), TypeBIndex(two)) == pytest.approx(math.pi, rel=1e-15)
        p = params(d=2, alpha=0.0)
        assert mu_of(p, TypeAIndex(-2, 0)) == pytest.approx(8.0, rel=1e-15)

    def test_mu_epsilon_override(self):
        p = params(epsilon=2.0)
        assert mu_of(p, TypeAIndex(1, 0)) == pytest.approx(3.0)
        assert mu_of(p, TypeAIndex(1, 0), epsilon=1.0) == pytest.approx(2.0)

    def test_joint_spectrum_consistency(self):
        # at alpha = 0 the operator eigenvalue equals the first joint
        # coordinate, which is mu at the internal check value eps = 0
        p = params(d=2, alpha=0.0)
        for n in (1, -2, 3):
            for j in (0, 1, 5):
                assert mu_of(p, TypeAIndex(n, j), epsilon=0.0) == type_a_lambda(p, n, j)


class TestKernel:
    def test_kernel_at_alpha_d(self):
        p = params(alpha=1.0)
        assert is_kernel(p, TypeAIndex(1, 0))
        assert not is_kernel(p, TypeAIndex(-1, 0))
        assert not is_kernel(p, TypeAIndex(1, 1))

    def test_no_type_a_kernel_inside(self):
        assert not is_kernel(params(alpha=0.0), TypeAIndex(1, 0))

    def test_zero_shell_is_kernel(self):
        zero = enumerate_by_norm(zn_lattice(2), 0, include_zero=True)[0]
        assert is_kernel(params(), TypeBIndex(zero))

    def test_lambda_zero_iff_kernel(self):
        for alpha in (0.0, 0.5, 1.0, -1.0):
            p = params(alpha=alpha)
            for n in (-3, -1, 1, 2):
                for j in (0, 1, 2):
                    idx = TypeAIndex(n, j)
                    assert (type_a_lambda(p, n, j) == 0.0) == is_kernel(p, idx)

    def test_kernel_family_growth(self):
        p = params(d=2, alpha=2.0, big_l=3)
        idxs = kernel_type_a_indices(p, 12)
        assert all(is_kernel(p, i) for i in idxs)
        total = sum(type_a_multiplicity(p, i.n, i.j) for i in idxs)
        assert total == sum(n**2 * 3 for n in range(1, 13))
        assert kernel_type_a_indices(params(alpha=0.5), 10) == []


class TestSpectrumStream:
    def test_small_stream_alpha0(self):
        # oracle: both families brute forced; only the zero shell and the
        # two (n = +-1, j = 0) points reach lambda <= 1
        recs = spectrum_stream(params(), 1.0)
        assert len(recs) == 3
        assert recs[0].is_kernel and recs[0].lam == 0.0
        assert {r.index for r in recs[1:]} == {TypeAIndex(1, 0), TypeAIndex(-1, 0)}
        assert all(r.lam == 1.0 for r in recs[1:])

    def test_lambda_zero_only_kernel(self):
        recs = spectrum_stream(params(), 0.0)
        assert all(r.is_kernel for r in recs)

    def test_coalesced_alpha_d(self):
        lines = spectrum_stream(params(alpha=1.0), 2.0, coalesce=True)
        assert [ln.lam for ln in lines] == pytest.approx([0.0, HALF_PI, 2.0])
        kernel_line, shell_line, two_line = lines
        assert kernel_line.multiplicity == math.inf
        assert shell_line.multiplicity == 4
        assert {r.index for r in two_line.records} == {TypeAIndex(1, 1), TypeAIndex(-1, 0)}
        assert two_line.multiplicity == 2

    def test_sorted_and_merge_conservation(self):
        for alpha in (0.0, 0.5, 1.0):
            p = params(alpha=alpha, big_l=2)
            raw = spectrum_stream(p, 15.0)
            assert [r.lam for r in raw] == sorted(r.lam for r in raw)
            lines = spectrum_stream(p, 15.0, coalesce=True)
            assert sum(r.multiplicity for r in raw) == sum(l.multiplicity for l in lines)

    def test_cross_family_coincidence_exact(self):
        # c = 1: ladder lambda = pi q / 2 meets shell lambda = pi t / 2
        # exactly when q = t; descriptors merge without a tolerance flag
        p = params(d=1, c=1.0, alpha=0.0)
        lines = spectrum_stream(p, 4 * math.pi, coalesce=True)
        mixed = [
            ln
            for ln in lines
            if {TypeAIndex, TypeBIndex} == {type(r.index) for r in ln.records}
        ]
        assert mixed, "expected exact cross-family merges at c = 1"
        assert all(not ln.coincidence for ln in mixed)
        merged = mixed[0]
        assert len({r.lam for r in merged.records}) == 1

    def test_float_lattice_grouping(self):
        lat = make_lattice([[1.0, 0.0], [0.0, 1.0 + 1e-13]])
        p = params(lattice=lat)
        recs = spectrum_stream(p, 2.0)
        shells = [r for r in recs if isinstance(r.index, TypeBIndex) and r.lam > 0]
        assert shells[0].multiplicity == 4  # grouped within 1e-9 relative

    def test_type_b_matches_shells(self):
        p = params(d=2, alpha=1.0)
        lam_max = 9.0
        stream_b = [r for r in spectrum_stream(p, lam_max) if isinstance(r.index, TypeBIndex)]
        shells = [
            s
            for s in enumerate_by_norm(zn_lattice(4), 2 * lam_max / math.pi)
            if (math.pi / 2) * float(s.norm_sq) <= lam_max
        ]
        assert [r.index.shell for r in stream_b] == shells
        assert [r.multiplicity for r in stream_b] == [s.count for s in shells]


class TestCounting:
    def test_zero_below_first_eigenvalue(self):
        assert counting_function(params(), 0.99) == 0

    def test_example_value(self):
        assert counting_function(params(), 1.0) == 2

    def test_monotone(self):
        p = params(d=2, alpha=1.0, big_l=2)
        values = [counting_function(p, lam) for lam in (0.0, 1.0, 2.0, 5.0, 9.0)]
        assert values == sorted(values)

    def test_excludes_infinite_kernel(self):
        p = params(alpha=1.0)
        assert counting_function(p, 1.0) == 0
        assert isinstance(counting_function(p, 10.0), int)
