"""The compiled kernel and the pure-Python fallback must agree exactly."""

import math

import numpy as np
import pytest

from heisenspec import _enum_py, make_lattice, zn_lattice
from heisenspec._enum import backend_name

try:
    from heisenspec import _enumcore
except ImportError:
    _enumcore = None

needs_compiled = pytest.mark.skipif(
    _enumcore is None, reason="compiled kernel not built"
)


def cases():
    from heisenspec import SingularBasis

    yield zn_lattice(2).cholesky_upper, 50.0
    yield zn_lattice(4).cholesky_upper, 30.0
    yield zn_lattice(6).cholesky_upper, 12.0
    yield make_lattice([[2, 1], [0, 2]]).cholesky_upper, 40.0
    rng = np.random.default_rng(99)
    for dim in (2, 4, 6):
        while True:
            try:
                b = make_lattice(
                    (2 * np.eye(dim, dtype=int) + rng.integers(-1, 2, (dim, dim))).tolist()
                )
                break
            except SingularBasis:
                continue
        yield b.cholesky_upper, 25.0


@needs_compiled
class TestBackendEquivalence:
    def test_identical_output(self):
        for r, bound in cases():
            py, t_py = _enum_py.enumerate_coefficients(r, bound, 10**7)
            cy, t_cy = _enumcore.enumerate_coefficients(r, bound, 10**7)
            assert not t_py and not t_cy
            assert py.shape == cy.shape
            assert np.array_equal(py, cy)

    def test_zero_vector_always_included(self):
        r = zn_lattice(2).cholesky_upper
        for backend in (_enum_py, _enumcore):
            out, _ = backend.enumerate_coefficients(r, 0.0, 100)
            assert out.shape == (1, 2)
            assert (out == 0).all()

    def test_negative_bound_empty(self):
        r = zn_lattice(2).cholesky_upper
        for backend in (_enum_py, _enumcore):
            out, truncated = backend.enumerate_coefficients(r, -1.0, 100)
            assert out.shape == (0, 2) and not truncated

    def test_budget_truncation_flagged(self):
        r = zn_lattice(4).cholesky_upper
        for backend in (_enum_py, _enumcore):
            _, truncated = backend.enumerate_coefficients(r, 100.0, 10)
            assert truncated

    def test_point_count_matches_ball_volume_asymptotics(self):
        # sanity on the compiled kernel alone: Z^2 disc of radius 20
        out, _ = _enumcore.enumerate_coefficients(
            zn_lattice(2).cholesky_upper, 400.0, 10**6
        )
        assert abs(out.shape[0] - math.pi * 400.0) / (math.pi * 400.0) < 0.05


def test_selected_backend_reported():
    assert backend_name() in ("compiled", "python")
