import itertools
import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from periodgram.bases import homogeneous_basis, rectangular_basis
from periodgram.gram import rational_det
from periodgram.regions import Box, Interval, Triangle
from periodgram.vandermonde import (
    AmalgamPair,
    DimensionMismatch,
    ShapeError,
    SizeLimit,
    amalgam,
    amalgam_det_formula,
    basis_from_exponents,
    directsum_bound_check,
    h_constant,
    log_abs_det,
    permutation_sign,
    tensor_basis,
    tensor_bound_check,
    vdm_det_abs,
    vdm_matrix,
)


def rand_matrix(rng, rows, cols):
    return [[Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(cols)] for _ in range(rows)]


@pytest.mark.parametrize("m,n", [(1, 2), (2, 2), (3, 2), (2, 3)])
def test_amalgam_formula_matches_determinant(m, n):
    rng = random.Random(100 * m + n)
    for _ in range(20):
        pair = AmalgamPair.of(rand_matrix(rng, m * n, m), rand_matrix(rng, m * n, n))
        assert amalgam_det_formula(pair) == rational_det(amalgam(pair))


def test_amalgam_row_layout():
    pair = AmalgamPair.of([[1, 2], [3, 4], [5, 6], [7, 8]], [[1, 10], [1, 10], [1, 10], [1, 10]])
    assert amalgam(pair)[0] == [1, 2, 10, 20]


def test_h_constant():
    assert h_constant(2, 2) == 12
    assert h_constant(1, 1) == 1
    assert h_constant(3, 2) == math.factorial(3) * math.factorial(4)
    with pytest.raises(ValueError):
        h_constant(0, 2)


@given(st.permutations(range(6)))
def test_permutation_sign_counts_inversions(p):
    inv = sum(1 for i in range(6) for j in range(i) if p[j] > p[i])
    assert permutation_sign(p) == (-1) ** inv


def test_amalgam_shape_checks():
    with pytest.raises(ShapeError):
        AmalgamPair.of([[1, 2]] * 3, [[1, 2]] * 3)
    with pytest.raises(ShapeError):
        AmalgamPair.of([[1]] * 2, [[1, 2]] * 3)
    pair = AmalgamPair.of([[1, 0, 0]] * 9, [[1, 0, 0]] * 9)
    with pytest.raises(SizeLimit):
        amalgam_det_formula(pair)


def test_classical_vandermonde_exact():
    b = rectangular_basis(4)
    pts = [Fraction(k, 3) for k in range(4)]
    v = vdm_matrix(b, pts)
    want = math.prod(pts[j] - pts[i] for i in range(4) for j in range(i + 1, 4))
    assert rational_det(v) == want
    assert float(vdm_det_abs(b, pts).value) == pytest.approx(float(abs(want)))


@given(st.lists(st.floats(-2, 2), min_size=5, max_size=5, unique=True))
def test_float_vandermonde_log_det(pts):
    b = rectangular_basis(5)
    want = sum(math.log(abs(pts[j] - pts[i])) for i in range(5) for j in range(i + 1, 5)
               if pts[j] != pts[i])
    got = log_abs_det(b, np.array(pts)[:, None])
    if math.isfinite(got) and min(abs(a - c) for a, c in itertools.combinations(pts, 2)) > 1e-6:
        assert got == pytest.approx(want, abs=1e-6)


def test_point_count_checked():
    with pytest.raises(DimensionMismatch):
        vdm_matrix(rectangular_basis(3), [0, 1])
    with pytest.raises(DimensionMismatch):
        vdm_matrix(rectangular_basis(2, 2), [0, 1, 2, 3])


def test_tensor_basis_ordering_and_freeness():
    b1 = basis_from_exponents([(0, 0), (1, 0)])
    b2 = basis_from_exponents([(0, 0), (0, 1)])
    t = tensor_basis(b1, b2)
    assert [m.exponents for m in t] == [(0, 0), (1, 0), (0, 1), (1, 1)]


@pytest.mark.parametrize("region", [Box(), Triangle()])
def test_tensor_bound_holds(region):
    b1 = basis_from_exponents([(0, 0), (1, 0)])
    b2 = basis_from_exponents([(0, 0), (0, 1), (0, 2)])
    check = tensor_bound_check(b1, b2, region, samples=300, seed=2)
    assert check.holds and check.free
    assert check.sampled_lhs <= check.sampled_rhs


def test_tensor_check_detects_dependence():
    b = basis_from_exponents([(0, 0), (1, 0)])
    check = tensor_bound_check(b, b, Box(), samples=10)
    assert not check.free


def test_directsum_bound_holds():
    b1 = basis_from_exponents([(0, 0), (1, 0)])
    b2 = basis_from_exponents([(0, 1), (1, 1)])
    assert directsum_bound_check(b1, b2, Triangle(), samples=200, seed=5)


def test_homogeneous_vandermonde_on_interval_is_classical():
    b = homogeneous_basis(4, 1)
    pts = np.array([[0.0], [0.3], [0.6], [1.0]])
    want = sum(math.log(abs(a - c)) for a, c in itertools.combinations(pts[:, 0], 2))
    assert log_abs_det(b, pts) == pytest.approx(want)
    assert Interval().contains(pts).all()
