import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from periodgram.bases import (
    FAMILIES,
    Monomial,
    binomial_expand_g_basis,
    expand_element,
    family_basis,
    homogeneous_basis,
    m05_basis,
    m05_rank,
    phi_rank_identity,
    poincare_check,
    poincare_coefficients,
    rectangular_basis,
    to_exponent_vector,
    two_copies_basis,
    two_param_basis,
)
from periodgram.gram import dihedral_coordinates


def test_two_param_order_and_exponent():
    b = two_param_basis(2)
    assert [m.exponents for m in b] == [(0, 0), (1, 0), (0, 1), (1, 1)]
    for n in range(1, 7):
        b = two_param_basis(n)
        assert b.rank == n * n
        assert b.e_n == n * n * (n - 1)


@pytest.mark.parametrize("n,rank,e", [(1, 6, 5), (2, 16, 25), (3, 31, 70)])
def test_five_param_rank_and_exponent(n, rank, e):
    b = m05_basis(n)
    assert b.rank == rank == m05_rank(n)
    assert b.e_n == e


def test_five_param_order_at_level_one():
    b = m05_basis(1)
    assert [m.exponents for m in b] == [(0, 0, 0, 0, 0)] + [
        tuple(1 if k == i else 0 for k in range(5)) for i in range(5)
    ]


def test_poincare_series():
    assert poincare_coefficients(4) == [1, 5, 10, 15, 20]
    assert poincare_check(12)
    with pytest.raises(ValueError):
        poincare_check(13)


@pytest.mark.parametrize("n", range(1, 6))
def test_two_copies(n):
    b = two_copies_basis(n)
    assert b.rank == 2 * n * n
    assert b.e_n == 2 * n * n * (n - 1)
    assert len({m.exponents for m in b}) == b.rank


@given(st.lists(st.integers(1, 6), min_size=1, max_size=3))
def test_rectangular_exponent_sum(sizes):
    b = rectangular_basis(*sizes)
    assert b.rank == math.prod(sizes)
    assert 2 * b.e_n == b.rank * (sum(sizes) - len(sizes))


@given(st.integers(1, 8), st.integers(1, 4))
def test_homogeneous_exponent_sum(n, r):
    b = homogeneous_basis(n, r)
    assert b.rank == math.comb(n + r - 1, r)
    assert b.e_n == r * math.comb(n + r - 1, r + 1)


def test_distinct_monomials_enforced():
    b = two_param_basis(2)
    with pytest.raises(ValueError):
        type(b)(b.family, b.n, b.variables, b.monomials + b.monomials[:1], b.e_n)


@given(st.integers(0, 4), st.integers(0, 4), st.floats(0.01, 0.99), st.floats(0.01, 0.99))
def test_g_basis_expansion_evaluates_correctly(a, b, x, y):
    u = dihedral_coordinates(np.array([x]), np.array([y]))[0]
    want = u[2] ** a * (u[0] + u[4]) ** b
    got = sum(c * np.prod(u ** np.array(v)) for c, v in binomial_expand_g_basis(a, b))
    assert got == pytest.approx(want, rel=1e-12)
    assert expand_element("two_param_g", Monomial((a, b))) == binomial_expand_g_basis(a, b)


@given(st.integers(0, 5), st.integers(0, 5), st.floats(0.01, 0.99), st.floats(0.01, 0.99))
def test_two_param_exponent_map(i, j, x, y):
    u = dihedral_coordinates(np.array([x]), np.array([y]))[0]
    f1, f2 = u[1] * u[3], u[0] * u[2] * u[4]
    v = to_exponent_vector("two_param", (i, j))
    assert np.prod(u ** np.array(v)) == pytest.approx(f1**i * f2**j, rel=1e-12)


def test_family_lookup():
    for f in FAMILIES:
        assert family_basis(f, 2).family == f
    with pytest.raises(ValueError):
        family_basis("nope", 2)


@pytest.mark.parametrize("n", range(1, 7))
def test_phi_change_of_variables_ranks(n):
    r = phi_rank_identity(n)
    assert r.first_holds and r.second_holds
    assert r.rank_p_prev_n == n * (n - 1)
    assert r.rank_pn == n * (n + 1)
    assert r.rank_c == r.rank_k == n


def test_phi_split_needs_previous_level():
    # with P_n instead of P_{n-1} the ranks would overshoot M_n by n
    n = 4
    r = phi_rank_identity(n)
    assert r.rank_pn + r.rank_c == r.rank_m + 2 * n


def test_basis_json():
    j = two_param_basis(2).to_json()
    assert j["rank"] == 4 and j["e_n"] == "4"
    assert Fraction(j["e_n"]) == 4
