from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from periodgram.exactnum import LinearForm
from periodgram.gram import build_gram, rational_det
from periodgram.lattice import (
    FIVE_PARAM_LIMIT,
    G_BASIS_LIMIT,
    denominator_asymptotics,
    det_criterion_series,
    extract_small_form,
    five_param_denominator_sum,
    g_basis_denominator_sum,
    integerize,
    lll_reduce,
    pole_denominator_bound,
    verify_denominator,
)


@pytest.mark.parametrize("family,n", [("two_param", 2), ("two_param", 3), ("five_param", 1),
                                      ("two_copies", 2), ("two_param_g", 3)])
def test_integerized_matrix_reconstructs_gram(family, n):
    g = build_gram(family, n)
    ig = integerize(g)
    assert ig.is_integral()
    for i in range(g.size):
        for j in range(g.size):
            back = ig.form(i, j) * Fraction(1, ig.d_left[i]) * (1 / ig.d_right[j])
            assert back == g[i, j]


def test_delta_scales_the_determinant():
    g = build_gram("two_param", 2)
    ig = integerize(g)
    assert ig.delta == 32
    t = Fraction(3, 2)
    a = [[Fraction(c) + x * t for c, x in row] for row in ig.a_tilde]
    assert rational_det(a) == ig.delta * rational_det(g.at(t))


@pytest.mark.parametrize("family,n", [("two_param", 2), ("two_param", 3), ("two_param", 4),
                                      ("five_param", 1), ("five_param", 2), ("two_param_g", 3)])
def test_pole_denominator_bound_clears_entries(family, n):
    check = verify_denominator(family, n)
    assert check and check.checked > 0


def test_pole_bound_examples():
    assert pole_denominator_bound((0, 0, 0, 0, 0)) == 1
    # pole vector (2, 2, 2, 2, 2): d_2^2
    assert pole_denominator_bound((2, 2, 2, 2, 2)) == 4


def test_denominator_limits():
    assert denominator_asymptotics(2, 2) == Fraction(10, 3)
    assert denominator_asymptotics(1, 1) == 3
    assert G_BASIS_LIMIT == Fraction(115, 36)
    assert FIVE_PARAM_LIMIT == Fraction(19, 4)
    with pytest.raises(ValueError):
        denominator_asymptotics(0, 1)


def test_normalized_sums_approach_limits():
    g = [g_basis_denominator_sum(n) for n in (50, 100, 200)]
    assert abs(g[-1] - G_BASIS_LIMIT) < abs(g[0] - G_BASIS_LIMIT)
    assert abs(float(g[-1] - G_BASIS_LIMIT)) < 0.05
    f = [five_param_denominator_sum(n) for n in (100, 200, 400)]
    assert f[0] > f[1] > f[2] > FIVE_PARAM_LIMIT
    assert float(f[2] - FIVE_PARAM_LIMIT) < 0.05


@given(st.integers(2, 5).flatmap(
    lambda n: st.lists(st.lists(st.integers(-30, 30), min_size=n, max_size=n), min_size=n, max_size=n)))
def test_lll_preserves_lattice(rows):
    d = rational_det(rows)
    if d == 0:
        return
    reduced, u = lll_reduce(rows)
    assert abs(rational_det(u)) == 1
    assert [[sum(u[i][k] * rows[k][j] for k in range(len(rows))) for j in range(len(rows))]
            for i in range(len(rows))] == reduced
    assert abs(rational_det(reduced)) == abs(d)
    # first vector is within 2^((n-1)/2) of the shortest basis row
    first = sum(x * x for x in reduced[0])
    assert first <= 2 ** (len(rows) - 1) * min(sum(x * x for x in r) for r in rows)


@pytest.mark.parametrize("n,method", [(2, "exhaustive"), (3, "lll")])
def test_small_linear_form(n, method):
    form = extract_small_form(integerize(build_gram("two_param", n)))
    assert form.method == method
    assert form.value != LinearForm()
    assert form.value.is_integral()
    assert abs(form.numeric.value) <= 4 * form.bound.value
    assert form.slack <= 4
    # the exact form and its numeric value agree
    assert abs(form.value.evaluate(40).value - form.numeric.value) < mpmath.mpf(10) ** -20


def test_determinant_criterion_series():
    series = dict(det_criterion_series("two_param", 5))
    assert series[2] == pytest.approx(1.29e-4, rel=0.02)
    assert series[3] == pytest.approx(4.24e-14, rel=0.02)
    vals = [series[n] for n in sorted(series)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
