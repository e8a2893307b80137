import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from periodgram.exactnum import (
    IntFactorization,
    LinearForm,
    XiPolynomial,
    denominator_lcm,
    eval_xi,
    factorint,
    format_rational,
    lcm_consecutive,
    parse_rational,
    zeta2,
)

fractions = st.fractions(max_denominator=10**6).filter(lambda q: abs(q) < 10**9)


@pytest.mark.parametrize("digits", [10, 30, 100, 400])
def test_zeta2_matches_pi_squared_over_six(digits):
    with mpmath.workdps(digits + 20):
        want = mpmath.pi**2 / 6
        got = zeta2(digits).value
        assert abs(got - want) < mpmath.mpf(10) ** (-digits)


def test_zeta2_rejects_low_precision():
    with pytest.raises(ValueError):
        zeta2(5)


def test_bigfloat_string_and_float():
    z = zeta2(20)
    assert str(z).endswith("@20")
    assert float(z) == pytest.approx(math.pi**2 / 6, rel=1e-15)


@given(fractions)
def test_rational_text_round_trip(q):
    text = format_rational(q)
    assert "/" in text
    assert parse_rational(text) == q


@given(fractions, fractions, fractions, fractions)
def test_linear_form_ring_laws(a, b, c, d):
    f, g = LinearForm(a, b), LinearForm(c, d)
    assert f + g == g + f
    assert (f - g) + g == f
    assert (f * g).to_json() == (g * f).to_json()
    assert (f * g) == f.to_poly() * g.to_poly()


def test_linear_form_value_and_denominator():
    f = LinearForm(Fraction(-5, 4), 1)
    assert float(f.evaluate(30).value) == pytest.approx(math.pi**2 / 6 - 1.25, abs=1e-15)
    assert f.denominator() == 4
    assert not f.is_integral()
    assert LinearForm(3, -2).is_integral()


@given(st.lists(fractions, min_size=1, max_size=7))
def test_interpolation_recovers_polynomial(coeffs):
    p = XiPolynomial(coeffs)
    xs = list(range(len(coeffs)))
    assert XiPolynomial.interpolate(xs, [p.at(x) for x in xs]) == p


@given(st.lists(fractions, min_size=1, max_size=5), st.lists(fractions, min_size=1, max_size=5))
def test_polynomial_product_evaluates_pointwise(a, b):
    p, q = XiPolynomial(a), XiPolynomial(b)
    for t in (Fraction(0), Fraction(1, 3), Fraction(-7, 2)):
        assert (p * q).at(t) == p.at(t) * q.at(t)


def test_polynomial_json_round_trip():
    p = XiPolynomial([Fraction(145, 4), Fraction(-851, 16), Fraction(11, 4), 23, -8])
    assert XiPolynomial.from_json(p.to_json()) == p
    assert p.degree == 4
    assert p.denominator() == 16


def test_eval_xi_survives_cancellation():
    # (x - zeta2)^6 expanded loses many digits to cancellation
    with mpmath.workdps(80):
        z = Fraction(mpmath.nstr(mpmath.pi**2 / 6, 70))
    p = XiPolynomial([-z, 1]) ** 6
    with mpmath.workdps(200):
        want = (mpmath.pi**2 / 6 - mpmath.mpf(z.numerator) / z.denominator) ** 6
    got = eval_xi(p, 20)
    assert abs(got.value - want) <= abs(want) * mpmath.mpf(10) ** -18


@given(st.integers(min_value=1, max_value=10**12))
def test_factorint_reconstructs(n):
    f = factorint(n)
    assert f.value == n
    assert all(e > 0 for _, e in f.factors)


def test_factorint_formatting():
    f = factorint(2**18 * 3**16)
    assert str(f) == "2^18*3^16"
    assert isinstance(f, IntFactorization)
    assert f.to_json()["value"] == str(2**18 * 3**16)


@pytest.mark.parametrize("n", [1, 2, 5, 10, 30])
def test_lcm_consecutive(n):
    assert lcm_consecutive(n) == math.lcm(*range(1, n + 1))


def test_denominator_lcm_of_polynomial():
    p = XiPolynomial([Fraction(1, 12), Fraction(5, 8)])
    assert denominator_lcm(p).value == 24
