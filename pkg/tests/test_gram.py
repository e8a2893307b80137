import itertools
import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from sklearn.base import clone

from periodgram.exactnum import XiPolynomial, eval_xi
from periodgram.gram import (
    TABLE_COLUMNS,
    ExactLimitExceeded,
    GramTable,
    bareiss_det,
    build_gram,
    det_exact,
    det_numeric_direct,
    metrics,
    montecarlo_det_identity,
    positivity_check,
    rational_det,
    report,
    sample_omega,
    verify_factorization,
)

X = XiPolynomial.x()


def leibniz(m):
    n = len(m)
    total = 0
    for perm in itertools.permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i) if perm[j] > perm[i])
        total += (-1) ** inv * math.prod(m[i][perm[i]] for i in range(n))
    return total


@given(st.integers(1, 5).flatmap(
    lambda n: st.lists(st.lists(st.integers(-20, 20), min_size=n, max_size=n), min_size=n, max_size=n)))
def test_bareiss_matches_leibniz(m):
    assert bareiss_det([r[:] for r in m]) == leibniz(m)


@given(st.integers(1, 4).flatmap(
    lambda n: st.lists(st.lists(st.builds(Fraction, st.integers(-49, 49), st.integers(1, 9)),
                                min_size=n, max_size=n), min_size=n, max_size=n)))
def test_rational_det_matches_leibniz(m):
    assert rational_det(m) == leibniz(m)


@pytest.mark.parametrize("family,n", [(f, n) for f in ("two_param", "two_param_g", "two_copies", "one_param")
                                      for n in range(1, 5)] + [("five_param", n) for n in range(0, 4)])
def test_gram_is_symmetric(family, n):
    assert build_gram(family, n).is_symmetric()


def test_two_param_level_two_polynomial():
    p = det_exact(build_gram("two_param", 2))
    assert p == XiPolynomial([Fraction(145, 4), Fraction(-851, 16), Fraction(11, 4), 23, -8])
    assert verify_factorization(p * 16, [8 * X**2 - X - 20, 16 * X**2 - 44 * X + 29], scalar=-1)


def test_five_param_level_one_polynomial():
    p = det_exact(build_gram("five_param", 1))
    want = (8 * X**2 - X - 20) * (16 * X**2 - 44 * X + 29) ** 2 * Fraction(1, 1024)
    assert p == want


@given(st.permutations(range(9)))
def test_determinant_independent_of_basis_order(order):
    g = build_gram("two_param", 3)
    assert det_exact(g.permuted(order)) == det_exact(g)


@pytest.mark.parametrize("family,n", [("two_param", 3), ("two_copies", 2), ("five_param", 2)])
def test_exact_and_numeric_agree(family, n):
    g = build_gram(family, n)
    exact = eval_xi(det_exact(g), 60).value
    direct = det_numeric_direct(g, 60).value
    assert abs(exact - direct) <= abs(exact) * mpmath.mpf(10) ** -30


def test_exact_limit():
    with pytest.raises(ExactLimitExceeded):
        det_exact(build_gram("two_param", 3), limit=8)


TWO_PARAM = {
    2: (8.05e-6, "2^4", 4.231),
    3: (3.76e-27, "2^18*3^16", 2.025),
    4: (5.19e-75, "2^48*3^30*5^20", 1.738),
    5: (6.29e-160, "2^90*3^48*5^48*7^24", 1.533),
}


@pytest.mark.parametrize("n", sorted(TWO_PARAM))
def test_two_param_table_rows(n):
    det, d, theta = TWO_PARAM[n]
    r = report("two_param", n)
    assert float(r.det_numeric.value) == pytest.approx(det, rel=0.01)
    assert str(r.d_n) == d and r.d_n_exact
    assert float(r.threshold.value) == pytest.approx(theta, abs=0.005)


def test_two_param_level_two_metrics():
    r = report("two_param", 2)
    row = r.row()
    assert tuple(row) == TABLE_COLUMNS
    assert row["proxy"] == pytest.approx(0.05327, abs=5e-5)
    assert row["log_d_per_e"] == pytest.approx(math.log(2), rel=1e-12)
    assert r.delta == 32


@pytest.mark.parametrize("n,proxy", [(2, 0.01312), (3, 0.01625)])
def test_two_copies_proxy(n, proxy):
    assert float(report("two_copies", n).proxy.value) == pytest.approx(proxy, abs=5e-4)


def test_five_param_denominator_level_two():
    r = report("five_param", 2)
    assert str(r.d_n) == "2^45*3^30"
    assert r.rank == 16 and r.e_n == 25


def test_metrics_undefined_at_level_one():
    r = report("two_param", 1)
    assert r.proxy is None and r.threshold is None
    assert float(r.det_numeric.value) == pytest.approx(math.pi**2 / 6)


def test_metrics_formulae():
    det = eval_xi(det_exact(build_gram("two_param", 3)), 40)
    proxy, ldpe, product, theta = metrics(det, 2**18 * 3**16, Fraction(18))
    d = float(det.value)
    assert float(proxy.value) == pytest.approx(d ** (1 / 18))
    assert float(product.value) == pytest.approx(float(proxy.value) * math.exp(float(ldpe.value)))
    assert float(theta.value) == pytest.approx(-math.log(d) / math.log(2**18 * 3**16))


@pytest.mark.parametrize("family,n", [("two_param", n) for n in range(1, 6)]
                         + [("two_copies", n) for n in range(1, 4)]
                         + [("five_param", n) for n in range(0, 3)])
def test_gram_positive_definite(family, n):
    assert positivity_check(build_gram(family, n))


def test_gram_table_estimator():
    est = GramTable(family="two_param", precision=30)
    assert est.get_params()["family"] == "two_param"
    assert clone(est).get_params() == est.get_params()
    out = est.fit_transform([2, 3])
    assert out.shape == (2, 4)
    assert out[0, 0] == pytest.approx(0.05327, abs=5e-5)
    assert [r["n"] for r in est.rows()] == [2, 3]
    with pytest.raises(RuntimeError):
        GramTable().transform([2])
    with pytest.raises(ValueError):
        GramTable(family="bogus").fit([2])


def test_omega_sampler_marginals():
    # under omega / zeta(2) the mean of x equals I(1,0,0,0,0)/zeta(2) = 6/pi^2
    rng = np.random.default_rng(3)
    x, y = sample_omega(rng, 400_000)
    assert np.all((0 < x) & (x < 1) & (0 < y) & (y < 1))
    assert x.mean() == pytest.approx(6 / math.pi**2, abs=4e-3)
    assert np.mean(x * y) == pytest.approx((math.pi**2 / 6 - 1) * 6 / math.pi**2, abs=4e-3)


def test_montecarlo_identity_small():
    res = montecarlo_det_identity("two_param", 2, samples=400_000, seed=1)
    assert res.z_score < 4
    one = montecarlo_det_identity("two_param", 1, samples=1000, seed=1)
    assert one.estimate == pytest.approx(math.pi**2 / 6, rel=1e-12)
