import math

import numpy as np
import pytest
from numpy.polynomial import legendre
from sklearn.base import clone

from periodgram.bases import homogeneous_basis, rectangular_basis, two_param_basis
from periodgram.fekete import DegenerateBasis, FeketeMaximizer, fekete_maximize
from periodgram.regions import Box, Interval, Region, Triangle, TwoParamImage
from periodgram.vandermonde import basis_from_exponents, log_abs_det


def lobatto_proxy(rank):
    """Fekete points on an interval are the Gauss-Lobatto nodes."""
    c = np.zeros(rank)
    c[-1] = 1
    x = np.concatenate([[-1.0], np.sort(legendre.legroots(legendre.legder(c))), [1.0]])
    x = (x + 1) / 2
    logdet = sum(math.log(x[j] - x[i]) for i in range(rank) for j in range(i + 1, rank))
    return math.exp(logdet / (rank * (rank - 1) / 2))


def test_two_points_on_unit_interval():
    r = fekete_maximize(rectangular_basis(2), Interval(0, 1), restarts=1)
    assert sorted(r.points[:, 0]) == [0.0, 1.0]
    assert r.log_abs_det == 0.0
    assert r.proxy == 1.0


def test_three_points_on_symmetric_interval():
    r = fekete_maximize(rectangular_basis(3), Interval(-1, 1), restarts=1)
    assert np.allclose(sorted(r.points[:, 0]), [-1, 0, 1], atol=1e-6)
    assert math.exp(r.log_abs_det) == pytest.approx(2, rel=1e-9)


@pytest.mark.parametrize("rank", [5, 8, 12])
def test_interval_reaches_lobatto_value(rank):
    r = fekete_maximize(rectangular_basis(rank), Interval(0, 1), restarts=1, seed=rank)
    assert r.proxy == pytest.approx(lobatto_proxy(rank), rel=1e-7)
    assert r.proxy <= lobatto_proxy(rank) * (1 + 1e-12)


def test_interval_proxies_decrease_above_limit():
    proxies = [fekete_maximize(rectangular_basis(k), Interval(0, 1), restarts=1).proxy
               for k in range(8, 15)]
    assert all(a > b for a, b in zip(proxies, proxies[1:]))
    assert min(proxies) >= 0.25 - 1e-9


def test_scaled_interval():
    a = fekete_maximize(rectangular_basis(6), Interval(0, 1), restarts=1).proxy
    b = fekete_maximize(rectangular_basis(6), Interval(-1, 1), restarts=1).proxy
    assert b == pytest.approx(2 * a, rel=1e-6)


def test_ascent_and_membership():
    est = FeketeMaximizer(two_param_basis(3), restarts=2, sweeps=10, seed=3).fit(TwoParamImage())
    h = est.history_
    assert all(b >= a for a, b in zip(h, h[1:]))
    assert TwoParamImage().contains(est.points_).all()
    assert log_abs_det(two_param_basis(3), est.points_) == pytest.approx(est.log_abs_det_)
    assert est.proxy_ == pytest.approx(math.exp(est.log_abs_det_ / 18))


def test_triangle_witness_lies_between_limit_and_box():
    b = homogeneous_basis(4, 2)
    tri = fekete_maximize(b, Triangle(), restarts=2, seed=0).proxy
    box = fekete_maximize(b, Box(), restarts=2, seed=0).proxy
    assert tri <= box + 1e-12
    assert tri >= 1 / (2 * math.e)


def test_deterministic_under_seed():
    a = fekete_maximize(two_param_basis(2), TwoParamImage(), restarts=2, seed=11)
    b = fekete_maximize(two_param_basis(2), TwoParamImage(), restarts=2, seed=11)
    assert np.array_equal(a.points, b.points)
    assert a.to_json() == b.to_json()


def test_parallel_restarts_match_serial():
    basis = rectangular_basis(4)
    a = fekete_maximize(basis, Interval(), restarts=3, seed=5, workers=1)
    b = fekete_maximize(basis, Interval(), restarts=3, seed=5, workers=2)
    assert a.log_abs_det == b.log_abs_det


def test_estimator_interface():
    est = FeketeMaximizer(rectangular_basis(3), restarts=1)
    params = est.get_params()
    assert params["restarts"] == 1 and params["pool_size"] == 512
    assert clone(est).get_params()["basis"] == params["basis"]
    assert est.score(Interval()) == pytest.approx(est.proxy_)
    with pytest.raises(ValueError):
        FeketeMaximizer().fit(Interval())
    with pytest.raises(ValueError):
        FeketeMaximizer(rectangular_basis(3), restarts=0).fit(Interval())


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        fekete_maximize(two_param_basis(2), Interval())


class Segment(Region):
    """The segment ``[0, 1] x {0}``."""

    def contains(self, pts):
        p = np.asarray(pts, dtype=float).reshape(-1, 2)
        return (p[:, 0] >= 0) & (p[:, 0] <= 1) & (p[:, 1] == 0)

    def bbox(self):
        return np.zeros(2), np.array([1.0, 0.0])


def test_degenerate_basis():
    with pytest.raises(DegenerateBasis):
        fekete_maximize(basis_from_exponents([(0, 0), (0, 1)]), Segment(), restarts=1)
    with pytest.raises(DegenerateBasis):
        fekete_maximize(basis_from_exponents([(0, 0), (1, 0), (2, 0), (1, 1)]), Segment(), restarts=1)
