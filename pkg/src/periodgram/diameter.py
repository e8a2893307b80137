"""Closed-form transfinite diameters and the bound calculators built on them.

Every result is a :class:`BoundValue`: a high-precision number together with
the list of rules that produced it, which :meth:`BoundValue.replay` can
re-evaluate.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np
from scipy.optimize import brentq

from .exactnum import BigFloat
from .fekete import DegenerateBasis, FeketeResult, fekete_maximize  # noqa: F401
from .regions import AffineImage, Ball, Box, Interval, Region, Triangle

DEFAULT_DIGITS = 30


class NoClosedForm(ValueError):
    pass


class SingularMatrix(ValueError):
    pass


def _mp(x):
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    if isinstance(x, BoundValue):
        return x.value.value
    return mpmath.mpf(x)


RULES = {
    "interval": lambda a, b: (b - a) / 4,
    "box": lambda a, b, c, d: mpmath.sqrt((b - a) * (d - c)) / 4,
    "triangle": lambda vol: mpmath.sqrt(vol) / (mpmath.e * mpmath.sqrt(2)),
    "ball": lambda radius: radius / mpmath.sqrt(2 * mpmath.e),
    "gl_scaling": lambda det, diam, n: abs(det) ** (1 / n) * diam,
    "product_rule": lambda d1, m, d2, n: d1 ** (m / (m + n)) * d2 ** (n / (m + n)),
    "power": lambda base, exponent: base**exponent,
    "product": lambda **kw: mpmath.fprod(kw.values()),
    "naive": lambda: mpmath.mpf(1) / 4,
    "rect_cube_root": lambda eps: (eps / 16) ** (mpmath.mpf(1) / 3),
    "triangle_bound": lambda eps: (eps / (4 * mpmath.e**2 * (2 * mpmath.sqrt(eps) - eps))) ** (mpmath.mpf(1) / 3),
    "lower_bound": lambda eps: (eps * (1 - mpmath.sqrt(eps)) ** 2 / 16) ** (mpmath.mpf(1) / 3),
    "min": lambda **kw: min(kw.values()),
    "squared_triangle_bound": lambda vol: (vol / (2 * mpmath.e**2)) ** (mpmath.mpf(2) / 3),
    "intuitive_threshold": lambda r, w: mpmath.exp((w / r) * (2 * r + 1) / (r + 1)),
}


@dataclass(frozen=True)
class Step:
    rule: str
    inputs: tuple[tuple[str, str], ...]
    output: str

    def evaluate(self, digits: int):
        with mpmath.workdps(digits + 10):
            args = {k: mpmath.mpf(v) for k, v in self.inputs}
            return RULES[self.rule](**args)


@dataclass(frozen=True)
class BoundValue:
    value: BigFloat
    derivation: tuple[Step, ...]

    def __float__(self):
        return float(self.value.value)

    def replay(self) -> bool:
        """Re-evaluate every step from its recorded inputs."""
        digits = self.value.precision
        for step in self.derivation:
            got = step.evaluate(digits)
            with mpmath.workdps(digits + 10):
                want = mpmath.mpf(step.output)
                if abs(got - want) > mpmath.mpf(10) ** (2 - digits) * max(1, abs(want)):
                    return False
        return True

    def to_json(self) -> dict:
        return {
            "value": mpmath.nstr(self.value.value, self.value.precision),
            "precision": self.value.precision,
            "derivation": [{"rule": s.rule, "inputs": dict(s.inputs), "output": s.output}
                           for s in self.derivation],
        }


def _apply(rule: str, digits: int, parents=(), **inputs) -> BoundValue:
    with mpmath.workdps(digits + 10):
        args = {k: _mp(v) for k, v in inputs.items()}
        out = RULES[rule](**args)
        step = Step(rule, tuple((k, mpmath.nstr(v, digits + 5)) for k, v in args.items()),
                    mpmath.nstr(out, digits + 5))
    chain = tuple(itertools.chain.from_iterable(p.derivation for p in parents)) + (step,)
    return BoundValue(BigFloat(out, digits), chain)


# ---------------------------------------------------------------------------
# Catalog


def closed_form_diameter(region: Region, digits: int = DEFAULT_DIGITS) -> BoundValue:
    """Known transfinite diameter of an interval, box, triangle, disc or affine image."""
    if isinstance(region, Interval):
        return _apply("interval", digits, a=region.a, b=region.b)
    if isinstance(region, Box):
        return _apply("box", digits, a=region.a, b=region.b, c=region.c, d=region.d)
    if isinstance(region, Triangle):
        return _apply("triangle", digits, vol=_triangle_volume(region))
    if isinstance(region, Ball):
        return _apply("ball", digits, radius=region.radius)
    if isinstance(region, AffineImage):
        inner = closed_form_diameter(region.source, digits)
        return gl_scaling(region.matrix, inner, region.dim, digits)
    raise NoClosedForm(f"no closed-form diameter for region kind {region.kind!r}")


def _triangle_volume(t: Triangle):
    with mpmath.workdps(50):
        (x1, y1), (x2, y2), (x3, y3) = ((mpmath.mpf(str(c)) for c in v) for v in (t.v1, t.v2, t.v3))
        return abs((x2 - x1) * (y3 - y1) - (x3 - x1) * (y2 - y1)) / 2


def triangle_volume(v1, v2, v3):
    return _triangle_volume(Triangle(tuple(v1), tuple(v2), tuple(v3)))


def gl_scaling(matrix, diam: BoundValue, n: int, digits: int = DEFAULT_DIGITS) -> BoundValue:
    """``|det P|^(1/n) * diam``."""
    det = float(np.linalg.det(np.asarray(matrix, dtype=float)))
    if det == 0:
        raise SingularMatrix("linear map must be invertible")
    return _apply("gl_scaling", digits, (diam,), det=det, diam=diam, n=n)


def product_rule(d1: BoundValue, m: int, d2: BoundValue, n: int, digits: int = DEFAULT_DIGITS) -> BoundValue:
    """Diameter of a product of regions in dimensions ``m`` and ``n``."""
    if m < 1 or n < 1:
        raise ValueError("dimensions must be positive")
    return _apply("product_rule", digits, (d1, d2), d1=d1, m=m, d2=d2, n=n)


def _power_product(sups, alphas, digits):
    if len(sups) != len(alphas):
        raise ValueError("sups and alphas must have equal length")
    if any(_mp(a) < 0 for a in alphas):
        raise ValueError("exponents must be non-negative")
    parts = [_apply("power", digits, (s,) if isinstance(s, BoundValue) else (), base=s, exponent=a)
             for s, a in zip(sups, alphas)]
    if len(parts) == 1:
        return parts[0]
    return _apply("product", digits, tuple(parts), **{f"f{i}": p for i, p in enumerate(parts)})


def tensor_limit_bound(sup_m, alpha, sup_n, beta, digits: int = DEFAULT_DIGITS) -> BoundValue:
    """``sup_m^alpha * sup_n^beta``; ``beta = 0`` is the stationary case."""
    return _power_product([sup_m, sup_n], [alpha, beta], digits)


def directsum_limit_bound(sups, alphas, digits: int = DEFAULT_DIGITS) -> BoundValue:
    """``prod sups_i^alphas_i``."""
    return _power_product(list(sups), list(alphas), digits)


# ---------------------------------------------------------------------------
# Hyperbola region tau_eps


@dataclass(frozen=True)
class TauEpsBounds:
    eps: float
    naive: BoundValue
    rect_cube_root: BoundValue
    triangle_bound: BoundValue
    lower_bound: BoundValue
    best_upper: BoundValue

    def to_json(self) -> dict:
        return {k: (v.to_json() if isinstance(v, BoundValue) else v) for k, v in self.__dict__.items()}


def tau_eps_bounds(eps: float, digits: int = DEFAULT_DIGITS) -> TauEpsBounds:
    """Upper and lower bounds on the rectangular diameter of ``{xy <= eps}``."""
    if not 0 < eps <= 1:
        raise ValueError("eps must lie in (0, 1]")
    naive = _apply("naive", digits)
    rect = _apply("rect_cube_root", digits, eps=eps)
    tri = _apply("triangle_bound", digits, eps=eps)
    lower = _apply("lower_bound", digits, eps=eps)
    best = _apply("min", digits, (naive, rect, tri), naive=naive, rect=rect, tri=tri)
    if lower.value.value > best.value.value:
        raise AssertionError("lower bound exceeds the best upper bound")
    return TauEpsBounds(eps, naive, rect, tri, lower, best)


def tau_eps_crossover() -> float:
    """``eps`` at which the rectangle and triangle bounds coincide:
    ``2 sqrt(eps) - eps = 4 / e^2``."""
    target = 4 / np.e**2
    return brentq(lambda e: 2 * np.sqrt(e) - e - target, 1e-6, 1.0, xtol=1e-15)


# ---------------------------------------------------------------------------
# The region attached to zeta(2)

T_MAX = ((0.0, 0.0), (0.0, 1.05), (0.098, 0.653))
T_MIN = ((0.0, 0.25), (0.0, 0.99), (0.0885, 0.63))


@dataclass(frozen=True)
class Zeta2RegionBound:
    lower: BoundValue
    upper: BoundValue
    five_param: BoundValue
    vol_max: mpmath.mpf
    vol_min: mpmath.mpf
    labels: tuple[str, ...] = ("Sup^rec(tau)^2", "Sup^hom_(1,1)(tau)^2")

    def checks(self) -> dict[str, bool]:
        return {
            "lower > 0.017": self.lower.value.value > mpmath.mpf("0.017"),
            "upper < 0.023": self.upper.value.value < mpmath.mpf("0.023"),
            "five_param < 0.003488": self.five_param.value.value < mpmath.mpf("0.003488"),
        }

    def to_json(self) -> dict:
        return {
            "lower": self.lower.to_json(),
            "upper": self.upper.to_json(),
            "five_param": self.five_param.to_json(),
            "vol_max": mpmath.nstr(self.vol_max, 15),
            "vol_min": mpmath.nstr(self.vol_min, 15),
            "labels": list(self.labels),
            "checks": self.checks(),
        }


def zeta2_region_bound(digits: int = DEFAULT_DIGITS) -> Zeta2RegionBound:
    """Squared diameter bounds from triangles inside and around the image region.

    Both bounds are ``(vol / (2 e^2))^(2/3)``; the five-parameter bound is
    the upper one raised to ``3/2``.
    """
    with mpmath.workdps(digits + 10):
        vmax = triangle_volume(*[(mpmath.mpf(str(a)), mpmath.mpf(str(b))) for a, b in T_MAX])
        vmin = triangle_volume(*[(mpmath.mpf(str(a)), mpmath.mpf(str(b))) for a, b in T_MIN])
    upper = _apply("squared_triangle_bound", digits, vol=vmax)
    lower = _apply("squared_triangle_bound", digits, vol=vmin)
    five = _apply("power", digits, (upper,), base=upper, exponent=mpmath.mpf(3) / 2)
    return Zeta2RegionBound(lower, upper, five, vmax, vmin)


# ---------------------------------------------------------------------------
# The one-parameter constants


@dataclass(frozen=True)
class EtaConstants:
    eta: mpmath.mpf
    theta_classical: mpmath.mpf
    theta_one: mpmath.mpf
    grid_max: float
    grid_step: float

    def to_json(self) -> dict:
        return {
            "eta": mpmath.nstr(self.eta, 20),
            "theta_classical": mpmath.nstr(self.theta_classical, 20),
            "theta_one": mpmath.nstr(self.theta_one, 20),
            "grid_max": self.grid_max,
            "grid_step": self.grid_step,
        }


def one_param_function(x, y):
    return x * (1 - x) * y * (1 - y) / (1 - x * y)


def eta_critical(digits: int = DEFAULT_DIGITS, grid: int = 2000) -> EtaConstants:
    """Maximum of ``x(1-x)y(1-y)/(1-xy)`` on the unit square and the derived thresholds."""
    with mpmath.workdps(digits + 10):
        eta = (5 * mpmath.sqrt(5) - 11) / 2
        theta_classical = -mpmath.log(eta) / 2
        theta_one = -mpmath.log(eta / 4) / 3
    t = np.linspace(0.0, 1.0, grid + 1)[1:-1]
    best = 0.0
    for chunk in np.array_split(t, max(1, len(t) // 250)):
        vals = one_param_function(chunk[:, None], t[None, :])
        best = max(best, float(vals.max()))
    return EtaConstants(eta, theta_classical, theta_one, best, 1.0 / grid)


def intuitive_threshold(r: int, w: float, digits: int = DEFAULT_DIGITS) -> BoundValue:
    """``exp((w/r)(2r+1)/(r+1))``: a diameter below its reciprocal suffices."""
    if r < 1 or w < 0:
        raise ValueError("need r >= 1 and w >= 0")
    return _apply("intuitive_threshold", digits, r=r, w=w)

