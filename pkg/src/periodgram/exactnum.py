"""Exact rationals, linear forms in zeta(2), polynomials in zeta(2) and
high-precision evaluation.

Rationals are plain :class:`fractions.Fraction` values. A :class:`LinearForm`
is ``a + b*xi`` and a :class:`XiPolynomial` is a polynomial in ``xi``; ``xi``
always stands for zeta(2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence, Union

import mpmath

Rational = Union[int, Fraction]

GUARD_DIGITS = 10
TRIAL_DIVISION_BOUND = 10**6


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_rational(x)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


def format_rational(q: Fraction) -> str:
    """Serialize as ``"p/q"`` (the denominator is always written)."""
    q = as_fraction(q)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(text: str) -> Fraction:
    return Fraction(text.strip())


@dataclass(frozen=True)
class BigFloat:
    """A multiprecision real tagged with the number of decimal digits it is
    believed correct to."""

    value: mpmath.mpf
    precision: int

    def __float__(self) -> float:
        return float(self.value)

    def __str__(self) -> str:
        return f"{mpmath.nstr(self.value, min(self.precision, 30))}@{self.precision}"

    def log(self) -> mpmath.mpf:
        with mpmath.workdps(self.precision + GUARD_DIGITS):
            return mpmath.log(self.value)

    def to_json(self) -> dict:
        return {"value": mpmath.nstr(self.value, self.precision), "precision": self.precision}


# ---------------------------------------------------------------------------
# zeta(2)


def _zeta2_scaled(digits: int) -> int:
    """zeta(2) * 10**digits, truncated, up to O(digits) units of error.

    Uses zeta(2) = 3 * sum_{k>=1} 1 / (k^2 binom(2k, k)). Consecutive terms
    shrink by a factor k^2/((2k+1)(2k+2)) < 1/4, so the tail after the last
    non-zero term is below 4/3 of that term; each term carries at most two
    units of truncation error.
    """
    scale = 10**digits
    a = scale // 2  # scale / binom(2, 1)
    total = 0
    k = 1
    while a:
        total += 3 * a // (k * k)
        a = a * (k + 1) // (2 * (2 * k + 1))
        k += 1
    return total


@lru_cache(maxsize=64)
def _zeta2_digits(precision: int) -> mpmath.mpf:
    guard = GUARD_DIGITS + len(str(precision))
    while True:
        lo = _zeta2_scaled(precision + guard)
        hi = _zeta2_scaled(precision + 2 * guard)
        # each of the ~1.7*digits terms is off by at most a few units
        if abs(lo * 10**guard - hi) <= 10**guard * 4 * (precision + 2 * guard):
            break
        guard *= 2
    with mpmath.workdps(precision + 2 * guard):
        return mpmath.mpf(hi) / mpmath.mpf(10) ** (precision + 2 * guard)


def zeta2(precision: int = 50) -> BigFloat:
    """zeta(2) = pi^2/6 correct to ``precision`` decimal digits."""
    if precision < 10:
        raise ValueError("precision must be at least 10 digits")
    return BigFloat(_zeta2_digits(precision), precision)


# ---------------------------------------------------------------------------
# Linear forms and polynomials in xi


@dataclass(frozen=True)
class LinearForm:
    """Exact value ``const + xi * zeta(2)``."""

    const: Fraction = Fraction(0)
    xi: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "const", as_fraction(self.const))
        object.__setattr__(self, "xi", as_fraction(self.xi))

    @classmethod
    def zeta2(cls) -> "LinearForm":
        return cls(0, 1)

    @classmethod
    def one(cls) -> "LinearForm":
        return cls(1, 0)

    def __add__(self, other):
        if isinstance(other, LinearForm):
            return LinearForm(self.const + other.const, self.xi + other.xi)
        if isinstance(other, (int, Fraction)):
            return LinearForm(self.const + other, self.xi)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return LinearForm(-self.const, -self.xi)

    def __sub__(self, other):
        if isinstance(other, (LinearForm, int, Fraction)):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return LinearForm(self.const * other, self.xi * other)
        if isinstance(other, LinearForm):
            return self.to_poly() * other.to_poly()
        return NotImplemented

    __rmul__ = __mul__

    def __bool__(self) -> bool:
        return bool(self.const) or bool(self.xi)

    def at(self, t: Rational) -> Fraction:
        """Substitute the rational ``t`` for xi."""
        return self.const + self.xi * t

    def to_poly(self) -> "XiPolynomial":
        return XiPolynomial((self.const, self.xi))

    def evaluate(self, precision: int = 50) -> BigFloat:
        return eval_xi(self.to_poly(), precision)

    def denominator(self) -> int:
        return math.lcm(self.const.denominator, self.xi.denominator)

    def is_integral(self) -> bool:
        return self.const.denominator == 1 and self.xi.denominator == 1

    def __str__(self) -> str:
        return f"{format_rational(self.const)} + {format_rational(self.xi)}*zeta2"

    def to_json(self) -> dict:
        return {"const_part": format_rational(self.const), "xi_part": format_rational(self.xi)}


class XiPolynomial:
    """Polynomial in xi with rational coefficients, lowest degree first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Rational] = ()):
        cs = [as_fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(cs)

    @classmethod
    def x(cls) -> "XiPolynomial":
        return cls((0, 1))

    @classmethod
    def constant(cls, c: Rational) -> "XiPolynomial":
        return cls((c,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = XiPolynomial.constant(other)
        if not isinstance(other, XiPolynomial):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"XiPolynomial({[format_rational(c) for c in self.coeffs]})"

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for k in range(self.degree, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            mono = "" if k == 0 else ("x" if k == 1 else f"x^{k}")
            terms.append(f"({c})" + (f"*{mono}" if mono else ""))
        return " + ".join(terms)

    def _coerce(self, other) -> "XiPolynomial":
        if isinstance(other, XiPolynomial):
            return other
        if isinstance(other, (int, Fraction)):
            return XiPolynomial.constant(other)
        if isinstance(other, LinearForm):
            return other.to_poly()
        raise TypeError(type(other).__name__)

    def __add__(self, other):
        o = self._coerce(other)
        n = max(len(self.coeffs), len(o.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = o.coeffs + (Fraction(0),) * (n - len(o.coeffs))
        return XiPolynomial(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __neg__(self):
        return XiPolynomial(-c for c in self.coeffs)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        if not self.coeffs or not o.coeffs:
            return XiPolynomial()
        out = [Fraction(0)] * (len(self.coeffs) + len(o.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(o.coeffs):
                    out[i + j] += a * b
        return XiPolynomial(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        out = XiPolynomial.constant(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def at(self, t: Rational) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc

    def denominator(self) -> int:
        return math.lcm(1, *(c.denominator for c in self.coeffs))

    def to_json(self) -> list[str]:
        return [format_rational(c) for c in self.coeffs]

    @classmethod
    def from_json(cls, data: Sequence[str]) -> "XiPolynomial":
        return cls(parse_rational(s) for s in data)

    @classmethod
    def interpolate(cls, xs: Sequence[Rational], ys: Sequence[Rational]) -> "XiPolynomial":
        """Unique polynomial of degree < len(xs) through the points (exact)."""
        if len(xs) != len(ys):
            raise ValueError("node and value counts differ")
        xs = [as_fraction(x) for x in xs]
        dd = [as_fraction(y) for y in ys]
        n = len(xs)
        # Newton divided differences, in place
        for j in range(1, n):
            for i in range(n - 1, j - 1, -1):
                dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - j])
        poly = [Fraction(0)] * n
        # Horner expansion of the Newton form
        for i in range(n - 1, -1, -1):
            # poly <- poly * (x - xs[i]) + dd[i]
            shifted = [Fraction(0)] + poly[:-1]
            poly = [s - xs[i] * p for s, p in zip(shifted, poly)]
            poly[0] += dd[i]
        return cls(poly)


def eval_xi(p: XiPolynomial, precision: int = 50) -> BigFloat:
    """Evaluate ``p`` at zeta(2) to ``precision`` significant digits.

    The working precision is raised until the cancellation between the
    largest term and the result is covered by guard digits.
    """
    if isinstance(p, LinearForm):
        p = p.to_poly()
    if not p.coeffs:
        return BigFloat(mpmath.mpf(0), precision)
    if p.degree == 0:
        with mpmath.workdps(precision + GUARD_DIGITS):
            c = p.coeffs[0]
            return BigFloat(mpmath.mpf(c.numerator) / c.denominator, precision)
    guard = GUARD_DIGITS + len(str(p.degree))
    # magnitude of the largest term, zeta(2) < 2
    big = max(
        (math.log10(abs(c.numerator)) - math.log10(c.denominator) + k * 0.2163
         for k, c in enumerate(p.coeffs) if c),
    )
    work = precision + guard + max(0, int(big) + 1)
    while True:
        xi = _zeta2_digits(max(work, 10))
        with mpmath.workdps(work):
            acc = mpmath.mpf(0)
            for c in reversed(p.coeffs):
                acc = acc * xi + mpmath.mpf(c.numerator) / c.denominator
            if acc == 0:
                work *= 2
                continue
            lost = big - float(mpmath.log10(abs(acc)))
        if work - lost >= precision + guard:
            return BigFloat(acc, precision)
        work = int(precision + lost + 2 * guard)


# ---------------------------------------------------------------------------
# Integer helpers


@dataclass(frozen=True)
class IntFactorization:
    """Prime factorization with a possibly composite, unsplit cofactor."""

    factors: tuple[tuple[int, int], ...]
    cofactor: int = 1

    @property
    def value(self) -> int:
        v = self.cofactor
        for p, e in self.factors:
            v *= p**e
        return v

    def as_dict(self) -> dict[int, int]:
        return dict(self.factors)

    def __str__(self) -> str:
        parts = [f"{p}^{e}" if e > 1 else str(p) for p, e in self.factors]
        if self.cofactor != 1:
            parts.append(f"[{self.cofactor}]")
        return "*".join(parts) if parts else "1"

    def to_json(self) -> dict:
        return {
            "factors": [[p, e] for p, e in self.factors],
            "cofactor": str(self.cofactor),
            "value": str(self.value),
        }


def factorint(n: int, bound: int = TRIAL_DIVISION_BOUND) -> IntFactorization:
    """Trial division by primes up to ``bound``; what remains is the cofactor."""
    if n <= 0:
        raise ValueError("factorint expects a positive integer")
    factors = []
    for p in _primes_upto(bound):
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            factors.append((p, e))
    if n > 1 and n <= bound * bound:
        # n has no factor <= sqrt(n), so it is prime
        factors.append((n, 1))
        n = 1
    return IntFactorization(tuple(factors), n)


@lru_cache(maxsize=4)
def _primes_upto(bound: int) -> tuple[int, ...]:
    sieve = bytearray([1]) * (bound + 1)
    sieve[0:2] = b"\x00\x00"
    for i in range(2, math.isqrt(bound) + 1):
        if sieve[i]:
            sieve[i * i:: i] = bytearray(len(range(i * i, bound + 1, i)))
    return tuple(i for i, flag in enumerate(sieve) if flag)


def denominator_lcm(p: XiPolynomial | LinearForm, bound: int = TRIAL_DIVISION_BOUND) -> IntFactorization:
    """Factored lcm of the coefficient denominators of ``p``."""
    return factorint(p.denominator(), bound)


@lru_cache(maxsize=None)
def lcm_consecutive(n: int) -> int:
    """lcm(1, ..., n); equals 1 for n <= 1."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if n <= 1:
        return 1
    return math.lcm(lcm_consecutive(n - 1), n)
