"""Integral rescaling of Gram matrices, denominator bookkeeping and small
integral linear forms in ``1, zeta(2)``."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

from .bases import expand_element, family_basis
from .contiguity import pole_vector
from .exactnum import (
    GUARD_DIGITS,
    BigFloat,
    IntFactorization,
    LinearForm,
    factorint,
    lcm_consecutive,
    zeta2,
)
from .gram import DEFAULT_EXACT_LIMIT, GramMatrix, numeric_det


class AllZero(ArithmeticError):
    pass


@dataclass(frozen=True)
class IntegerizedGram:
    d_left: tuple[int, ...]
    d_right: tuple[Fraction, ...]
    a_tilde: tuple[tuple[tuple[int, int], ...], ...]
    delta: Fraction

    @property
    def size(self) -> int:
        return len(self.a_tilde)

    def form(self, i: int, j: int) -> LinearForm:
        c, x = self.a_tilde[i][j]
        return LinearForm(c, x)

    def delta_factored(self) -> tuple[IntFactorization, IntFactorization]:
        return factorint(self.delta.numerator), factorint(self.delta.denominator)

    def is_integral(self) -> bool:
        return all(isinstance(c, int) and isinstance(x, int) for row in self.a_tilde for c, x in row)

    def numeric(self, digits: int) -> mpmath.matrix:
        xi = zeta2(max(digits, 10)).value
        with mpmath.workdps(digits):
            return mpmath.matrix([[c + x * xi for c, x in row] for row in self.a_tilde])


def integerize(g: GramMatrix) -> IntegerizedGram:
    """Scale rows by their denominator lcm, then divide each column by the gcd
    of its integer coefficients."""
    rows = []
    d_left = []
    for row in g.entries:
        m = math.lcm(1, *(e.denominator() for e in row))
        d_left.append(m)
        rows.append([(int(e.const * m), int(e.xi * m)) for e in row])
    size = len(rows)
    d_right = []
    for j in range(size):
        gcd = math.gcd(*(v for i in range(size) for v in rows[i][j]))
        gcd = gcd or 1
        d_right.append(Fraction(1, gcd))
        for i in range(size):
            c, x = rows[i][j]
            rows[i][j] = (c // gcd, x // gcd)
    delta = Fraction(math.prod(d_left)) * math.prod(d_right, start=Fraction(1))
    return IntegerizedGram(tuple(d_left), tuple(d_right),
                           tuple(tuple(r) for r in rows), delta)


# ---------------------------------------------------------------------------
# Denominators


def pole_denominator_bound(s: Sequence[int]) -> int:
    """``d_{m1} d_{m2}`` for the two largest pole-vector entries (clamped at 0)."""
    p = sorted((max(v, 0) for v in pole_vector(s)), reverse=True)
    return lcm_consecutive(p[0]) * lcm_consecutive(p[1])


@dataclass(frozen=True)
class DenominatorCheck:
    ok: bool
    checked: int
    violation: tuple | None = None

    def __bool__(self) -> bool:
        return self.ok


def verify_denominator(family: str, n: int) -> DenominatorCheck:
    """Every Gram entry times its pole bound has integral coefficients."""
    from .contiguity import mellin_integral

    basis = family_basis(family, n)
    expanded = [expand_element(family, m) for m in basis.monomials]
    seen: set[tuple[int, ...]] = set()
    checked = 0
    for i in range(len(expanded)):
        for j in range(i, len(expanded)):
            for _, vi in expanded[i]:
                for _, vj in expanded[j]:
                    s = tuple(a + b for a, b in zip(vi, vj))
                    if s in seen:
                        continue
                    seen.add(s)
                    checked += 1
                    value = mellin_integral(s) * pole_denominator_bound(s)
                    if not value.is_integral():
                        return DenominatorCheck(False, checked, (i, j, s, value))
    return DenominatorCheck(True, checked)


G_BASIS_LIMIT = Fraction(19, 12) + Fraction(29, 18)
FIVE_PARAM_LIMIT = Fraction(19, 4)


def denominator_asymptotics(r: int, w: int) -> Fraction:
    """Limit of ``log(delta)^(1/e_n)`` for a rectangular module in ``r``
    variables whose entries have denominators ``d_n^w``.

    ``log delta ~ w (2r+1)/(r+1) n^(r+1)`` and ``e_n ~ (r/2) n^(r+1)``.
    """
    if r < 1 or w < 0:
        raise ValueError("need r >= 1 and w >= 0")
    return Fraction(2 * w * (2 * r + 1), r * (r + 1))


def g_basis_denominator_sum(n: int) -> Fraction:
    """Normalized row-scaling exponent for the ``g1 = u3, g2 = u1 + u5`` basis.

    Sums ``max(a+n, b-a+n) + max(b+n, a-b/2+n)`` over ``0 <= a, b < n`` and
    divides by ``n^3``; tends to ``115/36``.
    """
    total = Fraction(0)
    for a in range(n):
        for b in range(n):
            total += max(a + n, b - a + n) + max(Fraction(b + n), Fraction(a) - Fraction(b, 2) + n)
    return total / n**3


def five_param_denominator_sum(n: int) -> Fraction:
    """``5 * sum (a+b+n + max(a,b)+n)`` over ``a+b <= n``, divided by ``(5/3) n^3``;
    tends to ``19/4``."""
    total = sum(a + b + n + max(a, b) + n for a in range(n + 1) for b in range(n + 1 - a))
    return Fraction(5 * total) / (Fraction(5, 3) * n**3)


# ---------------------------------------------------------------------------
# Small linear forms


@dataclass(frozen=True)
class SmallForm:
    c: tuple[int, ...]
    row: int
    value: LinearForm
    numeric: BigFloat
    bound: BigFloat
    slack: float
    method: str

    def to_json(self) -> dict:
        return {
            "c": list(self.c),
            "i": self.row,
            "value": str(self.value),
            "numeric": self.numeric.to_json(),
            "bound": self.bound.to_json(),
            "slack": self.slack,
            "method": self.method,
        }


def _exact_row_values(ig: IntegerizedGram, c: Sequence[int]) -> list[LinearForm]:
    out = []
    for row in ig.a_tilde:
        const = sum(rc * cj for (rc, _), cj in zip(row, c))
        xi = sum(rx * cj for (_, rx), cj in zip(row, c))
        out.append(LinearForm(const, xi))
    return out


def _pick_row(ig, c, digits):
    vals = _exact_row_values(ig, c)
    best = None
    for i, v in enumerate(vals):
        if not v:
            continue
        num = v.evaluate(digits)
        if best is None or abs(num.value) < abs(best[2].value):
            best = (i, v, num)
    return best


def _exhaustive(a: np.ndarray, radius: int) -> tuple[np.ndarray, float]:
    """Integer vector with entries in ``[-radius, radius]`` minimizing the
    sup norm of ``a @ c`` over non-zero ``c``."""
    size = a.shape[1]
    rng = np.arange(-radius, radius + 1)
    tail = np.array(list(itertools.product(rng, repeat=size - 1)), dtype=np.int64).reshape(-1, size - 1)
    tail_vals = tail @ a[:, 1:].T if size > 1 else np.zeros((1, a.shape[0]))
    best_c, best_v = None, math.inf
    for lead in range(0, radius + 1):  # c and -c give the same norm
        vals = np.abs(tail_vals + lead * a[:, 0]).max(axis=1)
        if lead == 0:
            nonzero = np.any(tail != 0, axis=1)
            vals = np.where(nonzero, vals, np.inf)
        k = int(np.argmin(vals))
        if vals[k] < best_v:
            best_v = float(vals[k])
            best_c = np.concatenate([[lead], tail[k]]) if size > 1 else np.array([lead])
    return best_c, best_v


def lll_reduce(basis: list[list[int]], delta: Fraction = Fraction(3, 4)):
    """LLL on the rows of an integer matrix with exact rational Gram-Schmidt.

    Returns ``(reduced, transform)`` with ``reduced = transform @ basis``.
    """
    b = [list(map(int, row)) for row in basis]
    n = len(b)
    u = [[int(i == j) for j in range(n)] for i in range(n)]

    def dot(x, y):
        return sum(p * q for p, q in zip(x, y))

    def gram_schmidt():
        bstar, mu, norms = [], [[Fraction(0)] * n for _ in range(n)], []
        for i in range(n):
            v = [Fraction(x) for x in b[i]]
            for j in range(i):
                mu[i][j] = dot(b[i], bstar[j]) / norms[j] if norms[j] else Fraction(0)
                v = [vi - mu[i][j] * bj for vi, bj in zip(v, bstar[j])]
            bstar.append(v)
            norms.append(dot(v, v))
        return mu, norms

    mu, norms = gram_schmidt()
    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            q = round(mu[k][j])
            if q:
                b[k] = [x - q * y for x, y in zip(b[k], b[j])]
                u[k] = [x - q * y for x, y in zip(u[k], u[j])]
                for t in range(j + 1):
                    mu[k][t] -= q * (mu[j][t] if t < j else 1)
        if norms[k] >= (delta - mu[k][k - 1] ** 2) * norms[k - 1]:
            k += 1
        else:
            b[k], b[k - 1] = b[k - 1], b[k]
            u[k], u[k - 1] = u[k - 1], u[k]
            mu, norms = gram_schmidt()
            k = max(k - 1, 1)
    return b, u


def extract_small_form(ig: IntegerizedGram, precision: int = 50, radius: int = 8,
                       exhaustive_limit: int = 6) -> SmallForm:
    """A non-zero integral form ``sum_j A[i][j] c_j`` of small absolute value.

    Minkowski's theorem guarantees some non-zero ``c`` with every row of
    ``A c`` bounded by ``|det A|^(1/N)``. Small sizes are searched
    exhaustively; larger ones use an LLL-reduced embedding of the columns.
    """
    size = ig.size
    det_num = _integerized_det(ig, precision)
    if det_num.value == 0:
        raise ValueError("integerized matrix is singular")
    digits = det_num.precision
    with mpmath.workdps(digits + GUARD_DIGITS):
        bound = mpmath.exp(mpmath.log(abs(det_num.value)) / size)
    if size <= exhaustive_limit:
        a = np.array([[float(c + x * zeta2(20).value) for c, x in row] for row in ig.a_tilde])
        c, _ = _exhaustive(a, radius)
        method = "exhaustive"
        c = tuple(int(v) for v in c)
    else:
        c = _lll_vector(ig, digits, bound)
        method = "lll"
    picked = _pick_row(ig, c, digits)
    if picked is None:
        raise AllZero("every row of the chosen combination vanishes identically")
    i, value, num = picked
    slack = float(abs(num.value) / bound)
    return SmallForm(tuple(c), i, value, num, BigFloat(bound, digits), slack, method)


def _lll_vector(ig: IntegerizedGram, digits: int, bound) -> tuple[int, ...]:
    size = ig.size
    # scale so that values down to the Minkowski bound survive rounding
    mag = max(0, -int(mpmath.floor(mpmath.log10(bound))))
    scale_digits = max(digits // 2, mag + 20)
    work = scale_digits + GUARD_DIGITS + 20
    xi = zeta2(work).value
    with mpmath.workdps(work):
        scale = mpmath.mpf(10) ** scale_digits
        # rows of `cols` are the lattice generators S * A[:, j]
        cols = [[int(mpmath.nint(scale * (ig.a_tilde[i][j][0] + ig.a_tilde[i][j][1] * xi)))
                 for i in range(size)] for j in range(size)]
    reduced, transform = lll_reduce(cols)
    best, best_norm = None, None
    for vec, coeffs in zip(reduced, transform):
        if not any(coeffs):
            continue
        norm = max(abs(v) for v in vec)
        if best_norm is None or norm < best_norm:
            best, best_norm = coeffs, norm
    return tuple(int(v) for v in best)


def _integerized_det(ig: IntegerizedGram, precision: int) -> BigFloat:
    return numeric_det(ig.numeric, precision)


def det_criterion_series(family: str, n_max: int, n_min: int = 2,
                         exact_limit: int = DEFAULT_EXACT_LIMIT) -> list[tuple[int, float]]:
    """``(n, d_n |det Q_n|)`` for ``n_min <= n <= n_max``."""
    from .gram import report

    out = []
    for n in range(n_min, n_max + 1):
        r = report(family, n, 50, exact_limit)
        with mpmath.workdps(r.det_numeric.precision):
            out.append((n, float(r.d_n.value * abs(r.det_numeric.value))))
    return out
