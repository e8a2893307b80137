"""Monomial bases of filtered modules and their exponent functions.

A basis element is a :class:`Monomial` in named ambient variables. For the
period families the variables are either the dihedral coordinates
``u1..u5`` or the pulled-back functions ``f1 = u2*u4`` and ``f2 = u1*u3*u5``;
:func:`expand_element` rewrites any element as an integer combination of
exponent vectors in ``u1..u5``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

FAMILIES = ("one_param", "two_param", "two_param_g", "two_copies", "five_param")

U_VARS = ("u1", "u2", "u3", "u4", "u5")


@dataclass(frozen=True, order=True)
class Monomial:
    exponents: tuple[int, ...]
    coef: int = 1

    def __post_init__(self):
        if any(e < 0 for e in self.exponents):
            raise ValueError(f"negative exponent in {self.exponents}")

    @property
    def degree(self) -> int:
        return sum(self.exponents)

    def __mul__(self, other: "Monomial") -> "Monomial":
        return Monomial(tuple(a + b for a, b in zip(self.exponents, other.exponents)),
                        self.coef * other.coef)

    def evaluate(self, point) -> float:
        """Value at a numeric point (any type supporting ``**`` and ``*``)."""
        out = self.coef
        for z, e in zip(point, self.exponents):
            if e:
                out = out * z**e
        return out


@dataclass(frozen=True)
class ModuleBasis:
    family: str
    n: int
    variables: tuple[str, ...]
    monomials: tuple[Monomial, ...]
    e_n: Fraction
    degree: int = field(default=0)

    def __post_init__(self):
        if len(set(self.monomials)) != len(self.monomials):
            raise ValueError("basis monomials must be pairwise distinct")

    @property
    def rank(self) -> int:
        return len(self.monomials)

    @property
    def dim(self) -> int:
        return len(self.variables)

    def __len__(self) -> int:
        return self.rank

    def __iter__(self):
        return iter(self.monomials)

    def exponent_matrix(self):
        import numpy as np

        return np.array([m.exponents for m in self.monomials], dtype=int)

    def permuted(self, order: Sequence[int]) -> "ModuleBasis":
        return ModuleBasis(self.family, self.n, self.variables,
                           tuple(self.monomials[i] for i in order), self.e_n, self.degree)

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "n": self.n,
            "rank": self.rank,
            "e_n": str(self.e_n),
            "variables": list(self.variables),
            "monomials": [list(m.exponents) for m in self.monomials],
        }


def _graded(exps) -> list[tuple[int, ...]]:
    # total degree first, then the earlier variables' powers first
    return sorted(exps, key=lambda e: (sum(e), tuple(-c for c in e)))


def _total_degree(monos) -> int:
    return sum(m.degree for m in monos)


def rectangular_basis(*sizes: int, family: str = "rectangular", variables=None) -> ModuleBasis:
    """Monomials with exponent of ``x_i`` below ``sizes[i]``."""
    if not sizes or any(n < 1 for n in sizes):
        raise ValueError("rectangular sizes must be positive")
    exps = _graded(itertools.product(*(range(n) for n in sizes)))
    monos = tuple(Monomial(e) for e in exps)
    deg = _total_degree(monos)
    rank = math.prod(sizes)
    assert 2 * deg == rank * (sum(sizes) - len(sizes))
    variables = tuple(variables) if variables else tuple(f"x{i + 1}" for i in range(len(sizes)))
    return ModuleBasis(family, max(sizes), variables, monos, Fraction(deg), deg)


def homogeneous_basis(n: int, r: int) -> ModuleBasis:
    """Monomials in ``r`` variables of total degree below ``n``."""
    if n < 1 or r < 1:
        raise ValueError("n and r must be positive")
    exps = _graded(e for e in itertools.product(range(n), repeat=r) if sum(e) < n)
    monos = tuple(Monomial(e) for e in exps)
    deg = _total_degree(monos)
    assert deg == r * math.comb(n + r - 1, r + 1)
    return ModuleBasis("homogeneous", n, tuple(f"x{i + 1}" for i in range(r)), monos, Fraction(deg), deg)


def one_param_basis(n: int) -> ModuleBasis:
    """Powers ``f^k``, ``k < n``, of ``f = u1 u2 u3 u4 u5``."""
    b = rectangular_basis(n, family="one_param", variables=("f",))
    return b


def two_param_basis(n: int) -> ModuleBasis:
    """``f1^i f2^j`` with ``i, j < n``; rank ``n^2``, exponent ``n^2 (n-1)``."""
    return rectangular_basis(n, n, family="two_param", variables=("f1", "f2"))


def two_param_g_basis(n: int) -> ModuleBasis:
    """Same shape as :func:`two_param_basis` in ``g1 = u3``, ``g2 = u1 + u5``."""
    b = rectangular_basis(n, n, family="two_param_g", variables=("g1", "g2"))
    return b


def two_copies_basis(n: int) -> ModuleBasis:
    """``M_n`` plus ``u1 * M_n`` for the two-parameter ``M_n``.

    The exponent is fixed at ``2 n^2 (n-1)``, twice the single-copy value.
    """
    if n < 1:
        raise ValueError("n must be positive")
    base = two_param_basis(n)
    monos = tuple(Monomial(m.exponents + (0,)) for m in base.monomials) + tuple(
        Monomial(m.exponents + (1,)) for m in base.monomials
    )
    return ModuleBasis("two_copies", n, ("f1", "f2", "u1"), monos,
                       Fraction(2 * n * n * (n - 1)), _total_degree(monos))


def m05_pairs(n: int) -> list[tuple[int, int, int]]:
    """``(i, a, b)`` for ``u_i^a u_{i+1}^b``: by degree, then ``a`` ascending, then ``i``."""
    out = []
    for d in range(1, n + 1):
        for a in range(1, d + 1):
            for i in range(1, 6):
                out.append((i, a, d - a))
    return out


def m05_basis(n: int) -> ModuleBasis:
    """``1`` together with ``u_i^a u_{i+1}^b`` for ``a >= 1``, ``a + b <= n``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    monos = [Monomial((0, 0, 0, 0, 0))]
    for i, a, b in m05_pairs(n):
        e = [0] * 5
        e[i - 1] += a
        e[i % 5] += b
        monos.append(Monomial(tuple(e)))
    e_n = Fraction(5 * n * (n + 1) * (2 * n + 1), 6)
    monos = tuple(monos)
    assert _total_degree(monos) == e_n
    return ModuleBasis("five_param", n, U_VARS, monos, e_n, _total_degree(monos))


def m05_rank(n: int) -> int:
    return 1 + 5 * n * (n + 1) // 2


def poincare_coefficients(max_n: int) -> list[int]:
    """Coefficients of ``(1 + 3t + t^2) / (1 - t)^2`` through ``t^max_n``."""
    num = [1, 3, 1]
    return [sum(c * (d - k + 1) for k, c in enumerate(num) if k <= d) for d in range(max_n + 1)]


def poincare_check(max_n: int) -> bool:
    """Graded rank increments of :func:`m05_basis` match the Poincare series."""
    if max_n > 12:
        raise ValueError("max_n must be at most 12")
    ranks = [m05_basis(d).rank for d in range(max_n + 1)]
    increments = [ranks[0]] + [ranks[d] - ranks[d - 1] for d in range(1, max_n + 1)]
    return increments == poincare_coefficients(max_n)


def family_basis(family: str, n: int) -> ModuleBasis:
    builders = {
        "one_param": one_param_basis,
        "two_param": two_param_basis,
        "two_param_g": two_param_g_basis,
        "two_copies": two_copies_basis,
        "five_param": m05_basis,
    }
    if family not in builders:
        raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")
    return builders[family](n)


def binomial_expand_g_basis(a: int, b: int) -> list[tuple[int, tuple[int, ...]]]:
    """``u3^a (u1 + u5)^b`` as ``[(C(b, k), exponent vector)]``, ``k`` descending."""
    if a < 0 or b < 0:
        raise ValueError("a and b must be non-negative")
    return [(math.comb(b, k), (k, 0, a, 0, b - k)) for k in range(b, -1, -1)]


def to_exponent_vector(family: str, monomial: Monomial | Sequence[int]) -> tuple[int, ...]:
    """The monomial rewritten in ``u1..u5`` (only for monomial families)."""
    e = monomial.exponents if isinstance(monomial, Monomial) else tuple(monomial)
    if family == "one_param":
        (k,) = e
        return (k,) * 5
    if family == "two_param":
        i, j = e
        return (j, i, j, i, j)
    if family == "two_copies":
        i, j, c = e
        return (j + c, i, j, i, j)
    if family == "five_param":
        return tuple(e)
    raise ValueError(f"family {family!r} has no monomial exponent map")


def expand_element(family: str, monomial: Monomial) -> list[tuple[int, tuple[int, ...]]]:
    """Integer combination of u-exponent vectors equal to ``monomial``."""
    if family == "two_param_g":
        a, b = monomial.exponents
        return [(monomial.coef * c, v) for c, v in binomial_expand_g_basis(a, b)]
    return [(monomial.coef, to_exponent_vector(family, monomial))]


# ---------------------------------------------------------------------------
# Change of variables (x, y) -> (xy, x + y)


def _poly_mul(p: dict, q: dict) -> dict:
    out: dict = {}
    for (a, b), c in p.items():
        for (d, e), f in q.items():
            key = (a + d, b + e)
            out[key] = out.get(key, 0) + c * f
    return {k: v for k, v in out.items() if v}


def _poly_pow(p: dict, k: int) -> dict:
    out = {(0, 0): 1}
    for _ in range(k):
        out = _poly_mul(out, p)
    return out


def _exact_rank(polys: list[dict]) -> int:
    keys = sorted({k for p in polys for k in p})
    rows = [[Fraction(p.get(k, 0)) for k in keys] for p in polys]
    rank, col = 0, 0
    while rank < len(rows) and col < len(keys):
        piv = next((r for r in range(rank, len(rows)) if rows[r][col]), None)
        if piv is None:
            col += 1
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for r in range(rank + 1, len(rows)):
            if rows[r][col]:
                f = rows[r][col] / rows[rank][col]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
        col += 1
    return rank


def _uv_tensor_x(i: int, j: int, eps: int) -> dict:
    u, v, x = {(1, 1): 1}, {(1, 0): 1, (0, 1): 1}, {(1, 0): 1}
    return _poly_mul(_poly_mul(_poly_pow(u, i), _poly_pow(v, j)), _poly_pow(x, eps))


@dataclass(frozen=True)
class PhiRankIdentity:
    """Exact ranks behind ``M_n = (P_{n-1} (x) N) + C_n`` and
    ``P_n (x) N = M_n + K_n`` inside ``Q[x, y]``.

    ``M_n``: ``x^i y^j`` with ``i, j < n``. ``P_n``: ``(xy)^i (x+y)^j`` with
    ``i + j < n``. ``N = {1, x}``. ``C_n``: ``x^i y^(n-1)``. ``K_n``:
    ``x (xy)^i (x+y)^j`` with ``i + j = n - 1``.
    """

    n: int
    rank_m: int
    rank_p_prev_n: int
    rank_c: int
    rank_m_split: int
    rank_pn: int
    rank_k: int
    rank_m_plus_k: int
    rank_all: int

    @property
    def first_holds(self) -> bool:
        n = self.n
        return (self.rank_m == n * n and self.rank_p_prev_n + self.rank_c == self.rank_m_split
                and self.rank_m_split == self.rank_m)

    @property
    def second_holds(self) -> bool:
        return (self.rank_pn == self.rank_m + self.rank_k == self.rank_m_plus_k == self.rank_all)

    def __bool__(self):
        return self.first_holds and self.second_holds


def phi_rank_identity(n: int) -> PhiRankIdentity:
    if not 1 <= n <= 8:
        raise ValueError("n must lie in 1..8")
    m = [{(i, j): 1} for i in range(n) for j in range(n)]
    p_prev = [_uv_tensor_x(i, j, e) for i in range(n - 1) for j in range(n - 1 - i) for e in (0, 1)]
    c = [{(i, n - 1): 1} for i in range(n)]
    pn = [_uv_tensor_x(i, j, e) for i in range(n) for j in range(n - i) for e in (0, 1)]
    k = [_uv_tensor_x(i, n - 1 - i, 1) for i in range(n)]
    # the split spans lie inside M_n only if adding M_n does not raise the rank
    split = _exact_rank(p_prev + c)
    split_in_m = _exact_rank(p_prev + c + m)
    rank_m = _exact_rank(m)
    return PhiRankIdentity(
        n=n,
        rank_m=rank_m,
        rank_p_prev_n=_exact_rank(p_prev),
        rank_c=_exact_rank(c),
        rank_m_split=split if split_in_m == rank_m else -1,
        rank_pn=_exact_rank(pn),
        rank_k=_exact_rank(k),
        rank_m_plus_k=_exact_rank(m + k),
        rank_all=_exact_rank(pn + m + k),
    )
