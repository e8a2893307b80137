"""Generalized Vandermonde matrices and the determinant of an amalgam."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

from .bases import ModuleBasis, Monomial
from .exactnum import BigFloat
from .gram import rational_det


class DimensionMismatch(ValueError):
    pass


class ShapeError(ValueError):
    pass


class SizeLimit(ValueError):
    pass


def _is_exact(z) -> bool:
    return all(isinstance(c, (int, Fraction)) for p in z for c in (p if isinstance(p, (tuple, list)) else (p,)))


def _as_points(z, dim):
    pts = [tuple(p) if isinstance(p, (tuple, list, np.ndarray)) else (p,) for p in z]
    if any(len(p) != dim for p in pts):
        raise DimensionMismatch(f"points must have dimension {dim}")
    return pts


def vdm_matrix(basis: ModuleBasis, z):
    """``V[i][j] = m_j(z_i)``.

    Rational points give a list of lists of :class:`Fraction`; anything else
    gives a float array.
    """
    pts = _as_points(z, basis.dim)
    if len(pts) != basis.rank:
        raise DimensionMismatch(f"need {basis.rank} points, got {len(pts)}")
    if _is_exact(pts):
        return [[Fraction(m.evaluate([Fraction(c) for c in p])) for m in basis.monomials] for p in pts]
    return vdm_values(basis, np.asarray(pts, dtype=float))


def vdm_values(basis_or_exps, pts: np.ndarray) -> np.ndarray:
    """Float monomial values, shape ``(k, rank)``, for points of shape ``(k, dim)``."""
    exps = basis_or_exps.exponent_matrix() if isinstance(basis_or_exps, ModuleBasis) else np.asarray(basis_or_exps)
    pts = np.asarray(pts, dtype=float).reshape(-1, exps.shape[1])
    out = np.ones((pts.shape[0], exps.shape[0]))
    for k in range(exps.shape[1]):
        col = exps[:, k]
        if col.any():
            out *= pts[:, k:k + 1] ** col[None, :]
    return out


def vdm_det_abs(basis: ModuleBasis, z, precision: int = 30) -> BigFloat:
    v = vdm_matrix(basis, z)
    if isinstance(v, list):
        d = abs(rational_det(v))
        with mpmath.workdps(precision):
            return BigFloat(mpmath.mpf(d.numerator) / d.denominator, precision)
    sign, logdet = np.linalg.slogdet(v)
    value = mpmath.mpf(0) if sign == 0 else mpmath.exp(mpmath.mpf(logdet))
    return BigFloat(value, 12)


def log_abs_det(basis: ModuleBasis, pts: np.ndarray) -> float:
    sign, logdet = np.linalg.slogdet(vdm_values(basis, pts))
    return -math.inf if sign == 0 else float(logdet)


# ---------------------------------------------------------------------------
# Amalgam


@dataclass(frozen=True)
class AmalgamPair:
    a: tuple[tuple, ...]
    b: tuple[tuple, ...]

    def __post_init__(self):
        rows = len(self.a)
        if rows != len(self.b):
            raise ShapeError("A and B must have the same number of rows")
        m = len(self.a[0]) if rows else 0
        n = len(self.b[0]) if rows else 0
        if rows != m * n:
            raise ShapeError(f"row count {rows} must equal m*n = {m * n}")

    @property
    def m(self) -> int:
        return len(self.a[0])

    @property
    def n(self) -> int:
        return len(self.b[0])

    @classmethod
    def of(cls, a, b) -> "AmalgamPair":
        return cls(tuple(tuple(r) for r in a), tuple(tuple(r) for r in b))


def amalgam(pair: AmalgamPair) -> list[list]:
    """Row ``i`` is ``a_i (x) b_i`` ordered ``(a1 b1, ..., am b1, a1 b2, ...)``."""
    return [[ra[k] * rb[l] for l in range(pair.n) for k in range(pair.m)]
            for ra, rb in zip(pair.a, pair.b)]


def h_constant(m: int, n: int) -> int:
    """``prod_{i<n} (m+i)! / i!``."""
    if m < 1 or n < 1:
        raise ValueError("m and n must be positive")
    return math.prod(math.factorial(m + i) // math.factorial(i) for i in range(n))


def permutation_sign(perm: Sequence[int]) -> int:
    seen = [False] * len(perm)
    sign = 1
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def _det(rows):
    if rows and isinstance(rows[0][0], (int, Fraction)):
        return rational_det([[Fraction(x) for x in r] for r in rows])
    return float(np.linalg.det(np.asarray(rows, dtype=float)))


def amalgam_det_formula(pair: AmalgamPair, limit: int = 8):
    """Signed sum over all permutations of the tableau, divided by ``H_{m,n}``.

    The tableau has ``m`` rows and ``n`` columns filled with ``1..mn`` down
    the columns. For a permutation ``s`` the column sets index ``m x m``
    minors of ``A`` and the row sets index ``n x n`` minors of ``B``.
    """
    m, n = pair.m, pair.n
    size = m * n
    if size > limit:
        raise SizeLimit(f"m*n = {size} exceeds the permutation-sum limit {limit}")
    a, b = pair.a, pair.b
    minor_a: dict[tuple[int, ...], object] = {}
    minor_b: dict[tuple[int, ...], object] = {}

    def det_a(idx):
        if idx not in minor_a:
            minor_a[idx] = _det([a[i] for i in idx])
        return minor_a[idx]

    def det_b(idx):
        if idx not in minor_b:
            minor_b[idx] = _det([b[i] for i in idx])
        return minor_b[idx]

    # tableau cell (row r, column c) holds r + c*m
    columns = [[r + c * m for r in range(m)] for c in range(n)]
    rows = [[r + c * m for c in range(n)] for r in range(m)]
    total = 0
    for perm in itertools.permutations(range(size)):
        term_a = 1
        for col in columns:
            term_a *= det_a(tuple(perm[k] for k in col))
            if term_a == 0:
                break
        if term_a == 0:
            continue
        term_b = 1
        for row in rows:
            term_b *= det_b(tuple(perm[k] for k in row))
            if term_b == 0:
                break
        if term_b == 0:
            continue
        total += permutation_sign(perm) * term_a * term_b
    h = h_constant(m, n)
    return Fraction(total, h) if isinstance(total, (int, Fraction)) else total / h


# ---------------------------------------------------------------------------
# Tensor and direct-sum bounds


class NotFree(ValueError):
    pass


def tensor_basis(b1: ModuleBasis, b2: ModuleBasis) -> ModuleBasis:
    """Products ``m1 * m2``, ordered as the amalgam columns; raises
    :class:`NotFree` when two products coincide."""
    if b1.variables != b2.variables:
        raise DimensionMismatch("tensor factors must share ambient variables")
    monos = tuple(m1 * m2 for m2 in b2.monomials for m1 in b1.monomials)
    if len(set(monos)) != len(monos):
        raise NotFree("products of basis elements are linearly dependent")
    deg = sum(m.degree for m in monos)
    return ModuleBasis("tensor", max(b1.n, b2.n), b1.variables, monos, Fraction(deg), deg)


@dataclass(frozen=True)
class TensorCheck:
    holds: bool
    free: bool
    configurations: int
    worst_ratio: float
    sampled_lhs: float
    sampled_rhs: float

    def __bool__(self):
        return self.holds


def _max_minor(values: np.ndarray, k: int) -> float:
    best = 0.0
    for idx in itertools.combinations(range(values.shape[0]), k):
        best = max(best, abs(float(np.linalg.det(values[list(idx)]))))
    return best


def tensor_bound_check(b1: ModuleBasis, b2: ModuleBasis, region, samples: int = 1000,
                       seed: int = 0) -> TensorCheck:
    """Check ``|det V_{N1 (x) N2}(z)| <= (n1 n2)!/H * t1^n2 * t2^n1`` on random ``z``.

    For each configuration the suprema ``t1, t2`` are replaced by the largest
    minors over subsets of the same configuration, which is exactly what the
    permutation-sum formula bounds the determinant by. The returned
    ``sampled_*`` fields compare the best sampled left side with the bound
    built from the best sampled minors over all configurations.
    """
    n1, n2 = b1.rank, b2.rank
    if n1 * n2 > 9:
        raise SizeLimit("tensor check is limited to n1*n2 <= 9")
    try:
        bt = tensor_basis(b1, b2)
    except NotFree:
        return TensorCheck(True, False, 0, 0.0, 0.0, 0.0)
    const = math.factorial(n1 * n2) / h_constant(n1, n2)
    rng = np.random.default_rng(seed)
    worst, best_lhs, best_t1, best_t2 = 0.0, 0.0, 0.0, 0.0
    holds = True
    for _ in range(samples):
        z = region.sample(rng, n1 * n2)
        amb = region.to_ambient(z)
        lhs = abs(float(np.linalg.det(vdm_values(bt, amb))))
        t1 = _max_minor(vdm_values(b1, amb), n1)
        t2 = _max_minor(vdm_values(b2, amb), n2)
        rhs = const * t1**n2 * t2**n1
        best_lhs, best_t1, best_t2 = max(best_lhs, lhs), max(best_t1, t1), max(best_t2, t2)
        if rhs > 0:
            worst = max(worst, lhs / rhs)
        if lhs > rhs * (1 + 1e-9) + 1e-300:
            holds = False
    sampled_rhs = const * best_t1**n2 * best_t2**n1
    return TensorCheck(holds, True, samples, worst, best_lhs, sampled_rhs)


def directsum_bound_check(b1: ModuleBasis, b2: ModuleBasis, region, samples: int = 200,
                          seed: int = 0) -> bool:
    """``|det V_{N1 (+) N2}(z)| <= C(n1+n2, n1) max|minor_1| max|minor_2|`` on random ``z``."""
    n1, n2 = b1.rank, b2.rank
    exps = np.vstack([b1.exponent_matrix(), b2.exponent_matrix()])
    const = math.comb(n1 + n2, n1)
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        amb = region.to_ambient(region.sample(rng, n1 + n2))
        lhs = abs(float(np.linalg.det(vdm_values(exps, amb))))
        rhs = const * _max_minor(vdm_values(b1, amb), n1) * _max_minor(vdm_values(b2, amb), n2)
        if lhs > rhs * (1 + 1e-9) + 1e-300:
            return False
    return True


def basis_from_exponents(exps, variables=("x1", "x2")) -> ModuleBasis:
    monos = tuple(Monomial(tuple(e)) for e in exps)
    deg = sum(m.degree for m in monos)
    return ModuleBasis("custom", 0, tuple(variables), monos, Fraction(deg), deg)
