"""Gram matrices of period integrals, their determinants and report metrics."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np
from sklearn.base import BaseEstimator

from ._validation import check_family, check_int, check_level, check_precision
from .bases import ModuleBasis, expand_element, family_basis
from .contiguity import MellinTable, mellin_integral
from .exactnum import (
    GUARD_DIGITS,
    BigFloat,
    IntFactorization,
    LinearForm,
    XiPolynomial,
    denominator_lcm,
    eval_xi,
    factorint,
    zeta2,
)

DEFAULT_EXACT_LIMIT = 40
PRECISION_CAP = 20000


class ExactLimitExceeded(ValueError):
    pass


class PrecisionExhausted(ArithmeticError):
    pass


@dataclass(frozen=True)
class GramMatrix:
    family: str
    n: int
    basis: ModuleBasis
    entries: tuple[tuple[LinearForm, ...], ...]

    @property
    def size(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def is_symmetric(self) -> bool:
        n = self.size
        return all(self.entries[i][j] == self.entries[j][i] for i in range(n) for j in range(i))

    def at(self, t) -> list[list[Fraction]]:
        """Rational matrix obtained by substituting ``t`` for zeta(2)."""
        return [[e.at(t) for e in row] for row in self.entries]

    def numeric(self, digits: int) -> mpmath.matrix:
        xi = zeta2(max(digits, 10)).value
        with mpmath.workdps(digits):
            return mpmath.matrix(
                [[mpmath.mpf(e.const.numerator) / e.const.denominator
                  + xi * (mpmath.mpf(e.xi.numerator) / e.xi.denominator) for e in row]
                 for row in self.entries]
            )

    def permuted(self, order: Sequence[int]) -> "GramMatrix":
        return GramMatrix(self.family, self.n, self.basis.permuted(order),
                          tuple(tuple(self.entries[i][j] for j in order) for i in order))

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "n": self.n,
            "entries": [[e.to_json() for e in row] for row in self.entries],
        }


def gram_from_basis(basis: ModuleBasis, table: MellinTable | None = None) -> GramMatrix:
    """``entry(i, j)`` is the integral of the product of basis elements ``i`` and ``j``."""
    expanded = [expand_element(basis.family, m) for m in basis.monomials]
    size = len(expanded)
    cache: dict[tuple[int, ...], LinearForm] = {}

    def integral(v):
        if v not in cache:
            cache[v] = mellin_integral(v, table)
        return cache[v]

    rows = [[None] * size for _ in range(size)]
    for i in range(size):
        for j in range(i, size):
            acc = LinearForm()
            for ci, vi in expanded[i]:
                for cj, vj in expanded[j]:
                    acc = acc + integral(tuple(a + b for a, b in zip(vi, vj))) * (ci * cj)
            rows[i][j] = rows[j][i] = acc
    return GramMatrix(basis.family, basis.n, basis, tuple(tuple(r) for r in rows))


def build_gram(family: str, n: int, table: MellinTable | None = None) -> GramMatrix:
    check_family(family)
    check_level(family, n)
    return gram_from_basis(family_basis(family, n), table)


# ---------------------------------------------------------------------------
# Exact determinant


def bareiss_det(matrix: list[list[int]]) -> int:
    """Fraction-free elimination on an integer matrix (modified in place)."""
    a = matrix
    n = len(a)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if a[r][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        pivot = a[k][k]
        row_k = a[k]
        for i in range(k + 1, n):
            row_i = a[i]
            lead = row_i[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * pivot - lead * row_k[j]) // prev
        prev = pivot
    return sign * a[n - 1][n - 1] if n else 1


def rational_det(rows: list[list[Fraction]]) -> Fraction:
    """Determinant of a rational matrix via row scaling and Bareiss."""
    scale = 1
    ints = []
    for row in rows:
        m = math.lcm(1, *(q.denominator for q in row))
        scale *= m
        ints.append([int(q * m) for q in row])
    return Fraction(bareiss_det(ints), scale)


def _det_at_node(args):
    entries, t = args
    return rational_det([[e.at(t) for e in row] for row in entries])


def det_exact(g: GramMatrix, limit: int = DEFAULT_EXACT_LIMIT, workers: int = 1) -> XiPolynomial:
    """Exact determinant as a polynomial in zeta(2).

    The determinant has degree at most ``N`` in zeta(2); it is evaluated at
    the rationals ``0, 1, ..., N`` and interpolated.
    """
    n = g.size
    if n > limit:
        raise ExactLimitExceeded(f"matrix size {n} exceeds exact limit {limit}")
    nodes = list(range(n + 1))
    jobs = [(g.entries, t) for t in nodes]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(_det_at_node, jobs))
    else:
        values = [_det_at_node(j) for j in jobs]
    return XiPolynomial.interpolate(nodes, values)


def verify_factorization(p: XiPolynomial, factors: Sequence[XiPolynomial], scalar=1) -> bool:
    prod = XiPolynomial.constant(scalar)
    for f in factors:
        prod = prod * f
    return prod == p


# ---------------------------------------------------------------------------
# Numeric determinant


def numeric_det(build, precision: int = 50, cap: int = PRECISION_CAP) -> BigFloat:
    """Determinant of ``build(digits)`` with cancellation-driven precision.

    Working precision starts at ``max(50, precision)`` and doubles while the
    result is below ``10^(-digits/2)`` or while the digits lost against the
    Hadamard bound leave fewer than ``precision`` correct ones.
    """
    check_precision(precision)
    digits = max(50, precision)
    while True:
        work = digits + GUARD_DIGITS
        with mpmath.workdps(work):
            a = build(work)
            d = mpmath.det(a)
            if d != 0:
                log_det = mpmath.log10(abs(d))
                hadamard = sum(
                    mpmath.log10(mpmath.sqrt(sum(a[i, j] ** 2 for j in range(a.cols))) or 1)
                    for i in range(a.rows)
                )
                lost = max(0, int(mpmath.ceil(hadamard - log_det)))
                if log_det >= -digits / 2 and digits - lost >= precision:
                    return BigFloat(d, precision)
        digits *= 2
        if digits > cap:
            raise PrecisionExhausted(f"determinant not resolved at {digits // 2} digits")


def det_numeric_direct(g: GramMatrix, precision: int = 50, cap: int = PRECISION_CAP) -> BigFloat:
    """Determinant of the matrix evaluated at zeta(2)."""
    return numeric_det(g.numeric, precision, cap)


def cholesky_pivots(g: GramMatrix, digits: int) -> list[mpmath.mpf]:
    """Diagonal pivots of an LDL^T factorization at ``digits`` working digits."""
    with mpmath.workdps(digits + GUARD_DIGITS):
        a = g.numeric(digits + GUARD_DIGITS)
        n = a.rows
        pivots = []
        for k in range(n):
            p = a[k, k]
            pivots.append(p)
            if p <= 0:
                return pivots
            for i in range(k + 1, n):
                f = a[i, k] / p
                for j in range(k + 1, i + 1):
                    a[i, j] -= f * a[j, k]
                    a[j, i] = a[i, j]
    return pivots


def positivity_check(g: GramMatrix, precision: int | None = None) -> bool:
    """Cholesky succeeds with every pivot above ``10^(-precision/2)``.

    When ``precision`` is omitted it is chosen from the size of the
    determinant so that genuinely tiny pivots are still resolved.
    """
    if precision is None:
        try:
            d = det_numeric_direct(g, 50)
            scale = -float(mpmath.log10(abs(d.value))) if d.value != 0 else 0.0
        except PrecisionExhausted:
            return False
        precision = max(50, 2 * int(scale) + 40)
    check_precision(precision)
    threshold = mpmath.mpf(10) ** (-precision / 2)
    return all(p > threshold for p in cholesky_pivots(g, precision))


# ---------------------------------------------------------------------------
# Report


@dataclass
class GramReport:
    family: str
    n: int
    rank: int
    e_n: Fraction
    det_poly: XiPolynomial | None
    det_numeric: BigFloat
    d_n: IntFactorization
    d_n_exact: bool
    delta: Fraction | None
    proxy: BigFloat | None
    log_d_per_e: BigFloat | None
    product: BigFloat | None
    threshold: BigFloat | None
    extras: dict = field(default_factory=dict)

    def row(self) -> dict:
        def f(x):
            return None if x is None else float(x.value)

        return {
            "n": self.n,
            "rank": self.rank,
            "e_n": float(self.e_n),
            "det": mpmath.nstr(self.det_numeric.value, 6),
            "d_n": str(self.d_n),
            "proxy": f(self.proxy),
            "log_d_per_e": f(self.log_d_per_e),
            "product": f(self.product),
            "threshold": f(self.threshold),
        }

    def to_json(self) -> dict:
        def bf(x):
            return None if x is None else x.to_json()

        return {
            "family": self.family,
            "n": self.n,
            "rank": self.rank,
            "e_n": f"{self.e_n.numerator}/{self.e_n.denominator}",
            "det_poly": self.det_poly.to_json() if self.det_poly is not None else None,
            "det_numeric": bf(self.det_numeric),
            "d_n": self.d_n.to_json(),
            "d_n_exact": self.d_n_exact,
            "delta": None if self.delta is None else f"{self.delta.numerator}/{self.delta.denominator}",
            "proxy": bf(self.proxy),
            "log_d_per_e": bf(self.log_d_per_e),
            "product": bf(self.product),
            "threshold": bf(self.threshold),
        }


def metrics(det: BigFloat, d_n: int, e_n: Fraction):
    """``(proxy, log_d_per_e, product, threshold)`` for a determinant value.

    Entries that are undefined (``e_n = 0`` or ``d_n = 1``) are ``None``.
    """
    prec = det.precision
    with mpmath.workdps(prec + GUARD_DIGITS):
        e = mpmath.mpf(e_n.numerator) / e_n.denominator
        log_det = mpmath.log(abs(det.value))
        log_d = mpmath.log(d_n)
        threshold = -log_det / log_d if d_n > 1 else None
        if e == 0:
            # degenerate level: no root can be taken
            proxy = ldpe = product = None
        else:
            proxy = mpmath.exp(log_det / e)
            ldpe = log_d / e
            product = mpmath.exp((log_det + log_d) / e)

    def wrap(v):
        return None if v is None else BigFloat(v, prec)

    return wrap(proxy), wrap(ldpe), wrap(product), wrap(threshold)


def report(family: str, n: int, precision: int = 50, exact_limit: int = DEFAULT_EXACT_LIMIT,
           workers: int = 1, table: MellinTable | None = None) -> GramReport:
    from .lattice import integerize

    check_precision(precision)
    g = build_gram(family, n, table)
    basis = g.basis
    det_poly = None
    if g.size <= exact_limit:
        det_poly = det_exact(g, exact_limit, workers)
        det_num = eval_xi(det_poly, precision)
        if det_poly:
            d_fact = denominator_lcm(det_poly)
        else:
            d_fact = factorint(1)
        d_exact = True
    else:
        det_num = det_numeric_direct(g, precision)
        d_fact = None
        d_exact = False
    ig = integerize(g)
    if d_fact is None:
        # only an upper multiple of the true denominator is known
        d_fact = factorint(ig.delta.numerator // math.gcd(ig.delta.numerator, ig.delta.denominator))
    proxy, ldpe, product, theta = metrics(det_num, d_fact.value, basis.e_n)
    return GramReport(family, n, basis.rank, basis.e_n, det_poly, det_num, d_fact, d_exact,
                      ig.delta, proxy, ldpe, product, theta)


TABLE_COLUMNS = ("n", "rank", "e_n", "det", "d_n", "proxy", "log_d_per_e", "product", "threshold")


class GramTable(BaseEstimator):
    """Table of Gram reports over a range of levels.

    ``fit(levels)`` computes one :class:`GramReport` per level;
    ``transform(levels)`` returns the numeric columns ``proxy``,
    ``log_d_per_e``, ``product`` and ``threshold`` as an array.
    """

    def __init__(self, family: str = "two_param", precision: int = 50,
                 exact_limit: int = DEFAULT_EXACT_LIMIT, workers: int = 1):
        self.family = family
        self.precision = precision
        self.exact_limit = exact_limit
        self.workers = workers

    def fit(self, X, y=None):
        check_family(self.family)
        check_precision(self.precision)
        check_int(self.workers, "workers", minimum=1)
        levels = [check_level(self.family, int(v)) for v in np.asarray(X).ravel()]
        self.reports_ = {n: report(self.family, n, self.precision, self.exact_limit, self.workers)
                         for n in levels}
        return self

    def transform(self, X):
        if not hasattr(self, "reports_"):
            raise RuntimeError("GramTable is not fitted")
        out = []
        for v in np.asarray(X).ravel():
            r = self.reports_.get(int(v)) or report(self.family, int(v), self.precision,
                                                     self.exact_limit, self.workers)
            out.append([np.nan if v is None else float(v.value)
                        for v in (r.proxy, r.log_d_per_e, r.product, r.threshold)])
        return np.array(out)

    def fit_transform(self, X, y=None):
        return self.fit(X).transform(X)

    def rows(self) -> list[dict]:
        return [self.reports_[n].row() for n in sorted(self.reports_)]


# ---------------------------------------------------------------------------
# Monte Carlo check of the determinant identity


def sample_omega(rng: np.random.Generator, size: int) -> tuple[np.ndarray, np.ndarray]:
    """Points of the unit square distributed as ``dx dy / ((1 - xy) zeta(2))``.

    The density is the mixture over ``j >= 1`` of ``j^2 (xy)^(j-1)`` with
    weights ``1 / (j^2 zeta(2))``. ``j`` is drawn by rejection from
    ``floor(1/U)``, whose law is ``1/(j(j+1))``.
    """
    js = np.empty(size, dtype=np.float64)
    filled = 0
    while filled < size:
        need = size - filled
        u = rng.random(int(need * 1.4) + 16)
        u = u[u > 0]
        j = np.floor(1.0 / u)
        accept = rng.random(j.size) < (j + 1) / (2 * j)
        j = j[accept][:need]
        js[filled:filled + j.size] = j
        filled += j.size
    x = rng.random(size) ** (1.0 / js)
    y = rng.random(size) ** (1.0 / js)
    return x, y


def dihedral_coordinates(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    c = 1.0 - x * y
    return np.stack([x, (1 - x) / c, (1 - y) / c, y, c], axis=-1)


def basis_values(basis: ModuleBasis, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Basis elements evaluated at points of the square, shape ``(..., rank)``."""
    u = dihedral_coordinates(x, y)
    cols = []
    for m in basis.monomials:
        val = np.zeros(x.shape)
        for coef, vec in expand_element(basis.family, m):
            term = np.full(x.shape, float(coef))
            for k, e in enumerate(vec):
                if e:
                    term = term * u[..., k] ** e
            val = val + term
        cols.append(val)
    return np.stack(cols, axis=-1)


@dataclass(frozen=True)
class MonteCarloResult:
    estimate: float
    std_error: float
    exact: float
    samples: int

    @property
    def rel_deviation(self) -> float:
        return abs(self.estimate - self.exact) / abs(self.exact)

    @property
    def z_score(self) -> float:
        return abs(self.estimate - self.exact) / self.std_error if self.std_error else math.inf


def montecarlo_det_identity(family: str, n: int, samples: int = 10**6, seed: int = 0,
                            chunk: int = 200_000) -> MonteCarloResult:
    """Estimate ``det Q`` as ``zeta(2)^N / N! * E[det(V)^2]`` under ``omega / zeta(2)``."""
    basis = family_basis(family, n)
    size = basis.rank
    if size > 9:
        raise ValueError("Monte Carlo identity check is limited to rank <= 9")
    rng = np.random.default_rng(seed)
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < samples:
        m = min(chunk, samples - done)
        x, y = sample_omega(rng, m * size)
        vals = basis_values(basis, x.reshape(m, size), y.reshape(m, size))
        d2 = np.linalg.det(vals) ** 2
        total += float(d2.sum())
        total_sq += float((d2 * d2).sum())
        done += m
    mean = total / samples
    var = max(total_sq / samples - mean * mean, 0.0)
    z2 = float(zeta2(20).value)
    factor = z2**size / math.factorial(size)
    g = build_gram(family, n)
    exact = float(eval_xi(det_exact(g), 20).value)
    return MonteCarloResult(factor * mean, factor * math.sqrt(var / samples), exact, samples)
