"""Exact Mellin integrals on the unit square via 2x2 shift matrices.

``I(s1, ..., s5)`` is the integral of ``u1^s1 ... u5^s5 dx dy / (1 - xy)``
over ``[0, 1]^2`` with dihedral coordinates

    u1 = x, u2 = (1-x)/(1-xy), u3 = (1-y)/(1-xy), u4 = y, u5 = 1-xy.

Every such integral equals ``a + b*zeta(2)`` with rational ``a, b``. The pair
``(I(s), I(s + e5))`` moves to ``(I(s + e_i), I(s + e_i + e5))`` under
multiplication by a rational matrix ``M_i(s)``; starting from
``(zeta(2), 1)`` at the origin this gives every ``I(s)`` exactly.
"""

from __future__ import annotations

import json
import math
import os
import threading
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .exactnum import LinearForm, format_rational, parse_rational

Vec5 = tuple[int, int, int, int, int]
Matrix2 = tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]

INITIAL_STATE = (LinearForm(0, 1), LinearForm(1, 0))


class PoleError(ArithmeticError):
    """A shift matrix has a vanishing denominator at the requested point."""

    def __init__(self, index: int, s: Sequence[int], factor: str):
        self.index = index
        self.s = tuple(s)
        self.factor = factor
        super().__init__(f"M{index} is singular at s={self.s}: {factor} = 0")


class PathNotFound(RuntimeError):
    """No admissible sequence of shifts reaches the target exponent vector."""

    def __init__(self, s: Sequence[int], blocked: Iterable[Vec5]):
        self.s = tuple(s)
        self.blocked = sorted(blocked)
        super().__init__(
            f"no admissible shift path to {self.s}; {len(self.blocked)} blocked states, "
            f"e.g. {self.blocked[:5]}"
        )


class NonConvergence(RuntimeError):
    pass


def as_vec5(s: Iterable[int]) -> Vec5:
    v = tuple(int(c) for c in s)
    if len(v) != 5:
        raise ValueError(f"expected five exponents, got {len(v)}")
    if any(c < 0 for c in v):
        raise ValueError(f"exponents must be non-negative, got {v}")
    return v  # type: ignore[return-value]


def pole_vector(s: Sequence[int]) -> Vec5:
    s1, s2, s3, s4, s5 = s
    return (s2 + s3 - s5, s3 + s4 - s1, s4 + s5 - s2, s5 + s1 - s3, s1 + s2 - s4)


def a_params(s: Sequence[int]) -> Vec5:
    """``a_i = p_{i+1} + 1`` with the index taken cyclically."""
    p = pole_vector(s)
    return tuple(p[(i + 1) % 5] + 1 for i in range(5))  # type: ignore[return-value]


def dihedral_images(s: Sequence[int]) -> list[Vec5]:
    """The ten images of ``s`` under rotations and reflections of the pentagon."""
    s = tuple(s)
    rev = s[::-1]
    out = []
    for k in range(5):
        out.append(s[k:] + s[:k])
        out.append(rev[k:] + rev[:k])
    return out  # type: ignore[return-value]


def dihedral_orbit(s: Sequence[int]) -> Vec5:
    """Canonical representative: lexicographically smallest dihedral image."""
    return min(dihedral_images(s))


def _check(index: int, s, named: dict[str, int]) -> None:
    for name, value in named.items():
        if value == 0:
            raise PoleError(index, s, name)


def contiguity_matrix(i: int, s: Sequence[int]) -> Matrix2:
    """Exact matrix ``M_i(s)`` sending the pair at ``s`` to the pair at ``s + e_i``."""
    a1, a2, a3, a4, a5 = a_params(s)
    if i == 1:
        _check(1, s, {"a4": a4, "1+a3": 1 + a3})
        d = a4 * (1 + a3)
        m = (((1 + a3) * (a5 - a1), (1 + a3) * a2),
             ((a1 + a4 - a5) * (a5 - 1), (1 - a1 + a2) * a4 - a2 * (a5 - 1)))
    elif i == 2:
        _check(2, s, {"a4": a4, "a5": a5})
        d = a4 * a5
        m = (((a1 - a2) * a4 + a3 * (a5 - a1), a2 * a3),
             ((a1 + a4 - a5) * a5, -a2 * a5))
    elif i == 3:
        _check(3, s, {"a1": a1, "a5": a5})
        d = a1 * a5
        m = (((a4 - a3) * a1 + a2 * (a5 - a4), a2 * a3),
             ((a1 + a4 - a5) * a5, -a3 * a5))
    elif i == 4:
        _check(4, s, {"a1": a1, "1+a2": 1 + a2})
        d = a1 * (1 + a2)
        m = (((1 + a2) * (a5 - a4), (1 + a2) * a3),
             ((a1 + a4 - a5) * (a5 - 1), (a3 - a4 + 1) * a1 - a3 * (a5 - 1)))
    elif i == 5:
        _check(5, s, {"1+a2": 1 + a2, "1+a3": 1 + a3})
        d = (1 + a2) * (1 + a3)
        m = ((0, (1 + a3) * (1 + a2)),
             ((a1 + a4 - a5) * (a5 - 1),
              (a4 - a5 + 1) * (a2 + 1) + (a1 - a5 + 1) * a3 + (1 - a4) * a1))
    else:
        raise ValueError(f"shift index must be in 1..5, got {i}")
    return tuple(tuple(Fraction(x, d) for x in row) for row in m)  # type: ignore[return-value]


def is_finite(i: int, s: Sequence[int]) -> bool:
    try:
        contiguity_matrix(i, s)
    except PoleError:
        return False
    return True


def apply(m: Matrix2, state: tuple[LinearForm, LinearForm]) -> tuple[LinearForm, LinearForm]:
    f, g = state
    return (f * m[0][0] + g * m[0][1], f * m[1][0] + g * m[1][1])


def matmul(a: Matrix2, b: Matrix2) -> Matrix2:
    return tuple(
        tuple(sum((a[r][k] * b[k][c] for k in range(2)), Fraction(0)) for c in range(2))
        for r in range(2)
    )  # type: ignore[return-value]


def apery_diagonal_matrix(n: int) -> Matrix2:
    """Shift along the diagonal, ``(n,...,n) -> (n+1,...,n+1)``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    q = Fraction(1, (n + 2) ** 2)
    return ((Fraction(-3), Fraction(5)),
            ((5 * n * n + 13 * n + 8) * q, -(8 * n * n + 21 * n + 13) * q))


# ---------------------------------------------------------------------------
# Recursion with memo


def _unit(i: int) -> Vec5:
    return tuple(1 if k == i - 1 else 0 for k in range(5))  # type: ignore[return-value]


def _sub(s: Vec5, i: int) -> Vec5:
    return tuple(c - 1 if k == i - 1 else c for k, c in enumerate(s))  # type: ignore[return-value]


class MellinTable:
    """Memo of exact integrals and period pairs.

    Integral values are keyed on the dihedral-canonical exponent vector,
    period pairs on the exact vector (the second slot is not dihedral
    invariant). Reads are lock-free dict lookups; writes take a lock.
    """

    def __init__(self, path: str | os.PathLike | None = None):
        self.values: dict[Vec5, LinearForm] = {}
        self.states: dict[Vec5, tuple[LinearForm, LinearForm]] = {(0, 0, 0, 0, 0): INITIAL_STATE}
        self.blocked: set[Vec5] = set()
        self._lock = threading.RLock()
        self.path = Path(path) if path else None
        if self.path and self.path.exists():
            self.load(self.path)

    def __len__(self) -> int:
        return len(self.values)

    # path search ---------------------------------------------------------

    def _predecessors(self, t: Vec5) -> list[int]:
        """Shift indices i with ``t - e_i`` admissible, best candidates first.

        An index whose coordinate is the strict maximum of ``t - e_i`` is
        finite by construction, so those come first; the rest are ordered
        by the size of the coordinate.
        """
        cands = []
        for i in range(1, 6):
            if t[i - 1] == 0:
                continue
            prev = _sub(t, i)
            if not is_finite(i, prev):
                continue
            is_argmax = prev[i - 1] == max(prev)
            cands.append((not is_argmax, -prev[i - 1], i))
        cands.sort()
        return [i for _, _, i in cands]

    def state(self, t: Sequence[int], max_depth: int | None = None):
        """Exact pair ``(I(t), I(t + e5))``."""
        t = as_vec5(t)
        hit = self.states.get(t)
        if hit is not None:
            return hit
        result = self._search(t)
        if result is None:
            raise PathNotFound(t, self.blocked)
        return result

    def _search(self, target: Vec5):
        # iterative depth-first search over predecessor choices
        stack: list[tuple[Vec5, list[int]]] = [(target, self._predecessors(target))]
        while stack:
            t, options = stack[-1]
            if t in self.states:
                stack.pop()
                continue
            if not options:
                with self._lock:
                    self.blocked.add(t)
                stack.pop()
                continue
            i = options[0]
            prev = _sub(t, i)
            if prev in self.blocked:
                options.pop(0)
                continue
            prev_state = self.states.get(prev)
            if prev_state is None:
                stack.append((prev, self._predecessors(prev)))
                continue
            new = apply(contiguity_matrix(i, prev), prev_state)
            with self._lock:
                self.states[t] = new
            stack.pop()
        return self.states.get(target)

    # integrals -------------------------------------------------------------

    def integral(self, s: Sequence[int]) -> LinearForm:
        s = as_vec5(s)
        key = dihedral_orbit(s)
        hit = self.values.get(key)
        if hit is not None:
            return hit
        value = None
        for image in [key] + dihedral_images(s):
            found = self.states.get(image) or self._search(image)
            if found is not None:
                value = found[0]
                break
            if image[4] > 0:
                below = _sub(image, 5)
                found = self.states.get(below) or self._search(below)
                if found is not None:
                    value = found[1]
                    break
        if value is None:
            raise PathNotFound(s, self.blocked)
        with self._lock:
            self.values[key] = value
        return value

    # persistence -----------------------------------------------------------

    def save(self, path: str | os.PathLike | None = None) -> None:
        path = Path(path) if path else self.path
        if path is None:
            raise ValueError("no cache path configured")
        with self._lock:
            data = {
                ",".join(map(str, k)): [format_rational(v.const), format_rational(v.xi)]
                for k, v in sorted(self.values.items())
            }
        tmp = path.with_suffix(path.suffix + ".tmp")
        tmp.write_text(json.dumps({"format": "periodgram-mellin-v1", "values": data}))
        tmp.replace(path)

    def load(self, path: str | os.PathLike) -> None:
        raw = json.loads(Path(path).read_text())
        with self._lock:
            for k, (c, x) in raw.get("values", {}).items():
                key = as_vec5(int(p) for p in k.split(","))
                self.values[dihedral_orbit(key)] = LinearForm(parse_rational(c), parse_rational(x))


_default_table: MellinTable | None = None
_default_lock = threading.Lock()


def default_table() -> MellinTable:
    global _default_table
    with _default_lock:
        if _default_table is None:
            _default_table = MellinTable(os.environ.get("PERIODGRAM_CACHE") or None)
        return _default_table


def set_default_table(table: MellinTable) -> None:
    global _default_table
    with _default_lock:
        _default_table = table


def mellin_integral(s: Sequence[int], table: MellinTable | None = None) -> LinearForm:
    """Exact ``I(s)`` as ``a + b*zeta(2)``."""
    return (table or default_table()).integral(s)


def integral_along(s: Sequence[int], order: Sequence[int]) -> tuple[LinearForm, LinearForm]:
    """Period pair at ``s`` reached by applying shifts in the given order.

    ``order`` lists shift indices (1..5); their counts must equal ``s``. Used
    to check that different admissible orders agree.
    """
    s = as_vec5(s)
    counts = [0] * 5
    for i in order:
        counts[i - 1] += 1
    if tuple(counts) != s:
        raise ValueError("shift order does not add up to s")
    cur = (0, 0, 0, 0, 0)
    state = INITIAL_STATE
    for i in order:
        state = apply(contiguity_matrix(i, cur), state)
        cur = tuple(c + 1 if k == i - 1 else c for k, c in enumerate(cur))
    return state


# ---------------------------------------------------------------------------
# Quadrature oracle


def _log_logistic(z):
    """log(1 / (1 + exp(-z))) without overflow."""
    return -np.logaddexp(0.0, -z)


def _tanh_sinh_nodes(h: float, reach: float = 4.5):
    t = np.arange(-math.floor(reach / h), math.floor(reach / h) + 1) * h
    z = math.pi * np.sinh(t)
    log_x = _log_logistic(z)
    log_cx = _log_logistic(-z)  # log(1 - x)
    log_w = log_x + log_cx + np.log(math.pi * np.cosh(t)) + math.log(h)
    return log_x, log_cx, log_w


def _quad_level(s: Vec5, h: float) -> float:
    s1, s2, s3, s4, s5 = s
    lx, lcx, lw = _tanh_sinh_nodes(h)
    X, CX, WX = lx[:, None], lcx[:, None], lw[:, None]
    Y, CY, WY = lx[None, :], lcx[None, :], lw[None, :]
    # 1 - xy = (1 - x) + x (1 - y), a sum of positives
    log_c = np.logaddexp(CX, X + CY)
    log_f = s1 * X + s4 * Y + s2 * CX + s3 * CY + (s5 - s2 - s3 - 1) * log_c
    return float(np.exp(log_f + WX + WY).sum())


def quad_oracle(s: Sequence[int], tol: float = 1e-10, max_level: int = 8) -> float:
    """Tanh-sinh product quadrature of ``I(s)`` in double precision."""
    s = as_vec5(s)
    if tol < 1e-12:
        raise ValueError("tol must be at least 1e-12")
    if sum(s) > 12:
        raise ValueError("quadrature is only trusted for total degree <= 12")
    h = 0.5
    prev = cur = _quad_level(s, h)
    for _ in range(max_level):
        h /= 2
        cur = _quad_level(s, h)
        if abs(cur - prev) <= tol * 0.1:
            return cur
        prev = cur
    raise NonConvergence(f"quadrature for s={s} stalled at step {h}")
