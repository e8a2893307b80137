"""Argument checks shared by the estimators and the command line."""

from __future__ import annotations

import numbers

from .bases import FAMILIES


def check_family(family: str, allowed=FAMILIES) -> str:
    if family not in allowed:
        raise ValueError(f"unknown family {family!r}; expected one of {', '.join(allowed)}")
    return family


def check_int(value, name: str, minimum: int | None = None, maximum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise TypeError(f"{name} must be an integer, got {type(value).__name__}")
    value = int(value)
    if minimum is not None and value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    if maximum is not None and value > maximum:
        raise ValueError(f"{name} must be <= {maximum}, got {value}")
    return value


def check_level(family: str, n) -> int:
    minimum = 0 if family == "five_param" else 1
    return check_int(n, "n", minimum=minimum)


def check_precision(precision) -> int:
    return check_int(precision, "precision", minimum=10)


def check_exponents(s) -> tuple[int, ...]:
    s = tuple(s)
    if len(s) != 5:
        raise ValueError(f"expected five exponents, got {len(s)}")
    return tuple(check_int(c, "exponent", minimum=0) for c in s)


def check_probability(eps, name: str = "eps", open_left: bool = True) -> float:
    eps = float(eps)
    if not (0 < eps <= 1) if open_left else not (0 <= eps <= 1):
        raise ValueError(f"{name} must lie in (0, 1], got {eps}")
    return eps
