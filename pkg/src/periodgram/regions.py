"""Closed regions in R^r with membership tests, bounding boxes and samplers.

Points are numpy arrays of shape ``(k, dim)``. A region may carry a map
(:meth:`Region.to_ambient`) from its own coordinates to the coordinates in
which basis monomials are evaluated; image regions use this to optimize
pulled-back bases over a simpler source region.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import qmc

TOL = 1e-14


class Region:
    kind = "region"
    dim = 2

    def contains(self, pts) -> np.ndarray:
        raise NotImplementedError

    def bbox(self) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def to_ambient(self, pts) -> np.ndarray:
        return np.asarray(pts, dtype=float)

    def extreme_points(self) -> np.ndarray:
        lo, hi = self.bbox()
        corners = np.array(np.meshgrid(*zip(lo, hi))).reshape(self.dim, -1).T
        return corners[self.contains(corners)]

    def sample(self, rng: np.random.Generator, k: int) -> np.ndarray:
        """``k`` uniform members by rejection from the bounding box."""
        lo, hi = self.bbox()
        out = []
        have = 0
        batch = max(64, 2 * k)
        for _ in range(10_000):
            cand = lo + (hi - lo) * rng.random((batch, self.dim))
            cand = cand[self.contains(cand)]
            out.append(cand)
            have += len(cand)
            if have >= k:
                return np.concatenate(out)[:k]
            batch *= 2
        raise RuntimeError(f"rejection sampling of {self!r} accepted too few points")

    def quasi_sample(self, k: int, seed: int) -> np.ndarray:
        """``k`` members from a scrambled Sobol sequence in the bounding box."""
        lo, hi = self.bbox()
        rng = np.random.default_rng(seed)
        out, have = [], 0
        for _ in range(64):
            m = max(6, math.ceil(math.log2(max(2 * (k - have), 2))))
            cand = lo + (hi - lo) * qmc.Sobol(self.dim, scramble=True, seed=rng).random_base2(m)
            cand = cand[self.contains(cand)]
            out.append(cand)
            have += len(cand)
            if have >= k:
                return np.concatenate(out)[:k]
        raise RuntimeError(f"quasi-random sampling of {self!r} accepted too few points")


@dataclass(frozen=True)
class Interval(Region):
    a: float = 0.0
    b: float = 1.0
    kind = "interval"
    dim = 1

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError("interval needs a < b")

    def contains(self, pts):
        x = np.asarray(pts, dtype=float).reshape(-1, 1)[:, 0]
        return (x >= self.a - TOL) & (x <= self.b + TOL)

    def bbox(self):
        return np.array([self.a]), np.array([self.b])


@dataclass(frozen=True)
class Box(Region):
    a: float = 0.0
    b: float = 1.0
    c: float = 0.0
    d: float = 1.0
    kind = "box"

    def __post_init__(self):
        if not (self.a < self.b and self.c < self.d):
            raise ValueError("box needs a < b and c < d")

    def contains(self, pts):
        p = np.asarray(pts, dtype=float).reshape(-1, 2)
        return ((p[:, 0] >= self.a - TOL) & (p[:, 0] <= self.b + TOL)
                & (p[:, 1] >= self.c - TOL) & (p[:, 1] <= self.d + TOL))

    def bbox(self):
        return np.array([self.a, self.c]), np.array([self.b, self.d])


@dataclass(frozen=True)
class Triangle(Region):
    v1: tuple[float, float] = (0.0, 0.0)
    v2: tuple[float, float] = (1.0, 0.0)
    v3: tuple[float, float] = (0.0, 1.0)
    kind = "triangle"

    @property
    def volume(self) -> float:
        (x1, y1), (x2, y2), (x3, y3) = self.v1, self.v2, self.v3
        return abs((x2 - x1) * (y3 - y1) - (x3 - x1) * (y2 - y1)) / 2

    def contains(self, pts):
        p = np.asarray(pts, dtype=float).reshape(-1, 2)
        a, b, c = (np.asarray(v, dtype=float) for v in (self.v1, self.v2, self.v3))
        m = np.column_stack([b - a, c - a])
        lam = np.linalg.solve(m, (p - a).T).T
        l1, l2 = lam[:, 0], lam[:, 1]
        return (l1 >= -TOL) & (l2 >= -TOL) & (l1 + l2 <= 1 + TOL)

    def bbox(self):
        v = np.array([self.v1, self.v2, self.v3], dtype=float)
        return v.min(axis=0), v.max(axis=0)

    def extreme_points(self):
        return np.array([self.v1, self.v2, self.v3], dtype=float)

    def sample(self, rng, k):
        # uniform on a triangle without rejection
        u = rng.random((k, 2))
        flip = u.sum(axis=1) > 1
        u[flip] = 1 - u[flip]
        a, b, c = (np.asarray(v, dtype=float) for v in (self.v1, self.v2, self.v3))
        return a + u[:, :1] * (b - a) + u[:, 1:] * (c - a)


@dataclass(frozen=True)
class Ball(Region):
    radius: float = 1.0
    kind = "ball"

    def contains(self, pts):
        p = np.asarray(pts, dtype=float).reshape(-1, 2)
        return (p**2).sum(axis=1) <= self.radius**2 * (1 + TOL) + TOL

    def bbox(self):
        r = self.radius
        return np.array([-r, -r]), np.array([r, r])

    def extreme_points(self):
        t = np.linspace(0, 2 * np.pi, 16, endpoint=False)
        return self.radius * np.column_stack([np.cos(t), np.sin(t)])


@dataclass(frozen=True)
class TauEps(Region):
    """``{0 <= x, y <= 1, xy <= eps}``."""

    eps: float = 0.1
    kind = "tau_eps"

    def __post_init__(self):
        if not 0 < self.eps <= 1:
            raise ValueError("eps must lie in (0, 1]")

    def contains(self, pts):
        p = np.asarray(pts, dtype=float).reshape(-1, 2)
        x, y = p[:, 0], p[:, 1]
        return (x >= -TOL) & (y >= -TOL) & (x <= 1 + TOL) & (y <= 1 + TOL) & (x * y <= self.eps + TOL)

    def bbox(self):
        return np.zeros(2), np.ones(2)

    def extreme_points(self):
        e = self.eps
        return np.array([[0, 0], [1, 0], [0, 1], [1, e], [e, 1], [math.sqrt(e), math.sqrt(e)]])


@dataclass(frozen=True)
class TwoParamImage(Region):
    """Image of the unit square under ``(f1, f2)``:
    ``0 <= v <= 1`` and ``0 <= u <= ((v - 1)/(v + 1))^2``."""

    kind = "two_param_image"

    def contains(self, pts):
        p = np.asarray(pts, dtype=float).reshape(-1, 2)
        u, v = p[:, 0], p[:, 1]
        cap = ((v - 1) / (v + 1)) ** 2
        return (v >= -TOL) & (v <= 1 + TOL) & (u >= -TOL) & (u <= cap + TOL)

    def bbox(self):
        return np.zeros(2), np.ones(2)

    def extreme_points(self):
        return np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])


@dataclass(frozen=True)
class AffineImage(Region):
    """``{P z + offset : z in source}``, stored in image coordinates."""

    matrix: tuple[tuple[float, ...], ...]
    source: Region
    offset: tuple[float, ...] = field(default=())
    kind = "affine_image"

    @property
    def dim(self):
        return self.source.dim

    def _p(self):
        return np.asarray(self.matrix, dtype=float)

    def _o(self):
        return np.asarray(self.offset, dtype=float) if self.offset else np.zeros(self.dim)

    def contains(self, pts):
        p = np.asarray(pts, dtype=float).reshape(-1, self.dim)
        z = np.linalg.solve(self._p(), (p - self._o()).T).T
        return self.source.contains(z)

    def bbox(self):
        lo, hi = self.source.bbox()
        corners = np.array(np.meshgrid(*zip(lo, hi))).reshape(self.dim, -1).T
        img = corners @ self._p().T + self._o()
        return img.min(axis=0), img.max(axis=0)

    def extreme_points(self):
        return self.source.extreme_points() @ self._p().T + self._o()

    def sample(self, rng, k):
        return self.source.sample(rng, k) @ self._p().T + self._o()


def phi(pts):
    p = np.asarray(pts, dtype=float).reshape(-1, 2)
    return np.column_stack([p[:, 0] * p[:, 1], p[:, 0] + p[:, 1]])


def phi_x(pts):
    p = np.asarray(pts, dtype=float).reshape(-1, 2)
    return np.column_stack([p[:, 0] * p[:, 1], p[:, 0]])


def phi_y(pts):
    p = np.asarray(pts, dtype=float).reshape(-1, 2)
    return np.column_stack([p[:, 0] * p[:, 1], p[:, 1]])


MAPS = {"phi": phi, "phi_x": phi_x, "phi_y": phi_y}


@dataclass(frozen=True)
class MappedRegion(Region):
    """Image of ``source`` under one of ``phi``, ``phi_x``, ``phi_y``.

    Points live in source coordinates; :meth:`to_ambient` applies the map,
    so a basis evaluated through it is the pullback basis.
    """

    source: Region
    map_name: str = "phi"

    def __post_init__(self):
        if self.map_name not in MAPS:
            raise ValueError(f"unknown map {self.map_name!r}")

    @property
    def kind(self):
        return f"{self.map_name}_image"

    @property
    def dim(self):
        return self.source.dim

    def contains(self, pts):
        return self.source.contains(pts)

    def bbox(self):
        return self.source.bbox()

    def extreme_points(self):
        return self.source.extreme_points()

    def sample(self, rng, k):
        return self.source.sample(rng, k)

    def to_ambient(self, pts):
        return MAPS[self.map_name](pts)


def make_region(name: str, **kw) -> Region:
    """Region by command-line name."""
    if name == "interval":
        return Interval(kw.get("a", 0.0), kw.get("b", 1.0))
    if name in ("box", "square"):
        return Box(kw.get("a", 0.0), kw.get("b", 1.0), kw.get("c", 0.0), kw.get("d", 1.0))
    if name in ("triangle", "unit_triangle"):
        return Triangle()
    if name == "ball":
        return Ball(kw.get("radius", 1.0))
    if name == "tau_eps":
        return TauEps(kw.get("eps", 0.1))
    if name in ("image", "two_param_image"):
        return TwoParamImage()
    if name in MAPS:
        return MappedRegion(make_region(kw.pop("source", "image"), **kw), name)
    raise ValueError(f"unknown region {name!r}")
