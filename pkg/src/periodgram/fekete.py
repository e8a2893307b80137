"""Approximate Fekete configurations: point sets with large ``|det V|``.

A run starts from a greedy selection over a quasi-random candidate pool
(column-pivoted QR, which adds at each step the candidate that most enlarges
the growing minor) and then sweeps over the points, replacing each one by the
best member of a fresh pool and polishing it with Nelder-Mead. Every accepted
move increases ``log|det|``, so the proxy never decreases within a run.
The value returned is a feasible configuration, hence a lower witness for
the supremum.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import qr
from scipy.optimize import minimize
from sklearn.base import BaseEstimator

from .bases import ModuleBasis
from .regions import Region
from .vandermonde import vdm_values

MAX_RANK = 400


class DegenerateBasis(ValueError):
    pass


@dataclass
class FeketeResult:
    basis: ModuleBasis
    points: np.ndarray
    log_abs_det: float
    proxy: float
    iterations: int
    restarts: int
    history: list[float] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "family": self.basis.family,
            "n": self.basis.n,
            "rank": self.basis.rank,
            "e_n": str(self.basis.e_n),
            "log_abs_det": self.log_abs_det,
            "proxy": self.proxy,
            "iterations": self.iterations,
            "restarts": self.restarts,
            "points": [[float(c) for c in p] for p in self.points],
        }


def _proxy(basis: ModuleBasis, logdet: float) -> float:
    e = float(basis.e_n)
    if e <= 0:
        return math.nan
    return math.exp(logdet / e)


class _Run:
    """One ascent from one seed."""

    def __init__(self, basis, region, pool_size, tol, polish, seed):
        self.basis = basis
        self.region = region
        self.pool_size = pool_size
        self.tol = tol
        self.polish = polish
        self.rng = np.random.default_rng(seed)
        self.exps = basis.exponent_matrix()

    def values(self, pts):
        return vdm_values(self.exps, self.region.to_ambient(pts))

    def pool(self, k):
        seed = int(self.rng.integers(2**32))
        return self.region.quasi_sample(k, seed)

    def initial(self):
        n = self.basis.rank
        cand = np.vstack([self.pool(max(self.pool_size, 4 * n)),
                          self.region.extreme_points().reshape(-1, self.region.dim)])
        vals = self.values(cand)
        # scale columns so that no monomial dominates the pivot choice
        scale = np.abs(vals).max(axis=0)
        if np.any(scale == 0):
            raise DegenerateBasis("a basis element vanishes on every candidate")
        _, r, piv = qr((vals / scale).T, pivoting=True, mode="economic")
        if abs(r[n - 1, n - 1]) == 0:
            raise DegenerateBasis("all candidate determinants vanish")
        return cand[piv[:n]].copy()

    def logdet(self, pts):
        sign, ld = np.linalg.slogdet(self.values(pts))
        return -math.inf if sign == 0 else float(ld)

    def _polish(self, pts, k, col):
        """Nelder-Mead on point ``k`` maximizing ``log|phi(z) . col|`` inside the region."""
        def objective(z):
            z = z.reshape(1, -1)
            if not self.region.contains(z)[0]:
                return 1e6
            r = abs(float(self.values(z)[0] @ col))
            return 1e6 if r == 0 else -math.log(r)

        res = minimize(objective, pts[k], method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-13, "maxiter": 200 * self.region.dim})
        z = np.asarray(res.x, dtype=float).reshape(1, -1)
        return z[0] if self.region.contains(z)[0] else None

    def sweep(self, pts, ld):
        n = len(pts)
        for k in range(n):
            v = self.values(pts)
            e_k = np.zeros(n)
            e_k[k] = 1.0
            try:
                col = np.linalg.solve(v, e_k)
            except np.linalg.LinAlgError:
                continue
            cand = np.vstack([pts[k:k + 1], self.pool(self.pool_size)])
            ratios = np.abs(self.values(cand) @ col)
            best = int(np.argmax(ratios))
            trial = pts.copy()
            trial[k] = cand[best]
            if self.polish:
                z = self._polish(trial, k, col)
                if z is not None and abs(float(self.values(z[None])[0] @ col)) > ratios[best]:
                    trial[k] = z
            new = self.logdet(trial)
            if new > ld:
                pts, ld = trial, new
        return pts, ld

    def run(self, sweeps):
        pts = self.initial()
        ld = self.logdet(pts)
        if ld == -math.inf:
            raise DegenerateBasis("initial configuration is singular")
        history = [ld]
        it = 0
        for it in range(1, sweeps + 1):
            pts, new = self.sweep(pts, ld)
            gain = new - ld
            ld = new
            history.append(ld)
            if gain <= self.tol * max(1.0, abs(ld)):
                break
        return pts, ld, it, history


def _one_restart(args):
    basis, region, pool_size, tol, polish, seed, sweeps = args
    return _Run(basis, region, pool_size, tol, polish, seed).run(sweeps)


def _check_dims(basis: ModuleBasis, region: Region):
    if basis.rank > MAX_RANK:
        raise ValueError(f"rank {basis.rank} exceeds {MAX_RANK}")
    lo, _ = region.bbox()
    amb = region.to_ambient(np.asarray(lo, dtype=float).reshape(1, -1))
    if amb.shape[1] != basis.dim:
        raise ValueError(f"basis has {basis.dim} variables, region maps to dimension {amb.shape[1]}")


class FeketeMaximizer(BaseEstimator):
    """Search for a configuration maximizing ``|det V|`` over a region.

    ``fit(region)`` sets ``points_``, ``log_abs_det_``, ``proxy_``,
    ``iterations_``, ``history_`` (log-det after each sweep of the best
    restart) and ``result_``. Restarts use independent child seeds and may
    run in a process pool; the best restart wins.
    """

    def __init__(self, basis: ModuleBasis | None = None, restarts: int = 4, sweeps: int = 30,
                 pool_size: int = 512, seed: int = 0, tol: float = 1e-8, polish: bool = True,
                 workers: int = 1):
        self.basis = basis
        self.restarts = restarts
        self.sweeps = sweeps
        self.pool_size = pool_size
        self.seed = seed
        self.tol = tol
        self.polish = polish
        self.workers = workers

    def fit(self, region: Region, y=None):
        if self.basis is None:
            raise ValueError("basis is required")
        if self.restarts < 1 or self.sweeps < 0 or self.pool_size < 1:
            raise ValueError("restarts and pool_size must be positive, sweeps non-negative")
        _check_dims(self.basis, region)
        children = np.random.SeedSequence(self.seed).spawn(self.restarts)
        jobs = [(self.basis, region, self.pool_size, self.tol, self.polish,
                 int(c.generate_state(1)[0]), self.sweeps) for c in children]
        if self.workers > 1 and self.restarts > 1:
            with ProcessPoolExecutor(self.workers) as ex:
                outs = list(ex.map(_one_restart, jobs))
        else:
            outs = [_one_restart(j) for j in jobs]
        best = max(range(len(outs)), key=lambda i: outs[i][1])
        pts, ld, it, history = outs[best]
        if not region.contains(pts).all():
            raise RuntimeError("optimizer left the region")
        self.points_ = pts
        self.log_abs_det_ = ld
        self.proxy_ = _proxy(self.basis, ld)
        self.iterations_ = it
        self.history_ = history
        self.result_ = FeketeResult(self.basis, pts, ld, self.proxy_, it, self.restarts, history)
        return self

    def score(self, region: Region, y=None) -> float:
        return self.fit(region).proxy_


def fekete_maximize(basis: ModuleBasis, region: Region, restarts: int = 4, sweeps: int = 30,
                    seed: int = 0, **kw) -> FeketeResult:
    return FeketeMaximizer(basis, restarts=restarts, sweeps=sweeps, seed=seed, **kw).fit(region).result_
