"""Bistable reaction, nonlocal operator and forward-Euler integration.

The model advanced here is, row by row,

    dp/dt = s * L[p] - (p**3 - p),
    L[p](x) = sum_y w(x - y) * (p(y) - p(x)),

with ``s = +1`` (``sign="diffusive"``) or ``s = -1`` (``sign="paper_literal"``).
Rows never interact, so they can be evaluated on separate threads.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .core import OffsetWeights, SimConfig

DIVERGENCE_BOUND = 10.0


class DivergenceError(RuntimeError):
    """An Euler step left the band ``|p| <= 10`` or produced a non-finite value."""

    def __init__(self, iteration: int, dt: float):
        self.iteration = iteration
        self.dt = dt
        super().__init__(
            f"iterate diverged at step {iteration} with dt={dt:g}; try a smaller dt"
        )


@dataclass
class RunResult:
    final: np.ndarray
    iterations: int
    converged: bool
    dt: float
    snapshots: list[tuple[int, np.ndarray]] = field(default_factory=list)
    initial_sum: float = 0.0
    final_sum: float = 0.0


def reaction(p):
    """Derivative of the double well, ``p**3 - p``."""
    return p * p * p - p


def potential(p):
    """Double-well potential ``(p**2 - 1)**2 / 4``."""
    return 0.25 * (p * p - 1.0) ** 2


def _sign_factor(sign: str) -> float:
    if sign == "diffusive":
        return 1.0
    if sign == "paper_literal":
        return -1.0
    raise ValueError(f"unknown sign convention {sign!r}")


def _check(grid: np.ndarray, w: OffsetWeights) -> np.ndarray:
    grid = np.ascontiguousarray(grid, dtype=np.float64)
    if grid.ndim != 2 or grid.shape[0] != grid.shape[1]:
        raise ValueError(f"sentiment grid must be square, got shape {grid.shape}")
    if grid.shape[0] != w.n:
        raise ValueError(f"grid has n={grid.shape[0]} but offset weights have n={w.n}")
    return grid


def _row_chunks(n: int, workers: int) -> list[tuple[int, int]]:
    k = max(1, min(workers, n))
    bounds = np.linspace(0, n, k + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


class _Stepper:
    """Runs the compiled row kernels, optionally over a thread pool."""

    def __init__(self, n: int, workers: int = 1):
        self.chunks = _row_chunks(n, workers)
        self.pool = ThreadPoolExecutor(len(self.chunks)) if len(self.chunks) > 1 else None

    def close(self):
        if self.pool is not None:
            self.pool.shutdown()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def nonlocal_term(self, g, w, out):
        if self.pool is None:
            _kernels.nonlocal_rows(g, w, out, 0, g.shape[0])
            return
        list(self.pool.map(lambda c: _kernels.nonlocal_rows(g, w, out, c[0], c[1]), self.chunks))

    def step(self, g, w, dt, sgn, out):
        if self.pool is None:
            return _kernels.euler_rows(g, w, dt, sgn, out, 0, g.shape[0], DIVERGENCE_BOUND)
        parts = list(self.pool.map(
            lambda c: _kernels.euler_rows(g, w, dt, sgn, out, c[0], c[1], DIVERGENCE_BOUND),
            self.chunks,
        ))
        return max(p[0] for p in parts), any(p[1] for p in parts)


def nonlocal_term(grid: np.ndarray, w: OffsetWeights, workers: int = 1) -> np.ndarray:
    """``out[i, x] = sum_y w(x - y) * (grid[i, y] - grid[i, x])``, y ascending."""
    grid = _check(grid, w)
    out = np.empty_like(grid)
    with _Stepper(w.n, workers) as stepper:
        stepper.nonlocal_term(grid, np.ascontiguousarray(w.w), out)
    return out


def stable_dt(w: OffsetWeights) -> float:
    """Step size ``0.9 / (S + 2)`` with ``S = sum_d w(d)``.

    ``S`` bounds the row sums of the operator and 2 bounds ``|f'|`` on ``[-1, 1]``.
    """
    return 0.9 / (float(np.sum(w.w)) + 2.0)


def resolve_dt(cfg: SimConfig, w: OffsetWeights) -> float:
    return stable_dt(w) if cfg.dt == "auto" else float(cfg.dt)


def euler_step(grid: np.ndarray, w: OffsetWeights, dt: float, sign: str = "diffusive",
               workers: int = 1) -> np.ndarray:
    """One forward-Euler step; raises :class:`DivergenceError` if the result leaves ``|p| <= 10``."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    grid = _check(grid, w)
    out = np.empty_like(grid)
    with _Stepper(w.n, workers) as stepper:
        _, diverged = stepper.step(grid, np.ascontiguousarray(w.w), float(dt), _sign_factor(sign), out)
    if diverged:
        raise DivergenceError(1, dt)
    return out


def _grid_sum(grid: np.ndarray) -> float:
    return float(sum(grid.ravel().tolist()))


def stop_tolerance(cfg: SimConfig, dt: float) -> float:
    """Threshold on ``max |P[k+1] - P[k]|`` below which a run counts as converged.

    ``per_iterate`` compares the raw update with ``eps``. ``per_time`` (the
    default) compares the update per unit time, ``eps * dt``, so the rule does
    not fire early just because ``dt`` is small; it is never looser than
    ``eps``.
    """
    if cfg.stop_rule == "per_iterate":
        return cfg.eps
    return cfg.eps * min(dt, 1.0)


def run_to_equilibrium(grid0: np.ndarray, w: OffsetWeights, cfg: SimConfig,
                       workers: int = 1) -> RunResult:
    """Iterate Euler steps until the update falls below the stop tolerance.

    Parameters
    ----------
    grid0 : ndarray
        Initial ``n x n`` sentiment grid.
    w : OffsetWeights
        Effective kernel for the same ``n``.
    cfg : SimConfig
        Uses ``dt``, ``eps``, ``stop_rule``, ``max_iters``, ``sign`` and
        ``snapshot_every``.
    workers : int
        Threads used for row evaluation. Does not change any result bit.

    Returns
    -------
    RunResult
        ``converged`` is False when ``max_iters`` was exhausted.
        Snapshots hold iteration 0, every ``snapshot_every``-th iterate and the
        final state (empty when ``snapshot_every == 0``).

    Raises
    ------
    DivergenceError
        When an iterate leaves ``|p| <= 10``.
    """
    g = _check(grid0, w).copy()
    dt = resolve_dt(cfg, w)
    tol = stop_tolerance(cfg, dt)
    sgn = _sign_factor(cfg.sign)
    wv = np.ascontiguousarray(w.w)
    every = cfg.snapshot_every
    snapshots = [(0, g.copy())] if every else []
    initial_sum = _grid_sum(g)
    out = np.empty_like(g)

    converged = False
    k = 0
    with _Stepper(w.n, workers) as stepper:
        for k in range(1, cfg.max_iters + 1):
            maxdiff, diverged = stepper.step(g, wv, dt, sgn, out)
            if diverged:
                raise DivergenceError(k, dt)
            g, out = out, g
            if every and k % every == 0:
                snapshots.append((k, g.copy()))
            if maxdiff < tol:
                converged = True
                break

    if every and snapshots[-1][0] != k:
        snapshots.append((k, g.copy()))
    return RunResult(
        final=g,
        iterations=k,
        converged=converged,
        dt=dt,
        snapshots=snapshots,
        initial_sum=initial_sum,
        final_sum=_grid_sum(g),
    )


def baseline_no_interaction(grid0: np.ndarray) -> np.ndarray:
    """Limit of ``dp/dt = p - p**3`` from each entry: its sign (0 stays 0)."""
    grid0 = np.asarray(grid0, dtype=np.float64)
    if not np.all(np.isfinite(grid0)):
        raise ValueError("grid contains non-finite values")
    return np.sign(grid0)
