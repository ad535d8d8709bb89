"""Difference maps, sentiment sums, polarity labels, energy and the sensitivity scan."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import OffsetWeights, SimConfig
from .dynamics import DivergenceError, potential, run_to_equilibrium

MIXED_FRACTION = 0.05


def sign_of(v: float) -> int:
    if v > 0:
        return 1
    if v < 0:
        return -1
    return 0


def _same_shape(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"grid shapes differ: {a.shape} vs {b.shape}")
    return a, b


def difference_map(initial: np.ndarray, final: np.ndarray) -> np.ndarray:
    """``sgn(final) - sgn(initial)`` as an ``int8`` array with values in -2..2."""
    initial, final = _same_shape(initial, final)
    return (np.sign(final) - np.sign(initial)).astype(np.int8)


def sentiment_sum(grid: np.ndarray) -> float:
    """Entrywise sum, accumulated left to right in row-major order."""
    return float(sum(np.asarray(grid, dtype=np.float64).ravel().tolist()))


@dataclass
class PolarityReport:
    initial_sum: float
    final_sum: float
    count_pos_flip: int
    count_neg_flip: int
    count_unchanged: int
    classification: str


def polarity_report(initial: np.ndarray, final: np.ndarray) -> PolarityReport:
    """Count polarity flips and label the overall change.

    ``unchanged`` when nothing flipped, ``mixed`` when both flip directions
    cover more than 5% of the pixels, otherwise ``dominant_positive`` or
    ``dominant_negative`` by the direction the total sentiment moved.
    """
    diff = difference_map(initial, final)
    pos = int(np.count_nonzero(diff == 2))
    neg = int(np.count_nonzero(diff == -2))
    same = int(np.count_nonzero(diff == 0))
    s0, s1 = sentiment_sum(initial), sentiment_sum(final)
    threshold = MIXED_FRACTION * diff.size
    if pos == 0 and neg == 0:
        label = "unchanged"
    elif pos > threshold and neg > threshold:
        label = "mixed"
    elif s1 > s0:
        label = "dominant_positive"
    else:
        label = "dominant_negative"
    return PolarityReport(s0, s1, pos, neg, same, label)


def energy(grid: np.ndarray, w: OffsetWeights) -> float:
    """Nonlocal double-well energy.

    ``sum_i [ 1/4 sum_{x,y} w(x-y) (g[i,y] - g[i,x])**2 ] + sum_{i,x} F(g[i,x])``.
    A Lyapunov function of the diffusive dynamics when ``w`` is symmetric.
    """
    grid = np.asarray(grid, dtype=np.float64)
    if grid.shape != (w.n, w.n):
        raise ValueError(f"grid shape {grid.shape} does not match n={w.n}")
    diffs = grid[:, None, :] - grid[:, :, None]
    interaction = 0.25 * float(np.sum(w.matrix()[None, :, :] * diffs * diffs))
    return interaction + float(np.sum(potential(grid)))


class SensitivityResult(NamedTuple):
    pixel: tuple[int, int]
    deviation: float
    table: np.ndarray


def _perturbed_deviation(grid0, w, cfg, reference, pixel):
    start = grid0.copy()
    start[pixel] = -start[pixel]
    try:
        res = run_to_equilibrium(start, w, cfg)
    except DivergenceError:
        return np.nan
    if not res.converged:
        return np.nan
    return float(np.sum(np.abs(res.final - reference)))


def sensitivity_scan(grid0: np.ndarray, w: OffsetWeights, cfg: SimConfig,
                     workers: int = 1) -> SensitivityResult:
    """Find the single sign flip of the initial grid that moves the equilibrium most.

    Each pixel is flipped (``p -> -p``) and rerun to equilibrium; its entry in
    the table is the L1 distance to the unperturbed equilibrium, or NaN when
    that rerun diverged or did not converge. Ties go to the smallest row, then
    the smallest column.
    """
    grid0 = np.asarray(grid0, dtype=np.float64)
    cfg = cfg.replace(snapshot_every=0)
    ref = run_to_equilibrium(grid0, w, cfg)
    if not ref.converged:
        raise RuntimeError(f"reference run did not converge in {cfg.max_iters} iterations")

    pixels = [(i, x) for i in range(grid0.shape[0]) for x in range(grid0.shape[1])]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            devs = list(pool.map(lambda p: _perturbed_deviation(grid0, w, cfg, ref.final, p), pixels))
    else:
        devs = [_perturbed_deviation(grid0, w, cfg, ref.final, p) for p in pixels]
    table = np.array(devs).reshape(grid0.shape)

    if np.all(np.isnan(table)):
        raise RuntimeError("no perturbed run converged")
    flat = int(np.nanargmax(table))
    pixel = (flat // grid0.shape[1], flat % grid0.shape[1])
    return SensitivityResult(pixel, float(table[pixel]), table)
