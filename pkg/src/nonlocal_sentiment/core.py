"""Domain types and seeded generation of sentiment grids and interaction kernels.

Sentiment grids are plain ``float64`` arrays of shape ``(n, n)``: rows are
individuals, columns are questions, values live in ``[-1, 1]``.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Literal, Union

import numpy as np
from scipy.special import ndtri

SIGNS = ("diffusive", "paper_literal")
STOP_RULES = ("per_time", "per_iterate")

# Offset added to k / 2**53 uniforms so the inverse normal CDF never sees 0.
_HALF_ULP = 2.0 ** -54


@dataclass
class SimConfig:
    """All parameters of one run.

    ``extra=None`` means ``n - 1`` outside individuals (31 people for n=16).
    ``dt="auto"`` resolves to :func:`nonlocal_sentiment.dynamics.stable_dt`.
    """

    n: int = 16
    extra: int | None = None
    mu: float = 1.0
    sigma: float = 1.7
    dt: Union[float, Literal["auto"]] = "auto"
    eps: float = 1e-3
    max_iters: int = 100_000
    sign: str = "diffusive"
    stop_rule: str = "per_time"
    snapshot_every: int = 475
    seed_kernel: int = 1
    seed_init: int = 2
    symmetrize_offsets: bool = False

    def __post_init__(self):
        if self.extra is None:
            self.extra = self.n - 1
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.extra < 0:
            raise ValueError(f"extra must be >= 0, got {self.extra}")
        if not self.sigma > 0:
            raise ValueError(f"sigma must be > 0, got {self.sigma}")
        if self.dt != "auto" and not (isinstance(self.dt, (int, float)) and self.dt > 0):
            raise ValueError(f"dt must be positive or 'auto', got {self.dt!r}")
        if not self.eps > 0:
            raise ValueError(f"eps must be > 0, got {self.eps}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        if self.sign not in SIGNS:
            raise ValueError(f"sign must be one of {SIGNS}, got {self.sign!r}")
        if self.stop_rule not in STOP_RULES:
            raise ValueError(f"stop_rule must be one of {STOP_RULES}, got {self.stop_rule!r}")
        if self.snapshot_every < 0:
            raise ValueError(f"snapshot_every must be >= 0, got {self.snapshot_every}")
        for name in ("seed_kernel", "seed_init"):
            seed = getattr(self, name)
            if not 0 <= seed < 2**64:
                raise ValueError(f"{name} must be a 64-bit unsigned integer, got {seed}")

    def replace(self, **changes) -> "SimConfig":
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class ExtendedKernel:
    """Symmetric ``t x t`` interaction array with the surveyed ``n x n`` block inside."""

    values: np.ndarray
    n: int
    block_start: int

    @property
    def t(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class OffsetWeights:
    """Effective kernel ``w(d)`` for offsets ``d = -(n-1) .. n-1``.

    ``w[d + n - 1]`` holds ``w(d)``; use :meth:`at` for offset lookups.
    """

    n: int
    w: np.ndarray = field(repr=False)

    def at(self, d: int) -> float:
        if abs(d) > self.n - 1:
            raise IndexError(f"offset {d} outside +-{self.n - 1}")
        return float(self.w[d + self.n - 1])

    @property
    def offsets(self) -> np.ndarray:
        return np.arange(-(self.n - 1), self.n)

    def matrix(self) -> np.ndarray:
        """Toeplitz matrix ``M[x, y] = w(x - y)``."""
        idx = np.arange(self.n)
        return self.w[idx[:, None] - idx[None, :] + self.n - 1]

    @classmethod
    def zeros(cls, n: int) -> "OffsetWeights":
        return cls(n, np.zeros(2 * n - 1))


def make_rng(seed: int) -> np.random.Generator:
    """PCG64 stream; equal seeds give identical sequences."""
    return np.random.Generator(np.random.PCG64(seed))


def _standard_normals(rng: np.random.Generator, size: int) -> np.ndarray:
    # inverse-CDF transform of open-interval uniforms
    return ndtri(rng.random(size) + _HALF_ULP)


def gen_initial_grid(n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform ``[-1, 1]`` responses, drawn in row-major order."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return (2.0 * rng.random(n * n) - 1.0).reshape(n, n)


def gen_kernel(n: int, extra: int, mu: float, sigma: float,
               rng: np.random.Generator) -> ExtendedKernel:
    """Draw a symmetric lognormal interaction kernel with zero diagonal.

    Entries above the diagonal are ``exp(mu + sigma * Z)`` sampled in
    row-major order, then mirrored. The surveyed block is centred:
    ``block_start = (t - n) // 2``.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if extra < 0:
        raise ValueError(f"extra must be >= 0, got {extra}")
    if not sigma > 0:
        raise ValueError(f"sigma must be > 0, got {sigma}")
    t = n + extra
    rows, cols = np.triu_indices(t, k=1)
    values = np.zeros((t, t))
    values[rows, cols] = np.exp(mu + sigma * _standard_normals(rng, rows.size))
    values[cols, rows] = values[rows, cols]
    return ExtendedKernel(values=values, n=n, block_start=(t - n) // 2)


def kernel_offsets(kernel: ExtendedKernel, symmetrize: bool = False) -> OffsetWeights:
    """Sum the surveyed columns of the kernel into per-offset weights.

    Column ``m`` is anchored at its own diagonal entry ``a = block_start + m``
    and read with wrap-around, ``kappa_m(d) = K[(a + d) % t, a]``.
    """
    n, t = kernel.n, kernel.t
    d = np.arange(-(n - 1), n)
    w = np.zeros(2 * n - 1)
    for m in range(n):
        a = kernel.block_start + m
        w += kernel.values[(a + d) % t, a]
    if symmetrize:
        w = 0.5 * (w + w[::-1])
    return OffsetWeights(n, w)


def validate_kernel(values: np.ndarray, n: int | None = None) -> None:
    """Raise ``ValueError`` naming the first entry that breaks the kernel invariants."""
    values = np.asarray(values)
    if values.ndim != 2 or values.shape[0] != values.shape[1]:
        raise ValueError(f"kernel must be square, got shape {values.shape}")
    t = values.shape[0]
    if n is not None and n > t:
        raise ValueError(f"kernel of size {t} cannot hold a {n}x{n} surveyed block")
    if not np.all(np.isfinite(values)):
        a, b = np.argwhere(~np.isfinite(values))[0]
        raise ValueError(f"kernel entry ({a}, {b}) is not finite")
    for a in range(t):
        if values[a, a] != 0:
            raise ValueError(f"kernel diagonal entry ({a}, {a}) is {values[a, a]!r}, expected 0")
    for a in range(t):
        for b in range(a + 1, t):
            if values[a, b] != values[b, a]:
                raise ValueError(
                    f"kernel is not symmetric: entry ({a}, {b}) = {values[a, b]!r} "
                    f"but ({b}, {a}) = {values[b, a]!r}"
                )
            if values[a, b] < 0:
                raise ValueError(f"kernel entry ({a}, {b}) is negative")


def kernel_from_array(values: np.ndarray, n: int) -> ExtendedKernel:
    values = np.array(values, dtype=np.float64)
    validate_kernel(values, n)
    t = values.shape[0]
    return ExtendedKernel(values=values, n=n, block_start=(t - n) // 2)
