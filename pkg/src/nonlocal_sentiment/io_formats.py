"""Plain-text PGM images, CSV grids and the ``key = value`` config format.

Gray levels follow the figure convention: +1 (strongly agree) is black,
-1 (strongly disagree) is white.
"""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np

from .core import SIGNS, STOP_RULES, SimConfig

MAPPINGS = ("sentiment", "kernel", "diffmap")


class FormatError(ValueError):
    pass


class ConfigError(ValueError):
    pass


def _round_half_away(x: np.ndarray) -> np.ndarray:
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def gray_levels(array, mapping: str) -> np.ndarray:
    """Map values to integer gray levels 0..255 for the given mapping kind."""
    a = np.asarray(array, dtype=np.float64)
    if a.ndim != 2 or a.size == 0:
        raise ValueError(f"expected a nonempty 2-D array, got shape {a.shape}")
    if np.any(np.isnan(a)):
        raise ValueError("cannot render NaN values")
    if mapping == "sentiment":
        raw = (1.0 - a) / 2.0 * 255.0
    elif mapping == "kernel":
        vmax = a.max()
        if vmax == 0:
            return np.full(a.shape, 255, dtype=np.int64)
        raw = (1.0 - a / vmax) * 255.0
    elif mapping == "diffmap":
        raw = (2.0 - a) / 4.0 * 255.0
    else:
        raise ValueError(f"unknown mapping {mapping!r}; expected one of {MAPPINGS}")
    return np.clip(_round_half_away(raw), 0, 255).astype(np.int64)


def write_pgm(array, mapping: str, path: str | os.PathLike) -> None:
    """Write an ASCII ("P2") PGM, one image row per line."""
    gray = gray_levels(array, mapping)
    h, w = gray.shape
    lines = ["P2", f"{w} {h}", "255"]
    lines += [" ".join(str(v) for v in row) for row in gray.tolist()]
    Path(path).write_text("\n".join(lines) + "\n")


def read_pgm(path: str | os.PathLike) -> np.ndarray:
    """Read back a P2 file written by :func:`write_pgm` (test helper)."""
    tokens = Path(path).read_text().split()
    if not tokens or tokens[0] != "P2":
        raise FormatError(f"{path}: not a plain PGM file")
    w, h, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    data = np.array([int(t) for t in tokens[4:]])
    if data.size != w * h or maxval != 255:
        raise FormatError(f"{path}: malformed PGM body")
    return data.reshape(h, w)


def write_csv(grid, path: str | os.PathLike) -> None:
    """Comma-separated rows using the shortest round-trip decimal form."""
    a = np.asarray(grid)
    if a.ndim != 2 or a.size == 0:
        raise ValueError(f"expected a nonempty 2-D array, got shape {a.shape}")
    as_int = np.issubdtype(a.dtype, np.integer)
    rows = []
    for row in a.tolist():
        rows.append(",".join(str(int(v)) if as_int else repr(float(v)) for v in row))
    Path(path).write_text("\n".join(rows) + "\n")


def read_csv(path: str | os.PathLike) -> np.ndarray:
    text = Path(path).read_text()
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise FormatError(f"{path}: empty file")
    rows = []
    for lineno, line in enumerate(lines, 1):
        row = []
        for cell in line.split(","):
            try:
                v = float(cell)
            except ValueError:
                raise FormatError(f"{path}:{lineno}: non-numeric cell {cell.strip()!r}") from None
            if not np.isfinite(v):
                raise FormatError(f"{path}:{lineno}: non-finite cell {cell.strip()!r}")
            row.append(v)
        if rows and len(row) != len(rows[0]):
            raise FormatError(
                f"{path}:{lineno}: ragged rows ({len(row)} cells, expected {len(rows[0])})"
            )
        rows.append(row)
    return np.array(rows, dtype=np.float64)


def _parse_bool(s: str) -> bool:
    low = s.lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _parse_dt(s: str):
    return "auto" if s.lower() == "auto" else float(s)


def _parse_choice(choices):
    def parse(s: str) -> str:
        if s not in choices:
            raise ValueError(f"expected one of {choices}, got {s!r}")
        return s
    return parse


def _parse_seed(s: str) -> int:
    v = int(s, 0)
    if not 0 <= v < 2**64:
        raise ValueError(f"seed out of 64-bit unsigned range: {s}")
    return v


CONFIG_KEYS = {
    "n": int,
    "extra": int,
    "mu": float,
    "sigma": float,
    "dt": _parse_dt,
    "eps": float,
    "max_iters": int,
    "sign": _parse_choice(SIGNS),
    "stop_rule": _parse_choice(STOP_RULES),
    "snapshot_every": int,
    "seed_kernel": _parse_seed,
    "seed_init": _parse_seed,
    "symmetrize_offsets": _parse_bool,
}


def parse_config_text(text: str, source: str = "<config>") -> dict:
    """Parse ``key = value`` lines into a dict of typed values (only keys present)."""
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        try:
            values[key] = CONFIG_KEYS[key](value)
        except ValueError as exc:
            raise ConfigError(f"{source}:{lineno}: bad value for {key!r}: {exc}") from None
    return values


def parse_config(path: str | os.PathLike) -> SimConfig:
    values = parse_config_text(Path(path).read_text(), str(path))
    try:
        return SimConfig(**values)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def format_config(cfg: SimConfig) -> str:
    """Render a config in the same format :func:`parse_config` reads."""
    lines = []
    for key, value in cfg.as_dict().items():
        if isinstance(value, bool):
            value = str(value).lower()
        elif isinstance(value, float):
            value = repr(value)
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"
