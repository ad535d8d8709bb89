"""Command-line front end.

    nonlocal-sentiment gen-kernel --seed 7 --out run/kernel.csv
    nonlocal-sentiment gen-init --seed 8 --out run/init.csv
    nonlocal-sentiment simulate --kernel run/kernel.csv --init run/init.csv --outdir run/out

Exit codes: 0 success, 1 no convergence within max_iters, 2 bad input,
3 divergence.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import analysis, core, dynamics, io_formats
from .core import SimConfig

EXIT_OK = 0
EXIT_NOT_CONVERGED = 1
EXIT_BAD_INPUT = 2
EXIT_DIVERGED = 3


class InputError(Exception):
    pass


def _positive_float(s: str) -> float:
    v = float(s)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {s}")
    return v


def _positive_int(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {s}")
    return v


def _nonneg_int(s: str) -> int:
    v = int(s)
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {s}")
    return v


def _seed(s: str) -> int:
    v = int(s, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError(f"seed must fit in 64 unsigned bits, got {s}")
    return v


def _dt(s: str):
    return "auto" if s == "auto" else _positive_float(s)


def _bool(s: str) -> bool:
    try:
        return io_formats._parse_bool(s)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _pgm_path(csv_path: Path) -> Path:
    return csv_path.with_suffix(".pgm")


def _write_pair(array, mapping: str, csv_path: Path) -> list[Path]:
    io_formats.write_csv(array, csv_path)
    io_formats.write_pgm(array, mapping, _pgm_path(csv_path))
    return [csv_path, _pgm_path(csv_path)]


def _read_grid(path: str) -> np.ndarray:
    try:
        grid = io_formats.read_csv(path)
    except (OSError, io_formats.FormatError) as exc:
        raise InputError(str(exc)) from None
    if grid.shape[0] != grid.shape[1]:
        raise InputError(f"{path}: sentiment grid must be square, got {grid.shape}")
    return grid


def _read_kernel(path: str, n: int) -> core.ExtendedKernel:
    try:
        values = io_formats.read_csv(path)
        return core.kernel_from_array(values, n)
    except (OSError, ValueError) as exc:
        raise InputError(f"{path}: {exc}") from None


def _add_run_overrides(p: argparse.ArgumentParser) -> None:
    p.add_argument("--kernel", help="kernel CSV (default: generate from seed_kernel)")
    p.add_argument("--init", help="initial grid CSV (default: generate from seed_init)")
    p.add_argument("--config", help="key = value config file")
    p.add_argument("--n", type=_positive_int)
    p.add_argument("--extra", type=_nonneg_int)
    p.add_argument("--mu", type=float)
    p.add_argument("--sigma", type=_positive_float)
    p.add_argument("--seed-kernel", type=_seed)
    p.add_argument("--seed-init", type=_seed)
    p.add_argument("--dt", type=_dt, help="time step or 'auto'")
    p.add_argument("--eps", type=_positive_float)
    p.add_argument("--max-iters", type=_positive_int)
    p.add_argument("--sign", choices=core.SIGNS)
    p.add_argument("--stop-rule", choices=core.STOP_RULES)
    p.add_argument("--snapshot-every", type=_nonneg_int)
    p.add_argument("--symmetrize-offsets", type=_bool, metavar="{true,false}")
    p.add_argument("--threads", type=_positive_int, default=1,
                   help="worker threads (never changes results)")


_OVERRIDES = ("n", "extra", "mu", "sigma", "seed_kernel", "seed_init", "dt", "eps", "max_iters",
              "sign", "stop_rule", "snapshot_every", "symmetrize_offsets")


def _load_run_inputs(args):
    """Resolve config (defaults < config file < flags) and load or generate inputs.

    Returns ``(cfg, kernel, grid0, sources)``; when files are given, ``n`` and
    ``extra`` follow their shapes.
    """
    values = {}
    if args.config:
        try:
            values = io_formats.parse_config_text(Path(args.config).read_text(), args.config)
        except OSError as exc:
            raise InputError(str(exc)) from None
    for key in _OVERRIDES:
        flag = getattr(args, key)
        if flag is not None:
            values[key] = flag

    grid0 = kernel = None
    if args.init:
        grid0 = _read_grid(args.init)
        if "n" in values and values["n"] != grid0.shape[0]:
            raise InputError(f"n = {values['n']} conflicts with the {grid0.shape[0]}x{grid0.shape[0]} grid in {args.init}")
        values["n"] = grid0.shape[0]
    if args.kernel:
        n = values.get("n", SimConfig.n)
        kernel = _read_kernel(args.kernel, n)
        values["extra"] = kernel.t - n
    try:
        cfg = SimConfig(**values)
    except ValueError as exc:
        raise InputError(str(exc)) from None

    if kernel is None:
        kernel = core.gen_kernel(cfg.n, cfg.extra, cfg.mu, cfg.sigma, core.make_rng(cfg.seed_kernel))
    if grid0 is None:
        grid0 = core.gen_initial_grid(cfg.n, core.make_rng(cfg.seed_init))
    sources = {
        "kernel": Path(args.kernel).name if args.kernel else f"generated from seed_kernel = {cfg.seed_kernel}",
        "init": Path(args.init).name if args.init else f"generated from seed_init = {cfg.seed_init}",
    }
    return cfg, kernel, grid0, sources


def cmd_gen_kernel(args) -> int:
    extra = args.n - 1 if args.extra is None else args.extra
    kernel = core.gen_kernel(args.n, extra, args.mu, args.sigma, core.make_rng(args.seed))
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    _write_pair(kernel.values, "kernel", out)
    print(f"wrote {out} and {_pgm_path(out)} ({kernel.t}x{kernel.t}, block_start={kernel.block_start})")
    return EXIT_OK


def cmd_gen_init(args) -> int:
    grid = core.gen_initial_grid(args.n, core.make_rng(args.seed))
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    _write_pair(grid, "sentiment", out)
    print(f"wrote {out} and {_pgm_path(out)} (sum {analysis.sentiment_sum(grid):.3f})")
    return EXIT_OK


def _manifest_text(cfg, res, report, sources, files) -> str:
    lines = [
        "# nonlocal sentiment run",
        f"converged = {str(res.converged).lower()}",
        f"iterations = {res.iterations}",
        f"resolved_dt = {res.dt!r}",
        f"initial_sum = {res.initial_sum!r}",
        f"final_sum = {res.final_sum!r}",
        f"classification = {report.classification}",
        f"count_pos_flip = {report.count_pos_flip}",
        f"count_neg_flip = {report.count_neg_flip}",
        f"count_unchanged = {report.count_unchanged}",
        f"seed_kernel = {cfg.seed_kernel}",
        f"seed_init = {cfg.seed_init}",
        f"kernel_source = {sources['kernel']}",
        f"init_source = {sources['init']}",
        "",
        f"# Sum of initial sentiment is {res.initial_sum:.3f} vs. sum of final sentiment "
        f"after {res.iterations} iterations is {res.final_sum:.3f}.",
        "",
        "[config]",
        io_formats.format_config(cfg).rstrip("\n"),
        "",
        "[files]",
    ]
    lines += [f.name for f in files]
    return "\n".join(lines) + "\n"


def cmd_simulate(args) -> int:
    cfg, kernel, grid0, sources = _load_run_inputs(args)
    w = core.kernel_offsets(kernel, cfg.symmetrize_offsets)

    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    try:
        res = dynamics.run_to_equilibrium(grid0, w, cfg, workers=args.threads)
    except dynamics.DivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGED

    files = _write_pair(kernel.values, "kernel", outdir / "kernel.csv")
    snapshots = res.snapshots or [(0, grid0)]
    for k, snap in snapshots:
        files += _write_pair(snap, "sentiment", outdir / f"phi{k:05d}.csv")
    files += _write_pair(res.final, "sentiment", outdir / "final.csv")
    files += _write_pair(dynamics.baseline_no_interaction(grid0), "sentiment", outdir / "baseline.csv")
    files += _write_pair(analysis.difference_map(grid0, res.final), "diffmap", outdir / "diff.csv")
    report = analysis.polarity_report(grid0, res.final)
    (outdir / "manifest.txt").write_text(_manifest_text(cfg, res, report, sources, files))

    print(
        f"Sum of initial sentiment is {res.initial_sum:.3f} vs. sum of final sentiment "
        f"after {res.iterations} iterations is {res.final_sum:.3f} ({report.classification})"
    )
    if not res.converged:
        print(f"error: no convergence within {cfg.max_iters} iterations", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def cmd_baseline(args) -> int:
    grid = _read_grid(args.init)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    _write_pair(dynamics.baseline_no_interaction(grid), "sentiment", out)
    print(f"wrote {out}")
    return EXIT_OK


def _print_report(report: analysis.PolarityReport) -> None:
    print(f"initial_sum = {report.initial_sum:.3f}")
    print(f"final_sum = {report.final_sum:.3f}")
    print(f"count_pos_flip = {report.count_pos_flip}")
    print(f"count_neg_flip = {report.count_neg_flip}")
    print(f"count_unchanged = {report.count_unchanged}")
    print(f"classification = {report.classification}")


def _read_pair(args) -> tuple[np.ndarray, np.ndarray]:
    initial, final = _read_grid(args.initial), _read_grid(args.final)
    if initial.shape != final.shape:
        raise InputError(f"grid shapes differ: {initial.shape} vs {final.shape}")
    return initial, final


def cmd_diffmap(args) -> int:
    initial, final = _read_pair(args)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    _write_pair(analysis.difference_map(initial, final), "diffmap", out)
    _print_report(analysis.polarity_report(initial, final))
    return EXIT_OK


def cmd_report(args) -> int:
    initial, final = _read_pair(args)
    _print_report(analysis.polarity_report(initial, final))
    return EXIT_OK


def cmd_sensitivity(args) -> int:
    cfg, kernel, grid0, _ = _load_run_inputs(args)
    w = core.kernel_offsets(kernel, cfg.symmetrize_offsets)
    try:
        result = analysis.sensitivity_scan(grid0, w, cfg, workers=args.threads)
    except dynamics.DivergenceError as exc:
        print(f"error: reference run: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    io_formats.write_csv(result.table, out)
    if not np.any(np.isnan(result.table)):
        io_formats.write_pgm(result.table, "kernel", _pgm_path(out))
    i, x = result.pixel
    print(f"most sensitive pixel: row {i}, column {x}, deviation {result.deviation:.6f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nonlocal-sentiment",
        description="Nonlocal Chafee-Infante model of public sentiment.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-kernel", help="draw a symmetric lognormal interaction kernel")
    p.add_argument("--n", type=_positive_int, default=16)
    p.add_argument("--extra", type=_nonneg_int, default=None, help="outside individuals (default n-1)")
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--sigma", type=_positive_float, default=1.7)
    p.add_argument("--seed", type=_seed, default=1)
    p.add_argument("--out", required=True, help="kernel CSV path; a .pgm is written alongside")
    p.set_defaults(func=cmd_gen_kernel)

    p = sub.add_parser("gen-init", help="draw a uniform random initial sentiment grid")
    p.add_argument("--n", type=_positive_int, default=16)
    p.add_argument("--seed", type=_seed, default=2)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_init)

    p = sub.add_parser("simulate", help="integrate to equilibrium and write all outputs")
    p.add_argument("--outdir", required=True)
    _add_run_overrides(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("baseline", help="end state without interaction")
    p.add_argument("--init", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("diffmap", help="sign difference map between two grids")
    p.add_argument("--initial", required=True)
    p.add_argument("--final", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_diffmap)

    p = sub.add_parser("report", help="polarity summary of two grids")
    p.add_argument("--initial", required=True)
    p.add_argument("--final", required=True)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("sensitivity", help="single-flip sensitivity scan")
    p.add_argument("--out", required=True, help="deviation table CSV")
    _add_run_overrides(p)
    p.set_defaults(func=cmd_sensitivity)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, io_formats.ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
