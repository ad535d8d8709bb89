"""Difference maps for several 32x32 systems, labelled by polarity.

    python scripts/difference_maps_32.py [--count 6] [--outdir runs/diff32]
"""

import argparse
from pathlib import Path

from nonlocal_sentiment import (
    SimConfig, gen_initial_grid, gen_kernel, kernel_offsets, make_rng,
    difference_map, polarity_report, run_to_equilibrium,
)
from nonlocal_sentiment.io_formats import write_csv, write_pgm

parser = argparse.ArgumentParser()
parser.add_argument("--count", type=int, default=6)
parser.add_argument("--outdir", default="runs/diff32")
parser.add_argument("--symmetrize", action="store_true")
args = parser.parse_args()

out = Path(args.outdir)
out.mkdir(parents=True, exist_ok=True)
for seed in range(args.count):
    cfg = SimConfig(n=32, max_iters=1_000_000, snapshot_every=0, seed_kernel=seed, seed_init=1000 + seed,
                    symmetrize_offsets=args.symmetrize)
    w = kernel_offsets(gen_kernel(cfg.n, cfg.extra, cfg.mu, cfg.sigma, make_rng(cfg.seed_kernel)),
                       cfg.symmetrize_offsets)
    grid0 = gen_initial_grid(cfg.n, make_rng(cfg.seed_init))
    res = run_to_equilibrium(grid0, w, cfg)
    diff = difference_map(grid0, res.final)
    write_csv(diff, out / f"diff{seed:02d}.csv")
    write_pgm(diff, "diffmap", out / f"diff{seed:02d}.pgm")
    rep = polarity_report(grid0, res.final)
    print(f"seed {seed}: {res.iterations} iterations, converged={res.converged}, "
          f"+2 flips {rep.count_pos_flip}, -2 flips {rep.count_neg_flip}, {rep.classification}")
