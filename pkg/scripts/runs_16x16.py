"""Two 16x16 runs with snapshots every 475 iterations.

Writes kernel, snapshots every 475 iterations, final state, no-interaction
baseline and difference map for each run under ``runs/16x16/<seed>/``.

    python scripts/runs_16x16.py [--seeds 3 4] [--outdir runs/16x16]
"""

import argparse
from pathlib import Path

from nonlocal_sentiment.cli import main as cli

parser = argparse.ArgumentParser()
parser.add_argument("--seeds", type=int, nargs="+", default=[3, 4])
parser.add_argument("--outdir", default="runs/16x16")
args = parser.parse_args()

for seed in args.seeds:
    root = Path(args.outdir) / str(seed)
    cli(["gen-kernel", "--seed", str(seed), "--out", str(root / "kernel.csv")])
    cli(["gen-init", "--seed", str(1000 + seed), "--out", str(root / "init.csv")])
    cli(["simulate", "--kernel", str(root / "kernel.csv"), "--init", str(root / "init.csv"),
         "--outdir", str(root / "out")])
