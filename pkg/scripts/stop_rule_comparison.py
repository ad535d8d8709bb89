"""Compare the two stopping rules on default 16x16 runs.

``per_iterate`` stops once the raw update is below eps; with the auto time
step that happens after the fast diffusive transient, long before the wells
are reached. ``per_time`` scales the threshold by dt.

    python scripts/stop_rule_comparison.py
"""

import numpy as np

from nonlocal_sentiment import SimConfig, gen_initial_grid, gen_kernel, kernel_offsets, make_rng, run_to_equilibrium

print(f"{'seed':>4} {'rule':>12} {'iters':>7} {'sum':>9} {'|p|>0.9':>8}")
for seed in range(5):
    w = kernel_offsets(gen_kernel(16, 15, 1.0, 1.7, make_rng(seed)))
    grid0 = gen_initial_grid(16, make_rng(1000 + seed))
    for rule in ("per_iterate", "per_time"):
        res = run_to_equilibrium(grid0, w, SimConfig(stop_rule=rule, snapshot_every=0))
        frac = np.mean(np.abs(res.final) > 0.9)
        print(f"{seed:>4} {rule:>12} {res.iterations:>7} {res.final_sum:>9.3f} {frac:>8.2f}")
