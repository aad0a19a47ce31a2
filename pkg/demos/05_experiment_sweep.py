"""A short Monte Carlo sweep, the same shape as the shipped experiments.

Each cell fixes a power profile and the probability that a carrier is idle,
draws many slots, and averages the total input power of the static mapping,
relax-and-round and the exhaustive optimum on the very same slots. Use
``mcpamap sweep exp1`` for the full 10^4-slot version.

Run:  python3 demos/05_experiment_sweep.py [slots]
"""

from __future__ import annotations

import sys

from mcpamap.config import load_config
from mcpamap.simulation import run_experiment

slots = int(sys.argv[1]) if len(sys.argv) > 1 else 500
config = load_config("exp1").to_experiment(slots=slots, p_grid=(0.1, 0.3, 0.5, 0.7, 0.9))
metrics = run_experiment(config)

print(f"{config.name}: {config.n_c} carriers, {config.n_pa} PAs, K={config.capacity}, "
      f"{slots} slots per cell\n")
print(f"{'profile':>10} {'p':>4} {'static W':>9} {'dynamic W':>10} {'optimal W':>10} "
      f"{'saving':>7} {'of gain':>8}")
for kind in config.profiles:
    for p in config.p_grid:
        s = metrics.cell(kind, p, "static")
        d = metrics.cell(kind, p, "dynamic")
        e = metrics.cell(kind, p, "exhaustive")
        print(f"{kind.value:>10} {p:4.1f} {s.mean_power:9.2f} {d.mean_power:10.2f} "
              f"{e.mean_power:10.2f} {100 * d.saving_vs_static:6.2f}% "
              f"{d.fraction_of_optimal_gain:8.3f}")
print(f"\naverage saving vs static: relax-and-round "
      f"{100 * metrics.mean_saving('dynamic'):.2f} %, optimum "
      f"{100 * metrics.mean_saving('exhaustive'):.2f} %")
