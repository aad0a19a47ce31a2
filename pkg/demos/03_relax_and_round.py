"""Inside the relax-and-round solver, step by step.

1. Split carriers into active (positive power) and idle ones; only
   ceil(active / K) amplifiers need to stay awake.
2. Replace each PA's input power by a quadratic around the middle of the
   Doherty region and minimise it over the relaxed mapping polytope
   (fractional assignments, rows summing to one, columns at most K).
3. Round: repeatedly commit the largest fractional entry whose PA still has
   room.
4. Put idle carriers wherever capacity remains.

Run:  python3 demos/03_relax_and_round.py
"""

from __future__ import annotations

import numpy as np

from mcpamap.oracle import exhaustive_search
from mcpamap.powermodel import preset
from mcpamap.problemcore import MappingInstance, partition_active, total_input_power
from mcpamap.relaxsolver import build_reduced, dynamic_map, round_by_sorting, solve_relaxed

np.set_printoptions(precision=3, suppress=True)
params = preset("exp1")
instance = MappingInstance((14.0, 0.0, 3.0, 0.0, 17.0, 6.0), n_pa=3, capacity=2)
print(f"instance: {instance.to_record()}")

part = partition_active(instance)
print(f"active carriers {part.active_carriers}, idle {part.inactive_carriers}; "
      f"{part.n_as} of {instance.n_pa} PAs stay awake")

reduced = build_reduced(instance, part, params, order="power")
print(f"reduced problem rows follow carriers {reduced.carrier_index_map}")

relaxed = solve_relaxed(reduced)
print(f"\nrelaxed optimum after {relaxed.iterations} iterations "
      f"(surrogate {relaxed.objective:.3f} W):\n{relaxed.values}")

rounded = round_by_sorting(reduced, relaxed)
print(f"\nrounded:\n{rounded.assign}")

mapping = dynamic_map(instance, params)
best = exhaustive_search(instance, params, prune_symmetry=True)
print(f"\nfull mapping, 1-based PA per carrier: {[int(j) + 1 for j in mapping.assignment]}")
print(f"relax-and-round {total_input_power(instance, mapping, params):.3f} W, "
      f"optimum {best.best_cost:.3f} W")
