"""The exhaustive oracle and its symmetry pruning.

All MCPAs are identical, so relabelling them never changes the cost. The
oracle can therefore restrict itself to assignments in which PA j+1 is used
only after PA j has been used, one representative per relabelling class.
This script counts how many complete mappings each mode evaluates.

Run:  python3 demos/04_exhaustive_oracle.py
"""

from __future__ import annotations

import time

import numpy as np

from mcpamap.oracle import canonical_assignments, exhaustive_search
from mcpamap.powermodel import preset
from mcpamap.problemcore import MappingInstance

rng = np.random.default_rng(4)
for name, n_c, n_pa, k in (("exp1", 6, 3, 2), ("exp2", 9, 3, 3)):
    params = preset(name)
    powers = rng.uniform(0, params.p_max / k, n_c)
    instance = MappingInstance(tuple(powers), n_pa, k)
    print(f"{name}: {n_c} carriers, {n_pa} PAs, K={k}; raw space {n_pa}^{n_c} = {n_pa**n_c}")
    for prune in (False, True):
        start = time.perf_counter()
        res = exhaustive_search(instance, params, prune_symmetry=prune)
        ms = 1000 * (time.perf_counter() - start)
        print(f"  prune={prune!s:5}: {res.mappings_examined:6d} mappings, "
              f"best {res.best_cost:.4f} W, {ms:6.1f} ms")
    print(f"  canonical table used by the simulator: "
          f"{len(canonical_assignments(n_c, n_pa, k))} rows\n")
