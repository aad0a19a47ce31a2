"""Exhaustive search for the globally optimal mapping.

Carriers are placed in index order by depth-first search. A branch is cut as
soon as a PA exceeds its capacity or its output power exceeds ``p_max``.
With ``prune_symmetry`` a carrier may only open the lowest-numbered empty PA,
so each partition of the carriers is visited once instead of once per PA
relabelling. Because every PA obeys the same power model, this loses nothing.

Among equally cheap mappings the lexicographically smallest assignment
vector wins, in both modes.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleInstanceError, ResourceLimitError
from .powermodel import PowerModelParams, input_power
from .problemcore import MappingInstance, MappingMatrix, total_input_power

__all__ = [
    "OracleResult",
    "MAX_ENUMERATION",
    "exhaustive_search",
    "canonical_assignments",
    "batch_optimal_cost",
]

MAX_ENUMERATION = 10**8


@dataclass(frozen=True)
class OracleResult:
    best_mapping: MappingMatrix
    best_cost: float
    mappings_examined: int


def exhaustive_search(
    instance: MappingInstance,
    params: PowerModelParams,
    prune_symmetry: bool = False,
    max_enumeration: int = MAX_ENUMERATION,
) -> OracleResult:
    """Minimum-power mapping over every feasible assignment.

    Args:
        instance: the slot to solve.
        params: PA power model.
        prune_symmetry: visit one representative per PA relabelling.
        max_enumeration: without pruning, refuse instances whose raw space
            ``n_pa ** n_carriers`` is larger than this.

    Returns:
        An :class:`OracleResult`; ``mappings_examined`` counts complete
        feasible assignments whose cost was evaluated.

    Raises:
        ResourceLimitError: raw space too large and pruning disabled.
        InfeasibleInstanceError: no assignment keeps every PA load within
            ``p_max``.
    """
    n_c, n_pa, k = instance.n_carriers, instance.n_pa, instance.capacity
    if not prune_symmetry and n_pa**n_c > max_enumeration:
        raise ResourceLimitError(
            f"{n_pa}^{n_c} = {n_pa**n_c} mappings exceed the limit of {max_enumeration}; "
            "enable symmetry pruning"
        )

    powers = instance.powers
    p_max = params.p_max
    loads = [0.0] * n_pa
    counts = [0] * n_pa
    current = [0] * n_c
    best_cost = math.inf
    best = None
    examined = 0

    def visit(i, used):
        nonlocal best_cost, best, examined
        if i == n_c:
            examined += 1
            cost = math.fsum(input_power(params, load) for load in loads)
            if cost < best_cost:
                best_cost = cost
                best = list(current)
            return
        top = min(used + 1, n_pa) if prune_symmetry else n_pa
        p = powers[i]
        for j in range(top):
            if counts[j] == k:
                continue
            new_load = loads[j] + p
            if new_load > p_max:
                continue
            prev = loads[j]
            loads[j] = new_load
            counts[j] += 1
            current[i] = j
            visit(i + 1, max(used, j + 1))
            loads[j] = prev
            counts[j] -= 1

    visit(0, 0)
    if best is None:
        raise InfeasibleInstanceError(
            f"no mapping keeps every PA load within p_max={p_max} W for {instance.to_record()}"
        )
    mapping = MappingMatrix.from_assignment(best, n_pa)
    return OracleResult(mapping, total_input_power(instance, mapping, params), examined)


@functools.lru_cache(maxsize=32)
def canonical_assignments(n_carriers: int, n_pa: int, capacity: int) -> np.ndarray:
    """All capacity-respecting assignments with PAs opened in first-use order.

    Rows are sorted lexicographically. Each row is the smallest member of its
    PA-relabelling class, so together they cover every partition of the
    carriers into at most ``n_pa`` groups of at most ``capacity``.
    """
    rows = []
    current = [0] * n_carriers
    counts = [0] * n_pa

    def visit(i, used):
        if i == n_carriers:
            rows.append(tuple(current))
            return
        for j in range(min(used + 1, n_pa)):
            if counts[j] < capacity:
                counts[j] += 1
                current[i] = j
                visit(i + 1, max(used, j + 1))
                counts[j] -= 1

    visit(0, 0)
    out = np.array(rows, dtype=np.int64).reshape(len(rows), n_carriers)
    out.setflags(write=False)
    return out


@functools.lru_cache(maxsize=32)
def _incidence(n_carriers, n_pa, capacity):
    table = canonical_assignments(n_carriers, n_pa, capacity)
    onehot = np.zeros((len(table), n_pa, n_carriers))
    rows = np.arange(len(table))[:, None]
    onehot[rows, table, np.arange(n_carriers)[None, :]] = 1.0
    return onehot


def batch_optimal_cost(
    powers: np.ndarray, n_pa: int, capacity: int, params: PowerModelParams, chunk: int = 4096
) -> np.ndarray:
    """Optimal total input power for many slots at once.

    Vectorised counterpart of :func:`exhaustive_search` used by the Monte
    Carlo harness. ``powers`` has shape ``(n_slots, n_carriers)``; returns
    an array of ``n_slots`` costs, ``inf`` where no mapping fits ``p_max``.
    """
    powers = np.atleast_2d(np.asarray(powers, dtype=float))
    n_slots, n_c = powers.shape
    if n_c > n_pa * capacity:
        raise InfeasibleInstanceError(
            f"{n_c} carriers cannot fit on {n_pa} PAs of capacity {capacity}"
        )
    onehot = _incidence(n_c, n_pa, capacity)
    per_chunk = max(1, chunk * 64 // max(1, onehot.shape[0]))
    out = np.empty(n_slots)
    for start in range(0, n_slots, per_chunk):
        block = powers[start : start + per_chunk]
        loads = np.einsum("mjn,tn->tmj", onehot, block)
        over = loads > params.p_max
        cost = input_power(params, np.where(over, 0.0, loads))
        cost = np.where(over.any(axis=2), np.inf, cost.sum(axis=2))
        out[start : start + per_chunk] = cost.min(axis=1)
    return out
