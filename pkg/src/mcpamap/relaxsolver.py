"""Relax-and-round dynamic mapping.

Pipeline for one slot:

1. drop carriers with zero power and keep ``ceil(n_active / K)`` PAs awake;
2. replace the PA input-power curve by its quadratic expansion and relax the
   binary assignment to the transportation polytope
   ``{x in [0,1]: rows sum to 1, columns sum to at most K}``;
3. find a stationary point of the relaxed problem by conditional gradient;
4. round by repeatedly committing the largest remaining entry;
5. map back to the original indices and park idle carriers anywhere.

The expansion is concave for every shipped preset, so step 3 can only
promise a stationary point. Several seeded starts are tried and the one with
the lowest surrogate value is kept.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import DegenerateProblemError, InfeasibleInstanceError, OverloadError
from .powermodel import PowerModelParams, QuadraticCoeffs, input_power, taylor_coeffs
from .problemcore import ActivePartition, MappingInstance, MappingMatrix, partition_active

__all__ = [
    "SolverOptions",
    "ReducedProblem",
    "RelaxedSolution",
    "build_reduced",
    "surrogate_objective",
    "surrogate_gradient",
    "linear_minimizer",
    "solve_relaxed",
    "round_by_sorting",
    "dynamic_map",
]


@dataclass(frozen=True)
class SolverOptions:
    """Knobs of the relaxed solver.

    Attributes:
        tol: stop when the Frank-Wolfe gap falls below ``tol * max(1, |objective|)``.
        max_iters: iteration cap per start.
        restarts: number of starts; the first is the uniform point.
        seed: seed for the perturbed starts.
        perturbation: half-width of the uniform noise added to later starts.
        midpoint: expansion point rule passed to :func:`taylor_coeffs`.
    """

    tol: float = 1e-8
    max_iters: int = 10_000
    restarts: int = 5
    seed: int = 0
    perturbation: float = 0.1
    midpoint: str = "literal"

    def __post_init__(self):
        if self.tol <= 0 or self.max_iters < 1 or self.restarts < 1:
            raise ValueError("need tol > 0, max_iters >= 1 and restarts >= 1")


@dataclass(frozen=True, eq=False)
class ReducedProblem:
    """Active-only problem with re-indexed carriers and PAs."""

    powers_active: np.ndarray
    n_as: int
    capacity: int
    carrier_index_map: tuple[int, ...]
    pa_index_map: tuple[int, ...]
    surrogate: QuadraticCoeffs
    params: PowerModelParams

    @property
    def n_ac(self) -> int:
        return len(self.powers_active)


@dataclass(frozen=True, eq=False)
class RelaxedSolution:
    values: np.ndarray
    objective: float
    iterations: int
    converged: bool


def build_reduced(
    instance: MappingInstance,
    partition: ActivePartition,
    params: PowerModelParams,
    order: str = "index",
    midpoint: str = "literal",
) -> ReducedProblem:
    """Restrict the instance to its active carriers and the first ``n_as`` PAs.

    With ``order="power"`` the active carriers are re-indexed by decreasing
    power (ties by original index) instead of by original index. That makes
    the reduced problem identical for any permutation of the input carriers.

    Raises:
        DegenerateProblemError: no carrier is active; every PA can sleep.
    """
    if partition.n_ac == 0:
        raise DegenerateProblemError("no active carriers; all PAs sleep")
    active = list(partition.active_carriers)
    if order == "power":
        active.sort(key=lambda i: (-instance.powers[i], i))
    elif order != "index":
        raise ValueError(f"order must be 'index' or 'power', got {order!r}")
    powers = np.array([instance.powers[i] for i in active])
    powers.setflags(write=False)
    return ReducedProblem(
        powers_active=powers,
        n_as=partition.n_as,
        capacity=instance.capacity,
        carrier_index_map=tuple(active),
        pa_index_map=tuple(range(partition.n_as)),
        surrogate=taylor_coeffs(params, midpoint),
        params=params,
    )


def surrogate_objective(reduced: ReducedProblem, values) -> float:
    """Quadratic-expansion cost summed over the awake PAs.

    Equals ``n_as*f0 + sum_j [f1*(L_j - p_mid) + f2/2*(L_j - p_mid)**2]`` with
    ``L_j`` the relaxed load of PA ``j``. The expansion is used for every
    load, including loads in the linear region.
    """
    loads = reduced.powers_active @ np.asarray(values, dtype=float)
    return float(np.sum(reduced.surrogate(loads)))


def surrogate_gradient(reduced: ReducedProblem, values) -> np.ndarray:
    """``d objective / d x[i, j] = p_i * (f1 + f2 * (L_j - p_mid))``."""
    q = reduced.surrogate
    loads = reduced.powers_active @ np.asarray(values, dtype=float)
    return np.outer(reduced.powers_active, q.f1 + q.f2 * (loads - q.p_mid))


def linear_minimizer(costs, capacity: int) -> np.ndarray:
    """Exact minimiser of ``<costs, s>`` over the transportation polytope.

    The polytope has integral vertices, so the minimum is a 0/1 matrix: an
    assignment of rows to columns using each column at most ``capacity``
    times. It is found as a rectangular assignment problem with every column
    repeated ``capacity`` times.
    """
    costs = np.asarray(costs, dtype=float)
    n_rows, n_cols = costs.shape
    if n_rows > n_cols * capacity:
        raise InfeasibleInstanceError(
            f"{n_rows} rows cannot fit in {n_cols} columns of capacity {capacity}"
        )
    rows, slots = linear_sum_assignment(np.repeat(costs, capacity, axis=1))
    out = np.zeros_like(costs)
    out[rows, slots // capacity] = 1.0
    return out


def _perturbed_start(n_ac, n_as, half_width, rng):
    x = np.full((n_ac, n_as), 1.0 / n_as)
    noise = rng.uniform(-half_width, half_width, size=x.shape)
    # zero row and column sums, so row sums stay 1 and column sums stay n_ac/n_as
    noise -= noise.mean(axis=1, keepdims=True)
    noise -= noise.mean(axis=0, keepdims=True)
    peak = np.max(np.abs(noise))
    if peak > 0:
        noise *= min(1.0, (1.0 / n_as) / peak)
    return np.clip(x + noise, 0.0, 1.0)


def _frank_wolfe(reduced, x, options):
    p = reduced.powers_active
    q = reduced.surrogate
    k = reduced.capacity
    converged = False
    it = 0
    for it in range(1, options.max_iters + 1):
        loads = p @ x
        grad = np.outer(p, q.f1 + q.f2 * (loads - q.p_mid))
        s = linear_minimizer(grad, k)
        d = s - x
        gap = -float(np.sum(grad * d))
        if gap <= options.tol or gap <= options.tol * max(1.0, abs(float(np.sum(q(loads))))):
            converged = True
            break
        dl = p @ d
        curvature = q.f2 * float(dl @ dl)
        step = 1.0 if curvature <= 0 else min(1.0, gap / curvature)
        x = x + step * d
    return x, it, converged


def solve_relaxed(reduced: ReducedProblem, options: SolverOptions | None = None) -> RelaxedSolution:
    """Stationary point of the relaxed quadratic problem.

    Runs conditional gradient with exact line search from ``options.restarts``
    starts: the uniform point, then seeded feasible perturbations of it.
    Returns the start with the lowest surrogate value (earliest on ties).
    Hitting ``max_iters`` is not an error; ``converged`` is then False for
    the returned iterate.
    """
    options = options or SolverOptions()
    n_ac, n_as, k = reduced.n_ac, reduced.n_as, reduced.capacity
    if n_ac > n_as * k:
        raise InfeasibleInstanceError(f"{n_ac} carriers cannot fit on {n_as} PAs of capacity {k}")
    if n_as == 1:
        values = np.ones((n_ac, 1))
        return RelaxedSolution(values, surrogate_objective(reduced, values), 0, True)

    rng = np.random.default_rng(options.seed)
    best = None
    for r in range(options.restarts):
        if r == 0:
            x0 = np.full((n_ac, n_as), 1.0 / n_as)
        else:
            x0 = _perturbed_start(n_ac, n_as, options.perturbation, rng)
        x, iters, converged = _frank_wolfe(reduced, x0, options)
        obj = surrogate_objective(reduced, x)
        if best is None or obj < best.objective:
            best = RelaxedSolution(x, obj, iters, converged)
    return best


def _best_insertion(params, loads, counts, capacity, p, candidates):
    """PA among ``candidates`` whose true input power grows least when adding ``p``."""
    choice, choice_cost = None, np.inf
    for j in candidates:
        if counts[j] >= capacity or loads[j] + p > params.p_max:
            continue
        delta = input_power(params, loads[j] + p) - input_power(params, loads[j])
        if delta < choice_cost:
            choice, choice_cost = j, delta
    return choice


def round_by_sorting(reduced: ReducedProblem, relaxed: RelaxedSolution) -> MappingMatrix:
    """Turn a relaxed solution into a binary mapping of the reduced problem.

    Repeatedly takes the largest remaining entry (ties: lowest carrier, then
    lowest PA). If that PA still has room the carrier is committed there;
    otherwise the entry is zeroed. A carrier whose entries are all zeroed
    before it is committed goes to the PA with spare capacity whose true
    input power increases least.
    """
    vals = np.array(relaxed.values, dtype=float)
    n_ac, n_as = vals.shape
    k = reduced.capacity
    p = reduced.powers_active
    owner = np.full(n_ac, -1)
    counts = np.zeros(n_as, dtype=int)

    open_rows = np.ones(n_ac, dtype=bool)
    while open_rows.any():
        masked = np.where(open_rows[:, None], vals, -np.inf)
        flat = int(np.argmax(masked))
        i, j = divmod(flat, n_as)
        if not masked[i, j] > 0:
            break
        if counts[j] < k:
            owner[i] = j
            counts[j] += 1
            open_rows[i] = False
            vals[i] = 0.0
            vals[i, j] = 1.0
        else:
            vals[i, j] = 0.0

    loads = np.zeros(n_as)
    np.add.at(loads, owner[owner >= 0], p[owner >= 0])
    for i in np.flatnonzero(owner < 0):
        j = _best_insertion(reduced.params, loads, counts, k, p[i], range(n_as))
        if j is None:
            # every PA with room would exceed p_max; take the lightest, repaired later
            spare = [c for c in range(n_as) if counts[c] < k]
            j = min(spare, key=lambda c: (loads[c], c))
        owner[i] = j
        counts[j] += 1
        loads[j] += p[i]
    return MappingMatrix.from_assignment(owner, n_as)


def _best_swap(params, powers, owner, loads, j):
    """Cheapest exchange of a carrier on overloaded PA ``j`` for a lighter one elsewhere."""
    best, best_cost = None, np.inf
    for a in np.flatnonzero(owner == j):
        for b in np.flatnonzero((owner >= 0) & (owner != j)):
            diff = powers[a] - powers[b]
            t = owner[b]
            if diff <= 0 or loads[t] + diff > params.p_max:
                continue
            cost = input_power(params, float(loads[t] + diff)) - input_power(
                params, float(loads[t])
            )
            if cost < best_cost:
                best, best_cost = (int(a), int(b)), cost
    return best


def _repair_overload(powers, owner, n_pa, capacity, params):
    """Move (or, failing that, swap) carriers off PAs loaded beyond ``p_max``.

    Every step lowers the load of an overloaded PA without overloading another,
    so the loop terminates.
    """
    loads = np.zeros(n_pa)
    counts = np.zeros(n_pa, dtype=int)
    active = owner >= 0
    np.add.at(loads, owner[active], powers[active])
    np.add.at(counts, owner[active], 1)
    while True:
        over = np.flatnonzero(loads > params.p_max)
        if over.size == 0:
            return owner
        j = int(over[0])
        members = np.flatnonzero(owner == j)
        i = int(members[np.argmin(powers[members])])
        target = _best_insertion(
            params, loads, counts, capacity, powers[i], [c for c in range(n_pa) if c != j]
        )
        if target is not None:
            owner[i] = target
            loads[j] -= powers[i]
            counts[j] -= 1
            loads[target] += powers[i]
            counts[target] += 1
            continue
        swap = _best_swap(params, powers, owner, loads, j)
        if swap is None:
            raise OverloadError(
                f"PA {j} carries {loads[j]:.6g} W > p_max={params.p_max} W and no "
                "move or swap brings it back within limits"
            )
        a, b = swap
        t = owner[b]
        diff = powers[a] - powers[b]
        owner[a], owner[b] = t, j
        loads[j] -= diff
        loads[t] += diff


def dynamic_map(
    instance: MappingInstance, params: PowerModelParams, options: SolverOptions | None = None
) -> MappingMatrix:
    """Full relax-and-round mapping for one slot.

    Active carriers are placed by the relaxed solver and rounding; idle
    carriers are then spread round-robin over the remaining capacity, starting
    at the first sleeping PA. If rounding leaves a PA above ``p_max``, its
    smallest carrier is moved to the PA where it costs least (or exchanged
    with a lighter carrier when no PA has room) until no PA is overloaded.

    Raises:
        OverloadError: no move or swap removes the overload.
    """
    options = options or SolverOptions()
    part = partition_active(instance)
    powers = instance.power_array
    owner = np.full(instance.n_carriers, -1)

    if part.n_ac:
        reduced = build_reduced(instance, part, params, order="power", midpoint=options.midpoint)
        relaxed = solve_relaxed(reduced, options)
        rounded = round_by_sorting(reduced, relaxed).assignment
        for i_red, j_red in enumerate(rounded):
            owner[reduced.carrier_index_map[i_red]] = reduced.pa_index_map[j_red]
        owner = _repair_overload(powers, owner, instance.n_pa, instance.capacity, params)

    counts = np.bincount(owner[owner >= 0], minlength=instance.n_pa)
    cursor = part.n_as % instance.n_pa
    for i in part.inactive_carriers:
        while counts[cursor] >= instance.capacity:
            cursor = (cursor + 1) % instance.n_pa
        owner[i] = cursor
        counts[cursor] += 1
        cursor = (cursor + 1) % instance.n_pa
    return MappingMatrix.from_assignment(owner, instance.n_pa)
