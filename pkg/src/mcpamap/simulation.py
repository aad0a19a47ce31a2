"""Seeded Monte Carlo comparison of static, relax-and-round and optimal mapping.

Every slot draws one power vector, and every requested algorithm is scored on
that same vector. Slot ``s`` always draws from a generator seeded with
``(seed, s)``, so a run with more slots extends, rather than reshuffles, a run
with fewer. Results are averaged per (profile, non-active probability,
algorithm) cell.
"""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError
from .oracle import batch_optimal_cost, canonical_assignments
from .powermodel import PowerModelParams, input_power
from .problemcore import MappingInstance, total_input_power
from .relaxsolver import SolverOptions, dynamic_map

__all__ = [
    "ProfileKind",
    "ProfileSpec",
    "ExperimentConfig",
    "CellResult",
    "AggregateMetrics",
    "ALGORITHMS",
    "CSV_COLUMNS",
    "sample_slot_powers",
    "slot_rng",
    "evaluate_slots",
    "run_experiment",
]

ALGORITHMS = ("static", "dynamic", "exhaustive")
CSV_COLUMNS = (
    "experiment",
    "profile",
    "p_nonactive",
    "algorithm",
    "mean_power_w",
    "stderr_w",
    "saving_vs_static",
    "fraction_of_optimal_gain",
    "slots",
    "seed",
)
MAX_CANONICAL_MAPPINGS = 200_000


class ProfileKind(str, enum.Enum):
    FIXED = "fixed"
    UNIFORM = "uniform"
    TRUNC_GAUSSIAN = "truncgauss"


@dataclass(frozen=True)
class ProfileSpec:
    """How active carriers draw their output power in one cell.

    ``fixed`` uses ``p_max / (2K)``; ``uniform`` draws from ``(0, p_max/K]``;
    ``truncgauss`` draws from a normal with mean ``p_max / (2K)`` truncated to
    ``(0, p_max/K]``. Its spread parameter ``p_max / (4K)`` is read as the
    variance by default, or as the standard deviation with
    ``gaussian_spread="stddev"``.
    """

    kind: ProfileKind
    p_nonactive: float
    p_max: float
    capacity: int
    gaussian_spread: str = "variance"

    def __post_init__(self):
        object.__setattr__(self, "kind", ProfileKind(self.kind))
        if not 0.0 <= self.p_nonactive <= 1.0:
            raise ConfigurationError(f"p_nonactive must be in [0, 1], got {self.p_nonactive}")
        if self.gaussian_spread not in ("variance", "stddev"):
            raise ConfigurationError(
                f"gaussian_spread must be 'variance' or 'stddev', got {self.gaussian_spread!r}"
            )

    @property
    def upper(self) -> float:
        return self.p_max / self.capacity

    @property
    def mean(self) -> float:
        return self.p_max / (2 * self.capacity)

    @property
    def sigma(self) -> float:
        spread = self.p_max / (4 * self.capacity)
        return math.sqrt(spread) if self.gaussian_spread == "variance" else spread


def slot_rng(seed: int, slot: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), int(slot)])


def sample_slot_powers(spec: ProfileSpec, n_c: int, rng: np.random.Generator) -> np.ndarray:
    """Output powers of ``n_c`` carriers for one slot.

    Each carrier is idle (exactly 0 W) with probability ``spec.p_nonactive``;
    otherwise it draws from the profile. Drawn values always lie in
    ``(0, p_max/K]``, so activity is decided by the idle draw alone.
    """
    out = np.zeros(n_c)
    active = rng.random(n_c) >= spec.p_nonactive
    n_act = int(active.sum())
    if n_act == 0:
        return out
    hi = spec.upper
    if spec.kind is ProfileKind.FIXED:
        values = np.full(n_act, spec.mean)
    elif spec.kind is ProfileKind.UNIFORM:
        values = rng.uniform(0.0, hi, n_act)
        zero = values == 0.0
        while zero.any():
            values[zero] = rng.uniform(0.0, hi, int(zero.sum()))
            zero = values == 0.0
    else:
        values = np.empty(n_act)
        filled = 0
        while filled < n_act:
            draw = rng.normal(spec.mean, spec.sigma, n_act - filled)
            keep = draw[(draw > 0.0) & (draw <= hi)]
            values[filled : filled + keep.size] = keep
            filled += keep.size
    out[active] = values
    return out


@dataclass(frozen=True)
class ExperimentConfig:
    """One Monte Carlo sweep over non-active probabilities and profiles."""

    params: PowerModelParams
    n_c: int
    n_pa: int
    capacity: int
    slots: int = 10_000
    p_grid: tuple[float, ...] = tuple(round(0.1 * i, 1) for i in range(1, 10))
    profiles: tuple[ProfileKind, ...] = tuple(ProfileKind)
    algorithms: tuple[str, ...] = ALGORITHMS
    seed: int = 0
    name: str = "experiment"
    gaussian_spread: str = "variance"
    solver: SolverOptions = field(default_factory=SolverOptions)

    def __post_init__(self):
        object.__setattr__(self, "p_grid", tuple(float(p) for p in self.p_grid))
        object.__setattr__(self, "profiles", tuple(ProfileKind(k) for k in self.profiles))
        object.__setattr__(self, "algorithms", tuple(self.algorithms))
        if self.slots < 1:
            raise ConfigurationError(f"slots must be >= 1, got {self.slots}")
        if any(not 0.0 <= p <= 1.0 for p in self.p_grid):
            raise ConfigurationError(f"p_grid values must be in [0, 1], got {self.p_grid}")
        if self.n_pa < 1 or self.capacity < 1 or self.n_c < 0:
            raise ConfigurationError("need n_pa >= 1, capacity >= 1 and n_c >= 0")
        if self.n_c > self.n_pa * self.capacity:
            raise ConfigurationError(
                f"{self.n_c} carriers cannot fit on {self.n_pa} PAs of capacity {self.capacity}"
            )
        unknown = set(self.algorithms) - set(ALGORITHMS)
        if unknown or not self.algorithms:
            raise ConfigurationError(f"algorithms must be a non-empty subset of {ALGORITHMS}")
        if not self.profiles:
            raise ConfigurationError("at least one profile is required")
        if not 0 <= self.seed < 2**64:
            raise ConfigurationError(f"seed must be a 64-bit unsigned integer, got {self.seed}")

    def profile_spec(self, kind, p_nonactive) -> ProfileSpec:
        return ProfileSpec(
            kind, p_nonactive, self.params.p_max, self.capacity, self.gaussian_spread
        )


@dataclass(frozen=True)
class CellResult:
    profile: str
    p_nonactive: float
    algorithm: str
    mean_power: float
    stderr: float
    saving_vs_static: float
    fraction_of_optimal_gain: float


@dataclass
class AggregateMetrics:
    """Per-cell means plus, on request, the per-slot costs behind them."""

    config: ExperimentConfig
    cells: list[CellResult]
    slot_costs: dict | None = None

    def cell(self, profile, p_nonactive, algorithm) -> CellResult:
        profile = ProfileKind(profile).value
        for c in self.cells:
            if c.profile == profile and c.algorithm == algorithm and math.isclose(
                c.p_nonactive, p_nonactive
            ):
                return c
        raise KeyError((profile, p_nonactive, algorithm))

    def mean_saving(self, algorithm: str) -> float:
        """Saving versus static averaged over every (profile, p) cell."""
        return float(np.mean([c.saving_vs_static for c in self.cells if c.algorithm == algorithm]))

    def to_csv(self, stream=None) -> str:
        """Write one row per cell; floats use 6 significant digits.

        Returns the CSV text, and also writes it to ``stream`` if given.
        """
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for c in self.cells:
            writer.writerow(
                [
                    self.config.name,
                    c.profile,
                    _g6(c.p_nonactive),
                    c.algorithm,
                    _g6(c.mean_power),
                    _g6(c.stderr),
                    _g6(c.saving_vs_static),
                    _g6(c.fraction_of_optimal_gain),
                    self.config.slots,
                    self.config.seed,
                ]
            )
        text = buf.getvalue()
        if stream is not None:
            stream.write(text)
        return text


def _g6(x: float) -> str:
    return "nan" if math.isnan(x) else f"{x:.6g}"


def _static_costs(powers, n_pa, capacity, params):
    n_slots, n_c = powers.shape
    loads = np.zeros((n_slots, n_pa))
    for i in range(n_c):
        loads[:, i // capacity] += powers[:, i]
    return input_power(params, loads).sum(axis=1)


def _dynamic_costs(powers, n_pa, capacity, params, options):
    out = np.empty(len(powers))
    for s, row in enumerate(powers):
        inst = MappingInstance(tuple(row), n_pa, capacity)
        out[s] = total_input_power(inst, dynamic_map(inst, params, options), params)
    return out


def evaluate_slots(
    powers,
    n_pa: int,
    capacity: int,
    params: PowerModelParams,
    algorithms=ALGORITHMS,
    options: SolverOptions | None = None,
) -> dict[str, np.ndarray]:
    """Total input power of every slot under each algorithm.

    ``powers`` has one row per slot. Static and optimal costs are computed
    for all slots at once; relax-and-round runs slot by slot.
    """
    powers = np.atleast_2d(np.asarray(powers, dtype=float))
    n_c = powers.shape[1]
    out = {}
    for algo in algorithms:
        if algo == "static":
            out[algo] = _static_costs(powers, n_pa, capacity, params)
        elif algo == "exhaustive":
            size = len(canonical_assignments(n_c, n_pa, capacity))
            if size > MAX_CANONICAL_MAPPINGS:
                raise ConfigurationError(
                    f"{size} distinct mappings is too many for exhaustive search per slot"
                )
            out[algo] = batch_optimal_cost(powers, n_pa, capacity, params)
        elif algo == "dynamic":
            out[algo] = _dynamic_costs(powers, n_pa, capacity, params, options or SolverOptions())
        else:
            raise ConfigurationError(f"unknown algorithm {algo!r}")
    return out


def _cell_results(profile, p, costs, algorithms):
    means = {a: float(np.mean(costs[a])) for a in algorithms}
    n = len(next(iter(costs.values())))
    static = means.get("static")
    best = means.get("exhaustive")
    gain = static - best if static is not None and best is not None else math.nan
    # differences at rounding level count as no gain
    if not gain > 1e-9 * abs(static if static is not None else 1.0):
        gain = math.nan
    rows = []
    for a in algorithms:
        stderr = float(np.std(costs[a], ddof=1) / math.sqrt(n)) if n > 1 else 0.0
        saving = (static - means[a]) / static if static is not None else math.nan
        fraction = (static - means[a]) / gain if not math.isnan(gain) else math.nan
        rows.append(CellResult(profile, p, a, means[a], stderr, saving, fraction))
    return rows


def run_experiment(config: ExperimentConfig, keep_slot_costs: bool = False) -> AggregateMetrics:
    """Run every (profile, p) cell of ``config`` and aggregate per algorithm.

    Args:
        config: sweep definition.
        keep_slot_costs: also return the per-slot cost arrays, keyed by
            ``(profile, p_nonactive)``, for paired per-slot checks.
    """
    cells = []
    slot_costs = {} if keep_slot_costs else None
    for kind in config.profiles:
        for p in config.p_grid:
            spec = config.profile_spec(kind, p)
            powers = np.array(
                [
                    sample_slot_powers(spec, config.n_c, slot_rng(config.seed, s))
                    for s in range(config.slots)
                ]
            ).reshape(config.slots, config.n_c)
            costs = evaluate_slots(
                powers, config.n_pa, config.capacity, config.params,
                config.algorithms, config.solver,
            )
            cells.extend(_cell_results(kind.value, p, costs, config.algorithms))
            if slot_costs is not None:
                slot_costs[(kind.value, p)] = costs
    return AggregateMetrics(config, cells, slot_costs)
