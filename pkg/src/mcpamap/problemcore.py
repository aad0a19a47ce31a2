"""One slot of the carrier-to-MCPA mapping problem.

A slot is described by per-carrier output powers, the number of amplifiers
and the per-amplifier carrier capacity ``K``. A mapping is a binary
``n_carriers x n_pa`` matrix; the objective is the summed input power of all
amplifiers, sleeping ones included.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import InfeasibleInstanceError, InfeasibleMappingError, OverloadError
from .powermodel import PowerModelParams, input_power

__all__ = [
    "MappingInstance",
    "MappingMatrix",
    "ActivePartition",
    "FeasibilityReport",
    "Violation",
    "pa_loads",
    "total_input_power",
    "is_feasible",
    "partition_active",
    "static_mapping",
]


def _fmt_watts(x: float) -> str:
    short = f"{x:g}"
    return short if float(short) == x else repr(float(x))


@dataclass(frozen=True)
class MappingInstance:
    """Per-carrier output powers plus amplifier count and capacity."""

    powers: tuple[float, ...]
    n_pa: int
    capacity: int

    def __post_init__(self):
        powers = tuple(float(p) for p in np.ravel(self.powers))
        object.__setattr__(self, "powers", powers)
        if self.n_pa < 1 or self.capacity < 1:
            raise InfeasibleInstanceError(
                f"need n_pa >= 1 and capacity >= 1, got {self.n_pa} and {self.capacity}"
            )
        if any(not p >= 0 for p in powers):
            raise InfeasibleInstanceError(f"carrier powers must be >= 0, got {powers}")
        if len(powers) > self.n_pa * self.capacity:
            raise InfeasibleInstanceError(
                f"{len(powers)} carriers cannot fit on {self.n_pa} PAs "
                f"of capacity {self.capacity}"
            )

    @property
    def n_carriers(self) -> int:
        return len(self.powers)

    @property
    def power_array(self) -> np.ndarray:
        return np.asarray(self.powers, dtype=float)

    def to_record(self) -> str:
        """Serialise as ``n_pa=<int> k=<int> powers=<w1,w2,...>``."""
        powers = ",".join(_fmt_watts(p) for p in self.powers)
        return f"n_pa={self.n_pa} k={self.capacity} powers={powers}"

    @classmethod
    def from_record(cls, record: str) -> MappingInstance:
        """Parse the one-line text form produced by :meth:`to_record`.

        Keys may appear in any order; ``k`` may also be written ``capacity``.
        """
        fields = {}
        for token in record.split():
            key, sep, value = token.partition("=")
            if not sep or not value:
                raise ValueError(f"malformed token {token!r} in instance record")
            key = key.strip().lower()
            if key == "capacity":
                key = "k"
            if key in fields:
                raise ValueError(f"duplicate key {key!r} in instance record")
            fields[key] = value
        missing = {"n_pa", "k", "powers"} - fields.keys()
        if missing:
            raise ValueError(f"instance record is missing {sorted(missing)}")
        extra = fields.keys() - {"n_pa", "k", "powers"}
        if extra:
            raise ValueError(f"unknown keys {sorted(extra)} in instance record")
        try:
            n_pa = int(fields["n_pa"])
            k = int(fields["k"])
            powers = tuple(float(v) for v in re.split(r",", fields["powers"]) if v != "")
        except ValueError as exc:
            raise ValueError(f"bad number in instance record: {exc}") from None
        return cls(powers=powers, n_pa=n_pa, capacity=k)


@dataclass(frozen=True, eq=False)
class MappingMatrix:
    """Binary carrier-to-PA assignment ``assign[i, j]``.

    The matrix is stored as given so that invalid mappings can be inspected
    by :func:`is_feasible`; nothing is validated at construction.
    """

    assign: np.ndarray

    def __post_init__(self):
        a = np.array(self.assign, dtype=np.int64, copy=True)
        if a.ndim != 2:
            raise ValueError(f"assignment table must be 2-D, got shape {a.shape}")
        a.setflags(write=False)
        object.__setattr__(self, "assign", a)

    @classmethod
    def from_assignment(cls, pa_of_carrier, n_pa: int) -> MappingMatrix:
        """Build from a vector giving the (0-based) PA of each carrier."""
        idx = np.asarray(pa_of_carrier, dtype=np.int64)
        a = np.zeros((idx.size, n_pa), dtype=np.int64)
        a[np.arange(idx.size), idx] = 1
        return cls(a)

    @property
    def shape(self) -> tuple[int, int]:
        return self.assign.shape

    @property
    def assignment(self) -> np.ndarray:
        """0-based PA index per carrier. Only meaningful for feasible mappings."""
        return np.argmax(self.assign, axis=1)

    def __eq__(self, other):
        if not isinstance(other, MappingMatrix):
            return NotImplemented
        return self.assign.shape == other.assign.shape and bool(
            np.array_equal(self.assign, other.assign)
        )

    def __hash__(self):
        return hash((self.assign.shape, self.assign.tobytes()))

    def __repr__(self):
        return f"MappingMatrix(assignment={self.assignment.tolist()}, n_pa={self.shape[1]})"


@dataclass(frozen=True)
class Violation:
    constraint: str  # "binary", "capacity" or "single_pa"
    index: int | tuple[int, int]
    detail: str = ""


@dataclass(frozen=True)
class FeasibilityReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok


@dataclass(frozen=True)
class ActivePartition:
    """Split of carriers by positive power and the number of PAs kept awake."""

    active_carriers: tuple[int, ...]
    inactive_carriers: tuple[int, ...]
    n_as: int
    capacity: int = field(repr=False, default=1)

    @property
    def n_ac(self) -> int:
        return len(self.active_carriers)


def is_feasible(instance: MappingInstance, mapping: MappingMatrix) -> FeasibilityReport:
    """Check the binary, per-PA capacity and one-PA-per-carrier constraints.

    Returns a report that is truthy when every constraint holds; otherwise
    ``report.violations`` lists each violated (constraint, index).

    Raises:
        ValueError: if the mapping dimensions do not match the instance.
    """
    expected = (instance.n_carriers, instance.n_pa)
    if mapping.shape != expected:
        raise ValueError(f"mapping has shape {mapping.shape}, instance needs {expected}")
    a = mapping.assign
    violations = []
    for i, j in zip(*np.nonzero((a != 0) & (a != 1))):
        violations.append(Violation("binary", (int(i), int(j)), f"value {a[i, j]}"))
    col = a.sum(axis=0)
    for j in np.flatnonzero(col > instance.capacity):
        violations.append(
            Violation("capacity", int(j), f"{col[j]} carriers > K={instance.capacity}")
        )
    row = a.sum(axis=1)
    for i in np.flatnonzero(row != 1):
        violations.append(Violation("single_pa", int(i), f"row sum {row[i]}"))
    return FeasibilityReport(tuple(violations))


def pa_loads(instance: MappingInstance, mapping: MappingMatrix) -> list[float]:
    """Output power of every PA, summed in carrier index order."""
    loads = [0.0] * instance.n_pa
    for i, j in zip(*np.nonzero(mapping.assign)):
        loads[j] += instance.powers[i] * mapping.assign[i, j]
    return loads


def total_input_power(
    instance: MappingInstance, mapping: MappingMatrix, params: PowerModelParams
) -> float:
    """Summed input power of all PAs under ``mapping``.

    Sleeping PAs contribute ``p_slp``. The per-PA terms are added with
    :func:`math.fsum` so the total does not depend on PA order.

    Raises:
        InfeasibleMappingError: the mapping violates a constraint.
        OverloadError: some PA load exceeds ``p_max``.
    """
    report = is_feasible(instance, mapping)
    if not report:
        raise InfeasibleMappingError(
            f"mapping violates {len(report.violations)} constraint(s)", report.violations
        )
    loads = pa_loads(instance, mapping)
    over = [j for j, load in enumerate(loads) if load > params.p_max]
    if over:
        raise OverloadError(
            f"PA(s) {over} carry {[loads[j] for j in over]} W > p_max={params.p_max} W"
        )
    return math.fsum(input_power(params, load) for load in loads)


def partition_active(instance: MappingInstance) -> ActivePartition:
    """Active carriers are those with strictly positive power; no tolerance."""
    active = tuple(i for i, p in enumerate(instance.powers) if p > 0)
    inactive = tuple(i for i, p in enumerate(instance.powers) if not p > 0)
    n_as = -(-len(active) // instance.capacity)
    return ActivePartition(active, inactive, n_as, instance.capacity)


def static_mapping(instance: MappingInstance) -> MappingMatrix:
    """Fixed block mapping: carrier ``i`` (0-based) goes to PA ``i // K``."""
    pa = np.arange(instance.n_carriers) // instance.capacity
    return MappingMatrix.from_assignment(pa, instance.n_pa)
