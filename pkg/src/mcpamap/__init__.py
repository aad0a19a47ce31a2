"""Dynamic mapping of radio carriers onto multi-carrier power amplifiers.

The package minimises total PA input power in a base station by choosing,
slot by slot, which amplifier carries which carrier:

* :mod:`mcpamap.powermodel` - PA input power as a function of output power;
* :mod:`mcpamap.problemcore` - instances, mappings, feasibility and cost;
* :mod:`mcpamap.relaxsolver` - relax-and-round mapping (:func:`dynamic_map`);
* :mod:`mcpamap.oracle` - exhaustive optimum for small instances;
* :mod:`mcpamap.simulation` - seeded Monte Carlo sweeps written as CSV;
* :mod:`mcpamap.cli` - the ``mcpamap`` command.
"""

from __future__ import annotations

from .errors import (
    ConfigParseError,
    ConfigurationError,
    DegenerateProblemError,
    DomainError,
    InfeasibleInstanceError,
    InfeasibleMappingError,
    MappingError,
    OverloadError,
    ResourceLimitError,
)
from .oracle import OracleResult, exhaustive_search
from .powermodel import (
    PRESETS,
    PowerModelParams,
    Variant,
    d2_input_power,
    d_input_power,
    input_power,
    preset,
    taylor_coeffs,
)
from .problemcore import (
    MappingInstance,
    MappingMatrix,
    is_feasible,
    partition_active,
    static_mapping,
    total_input_power,
)
from .relaxsolver import SolverOptions, dynamic_map
from .simulation import ExperimentConfig, ProfileKind, run_experiment

__version__ = "0.1.0"

__all__ = [
    "ConfigParseError", "ConfigurationError", "DegenerateProblemError", "DomainError",
    "InfeasibleInstanceError", "InfeasibleMappingError", "MappingError", "OverloadError",
    "ResourceLimitError", "OracleResult", "exhaustive_search", "PRESETS", "PowerModelParams",
    "Variant", "d2_input_power", "d_input_power", "input_power", "preset", "taylor_coeffs",
    "MappingInstance", "MappingMatrix", "is_feasible", "partition_active", "static_mapping",
    "total_input_power", "SolverOptions", "dynamic_map", "ExperimentConfig", "ProfileKind",
    "run_experiment",
]
