"""Flat ``key = value`` run configuration files.

Example::

    # Experiment 1: six carriers on three MCPAs, K = 2
    name = exp1
    preset = exp1
    n_c = 6
    n_pa = 3
    capacity = 2
    p_grid = 0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9
    profiles = fixed,uniform,truncgauss

Blank lines and ``#`` comments are ignored. Model constants may be given
explicitly or taken from ``preset`` and selectively overridden.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import ConfigParseError, MappingError
from .powermodel import PowerModelParams, preset
from .relaxsolver import SolverOptions
from .simulation import ALGORITHMS, ExperimentConfig, ProfileKind

__all__ = ["RunConfig", "PARAM_KEYS", "parse_config", "load_config", "shipped_config"]

PARAM_KEYS = ("alpha", "beta", "gamma", "p_th", "p_max", "p_sta", "p_slp")
_DEFAULT_GRID = tuple(round(0.1 * i, 1) for i in range(1, 10))


def _floats(text):
    return tuple(float(v) for v in text.split(",") if v.strip())


def _words(text):
    return tuple(v.strip().lower() for v in text.split(",") if v.strip())


def _profiles(text):
    return tuple(ProfileKind(v).value for v in _words(text))


def _algorithms(text):
    words = _words(text)
    bad = [w for w in words if w not in ALGORITHMS]
    if bad:
        raise ValueError(f"unknown algorithm(s) {bad}")
    return words


# key -> (parser, RunConfig attribute)
_SCALARS = {
    "name": (str, "name"),
    "preset": (str, "preset"),
    "variant": (str, "variant"),
    "n_c": (int, "n_c"),
    "n_pa": (int, "n_pa"),
    "capacity": (int, "capacity"),
    "slots": (int, "slots"),
    "seed": (int, "seed"),
    "p_grid": (_floats, "p_grid"),
    "profiles": (_profiles, "profiles"),
    "algorithms": (_algorithms, "algorithms"),
    "out": (str, "out"),
    "gaussian_spread": (str, "gaussian_spread"),
    "midpoint": (str, "midpoint"),
    "tol": (float, "tol"),
    "max_iters": (int, "max_iters"),
    "restarts": (int, "restarts"),
    "solver_seed": (int, "solver_seed"),
}


@dataclass(frozen=True)
class RunConfig:
    """Parsed contents of a run configuration file."""

    n_c: int
    n_pa: int
    capacity: int
    name: str = "experiment"
    preset: str | None = None
    params: tuple[tuple[str, float], ...] = ()
    variant: str | None = None
    slots: int = 10_000
    seed: int = 0
    p_grid: tuple[float, ...] = _DEFAULT_GRID
    profiles: tuple[str, ...] = tuple(k.value for k in ProfileKind)
    algorithms: tuple[str, ...] = ALGORITHMS
    out: str | None = None
    gaussian_spread: str = "variance"
    midpoint: str = "literal"
    tol: float = 1e-8
    max_iters: int = 10_000
    restarts: int = 5
    solver_seed: int = 0
    source: str | None = field(default=None, compare=False)

    def model(self) -> PowerModelParams:
        """Preset constants with explicit values layered on top."""
        overrides = dict(self.params)
        if self.variant is not None:
            overrides["variant"] = self.variant
        if self.preset is not None:
            return preset(self.preset).replace(**overrides)
        missing = [k for k in PARAM_KEYS if k not in overrides]
        if missing:
            raise ConfigParseError(f"no preset given and model constants {missing} are missing")
        return PowerModelParams(**overrides)

    def to_experiment(self, **changes) -> ExperimentConfig:
        cfg = dataclasses.replace(self, **changes) if changes else self
        return ExperimentConfig(
            params=cfg.model(),
            n_c=cfg.n_c,
            n_pa=cfg.n_pa,
            capacity=cfg.capacity,
            slots=cfg.slots,
            p_grid=cfg.p_grid,
            profiles=cfg.profiles,
            algorithms=cfg.algorithms,
            seed=cfg.seed,
            name=cfg.name,
            gaussian_spread=cfg.gaussian_spread,
            solver=SolverOptions(
                tol=cfg.tol,
                max_iters=cfg.max_iters,
                restarts=cfg.restarts,
                seed=cfg.solver_seed,
                midpoint=cfg.midpoint,
            ),
        )

    def to_text(self) -> str:
        lines = [f"name = {self.name}"]
        if self.preset is not None:
            lines.append(f"preset = {self.preset}")
        lines += [f"{k} = {v!r}" for k, v in self.params]
        if self.variant is not None:
            lines.append(f"variant = {self.variant}")
        lines += [
            f"n_c = {self.n_c}",
            f"n_pa = {self.n_pa}",
            f"capacity = {self.capacity}",
            f"slots = {self.slots}",
            f"seed = {self.seed}",
            "p_grid = " + ",".join(repr(p) for p in self.p_grid),
            "profiles = " + ",".join(self.profiles),
            "algorithms = " + ",".join(self.algorithms),
        ]
        if self.out is not None:
            lines.append(f"out = {self.out}")
        lines += [
            f"gaussian_spread = {self.gaussian_spread}",
            f"midpoint = {self.midpoint}",
            f"tol = {self.tol!r}",
            f"max_iters = {self.max_iters}",
            f"restarts = {self.restarts}",
            f"solver_seed = {self.solver_seed}",
        ]
        return "\n".join(lines) + "\n"


def parse_config(text: str, source: str | None = None) -> RunConfig:
    """Parse configuration text.

    Raises:
        ConfigParseError: with the offending line number for syntax errors,
            unknown or duplicate keys and unparsable values.
    """
    values = {}
    params = []
    seen = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip().lower(), value.strip()
        if not sep or not key:
            raise ConfigParseError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        if key in seen:
            raise ConfigParseError(f"duplicate key {key!r} (first on line {seen[key]})", lineno)
        seen[key] = lineno
        if not value:
            raise ConfigParseError(f"empty value for {key!r}", lineno)
        try:
            if key in PARAM_KEYS:
                params.append((key, float(value)))
            elif key in _SCALARS:
                conv, attr = _SCALARS[key]
                values[attr] = conv(value)
            else:
                raise ConfigParseError(f"unknown key {key!r}", lineno)
        except ConfigParseError:
            raise
        except ValueError as exc:
            raise ConfigParseError(f"bad value for {key!r}: {exc}", lineno) from None

    for required in ("n_c", "n_pa", "capacity"):
        if required not in values:
            raise ConfigParseError(f"missing required key {required!r}")
    cfg = RunConfig(params=tuple(params), source=source, **values)
    try:
        cfg.to_experiment()
    except MappingError as exc:
        if isinstance(exc, ConfigParseError):
            raise
        raise ConfigParseError(f"inconsistent configuration: {exc}") from None
    except ValueError as exc:
        raise ConfigParseError(f"inconsistent configuration: {exc}") from None
    return cfg


def shipped_config(name: str) -> Path | None:
    """Path of a configuration bundled with the package (``exp1``, ``exp2``, ...)."""
    stem = name[:-4] if name.endswith(".cfg") else name
    path = resources.files("mcpamap") / "configs" / f"{stem}.cfg"
    return Path(str(path)) if path.is_file() else None


def load_config(path: str | Path) -> RunConfig:
    """Read a configuration file; bare names fall back to the shipped configs."""
    p = Path(path)
    if not p.is_file():
        shipped = shipped_config(str(path))
        if shipped is None:
            raise ConfigParseError(f"no such configuration file: {path}")
        p = shipped
    return parse_config(p.read_text(), source=str(p))
