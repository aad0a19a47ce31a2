"""Input-power model of a multi-carrier power amplifier (MCPA).

The Doherty variant has three regions in output power ``p``::

    f(p) = p_slp                               p == 0
         = p_sta + alpha * p                   0 < p <= p_th
         = p / (beta * 10 * log10(p) + gamma)  p_th < p <= p_max

The ClassAB variant drops the high-efficiency region and uses the linear
branch all the way up to ``p_max``. All powers are in watts.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DomainError

__all__ = [
    "Variant",
    "PowerModelParams",
    "QuadraticCoeffs",
    "PRESETS",
    "preset",
    "input_power",
    "d_input_power",
    "d2_input_power",
    "taylor_coeffs",
    "threshold_jump",
]

_LN10 = math.log(10.0)


def _efficiency(params, p):
    return params.beta * 10.0 * np.log10(p) + params.gamma


class Variant(str, enum.Enum):
    DOHERTY = "doherty"
    CLASS_AB = "classab"


@dataclass(frozen=True)
class PowerModelParams:
    """Constants of the MCPA input-power model.

    Attributes:
        alpha: slope of the linear region (W input per W output).
        beta: efficiency slope per dB of output power (Doherty region).
        gamma: efficiency bias (Doherty region).
        p_th: output power where the Doherty region starts [W].
        p_max: maximum output power [W].
        p_sta: static input power of an active amplifier [W].
        p_slp: input power of a sleeping amplifier [W].
        variant: which of the two model shapes to evaluate.
    """

    alpha: float
    beta: float
    gamma: float
    p_th: float
    p_max: float
    p_sta: float
    p_slp: float
    variant: Variant = Variant.DOHERTY

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        if not self.alpha > 0:
            raise ConfigurationError(f"alpha must be positive, got {self.alpha}")
        if not 0 < self.p_th < self.p_max:
            raise ConfigurationError(
                f"need 0 < p_th < p_max, got p_th={self.p_th}, p_max={self.p_max}"
            )
        if not self.p_sta > self.p_slp >= 0:
            raise ConfigurationError(
                f"need p_sta > p_slp >= 0, got p_sta={self.p_sta}, p_slp={self.p_slp}"
            )
        if self.variant is Variant.DOHERTY:
            # the efficiency term is monotone in p, so checking both ends covers (p_th, p_max]
            lo = _efficiency(self, self.p_th)
            hi = _efficiency(self, self.p_max)
            if lo < 0 or hi <= 0:
                raise ConfigurationError(
                    "beta*10*log10(p) + gamma must stay positive on (p_th, p_max]; "
                    f"got {lo:.6g} at p_th and {hi:.6g} at p_max"
                )

    def replace(self, **changes) -> PowerModelParams:
        fields = {name: getattr(self, name) for name in self.__dataclass_fields__}
        fields.update(changes)
        return PowerModelParams(**fields)


@dataclass(frozen=True)
class QuadraticCoeffs:
    """Second-order expansion of ``f`` around ``p_mid``."""

    p_mid: float
    f0: float
    f1: float
    f2: float

    def __call__(self, load):
        """Evaluate the quadratic surrogate at ``load`` (scalar or array)."""
        dx = np.asarray(load, dtype=float) - self.p_mid
        out = self.f0 + self.f1 * dx + 0.5 * self.f2 * dx * dx
        return float(out) if np.ndim(out) == 0 else out


PRESETS = {
    "exp1": PowerModelParams(
        alpha=2.7, beta=0.03, gamma=-0.06, p_th=5.0, p_max=40.0, p_sta=20.0, p_slp=13.0
    ),
    "exp2": PowerModelParams(
        alpha=2.7, beta=0.03, gamma=-0.06, p_th=5.0, p_max=60.0, p_sta=20.0, p_slp=13.0
    ),
    "exp3": PowerModelParams(
        alpha=2.7, beta=0.025, gamma=0.01, p_th=4.0, p_max=40.0, p_sta=14.0, p_slp=9.0
    ),
}


def preset(name: str) -> PowerModelParams:
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown preset {name!r}; choose from {sorted(PRESETS)}"
        ) from None


def input_power(params: PowerModelParams, p_out):
    """Input power drawn by one MCPA delivering ``p_out`` watts.

    Accepts a scalar or an array of output powers. Values outside
    ``[0, p_max]`` raise :class:`DomainError`; nothing is clamped.
    """
    if isinstance(p_out, (float, int)):
        return _input_power_scalar(params, float(p_out))
    p = np.asarray(p_out, dtype=float)
    if np.any(p < 0) or np.any(p > params.p_max) or np.any(np.isnan(p)):
        raise DomainError(f"output power must lie in [0, {params.p_max}] W, got {p_out}")

    linear = params.p_sta + params.alpha * p
    if params.variant is Variant.CLASS_AB:
        out = np.where(p == 0, params.p_slp, linear)
    else:
        safe = np.where(p > params.p_th, p, params.p_max)
        doherty = safe / _efficiency(params, safe)
        out = np.where(p == 0, params.p_slp, np.where(p <= params.p_th, linear, doherty))
    return float(out) if out.ndim == 0 else out


def _input_power_scalar(params, p):
    if not 0.0 <= p <= params.p_max:
        raise DomainError(f"output power must lie in [0, {params.p_max}] W, got {p}")
    if p == 0.0:
        return float(params.p_slp)
    if p <= params.p_th or params.variant is Variant.CLASS_AB:
        return params.p_sta + params.alpha * p
    return p / (params.beta * 10.0 * math.log10(p) + params.gamma)


def _check_doherty_interior(params, p):
    if params.variant is not Variant.DOHERTY:
        raise DomainError("derivatives are only defined for the Doherty variant")
    p = np.asarray(p, dtype=float)
    if np.any(p <= params.p_th) or np.any(p >= params.p_max):
        raise DomainError(
            f"derivatives need p_th < p_out < p_max ({params.p_th}, {params.p_max}), got {p}"
        )
    return p


def d_input_power(params: PowerModelParams, p_out):
    """First derivative of the Doherty branch, ``(g - c) / g**2``.

    Here ``g(p) = beta*10*log10(p) + gamma`` and ``c = 10*beta/ln(10)``.
    """
    p = _check_doherty_interior(params, p_out)
    c = 10.0 * params.beta / _LN10
    g = _efficiency(params, p)
    out = (g - c) / (g * g)
    return float(out) if np.ndim(out) == 0 else out


def d2_input_power(params: PowerModelParams, p_out):
    """Second derivative of the Doherty branch, ``(c/p) * (2c - g) / g**3``."""
    p = _check_doherty_interior(params, p_out)
    c = 10.0 * params.beta / _LN10
    g = _efficiency(params, p)
    out = (c / p) * (2.0 * c - g) / g**3
    return float(out) if np.ndim(out) == 0 else out


@functools.lru_cache(maxsize=64)
def taylor_coeffs(params: PowerModelParams, midpoint: str = "literal") -> QuadraticCoeffs:
    """Quadratic expansion coefficients of ``f`` used by the relaxed solver.

    Args:
        params: Doherty-variant model constants.
        midpoint: ``"literal"`` expands at ``(p_max - p_th) / 2``;
            ``"interval"`` expands at ``(p_max + p_th) / 2``, the centre of the
            Doherty region, for sensitivity studies.

    Raises:
        ConfigurationError: if the expansion point is not inside the Doherty
            region, or the model is not the Doherty variant.
    """
    if params.variant is not Variant.DOHERTY:
        raise ConfigurationError("the quadratic surrogate needs the Doherty variant")
    if midpoint == "literal":
        p_mid = (params.p_max - params.p_th) / 2.0
    elif midpoint == "interval":
        p_mid = (params.p_max + params.p_th) / 2.0
    else:
        raise ConfigurationError(f"midpoint must be 'literal' or 'interval', got {midpoint!r}")
    if not params.p_th < p_mid < params.p_max:
        raise ConfigurationError(
            f"expansion point {p_mid} W falls outside the Doherty region "
            f"({params.p_th}, {params.p_max})"
        )
    return QuadraticCoeffs(
        p_mid=p_mid,
        f0=input_power(params, p_mid),
        f1=d_input_power(params, p_mid),
        f2=d2_input_power(params, p_mid),
    )


def threshold_jump(params: PowerModelParams) -> float:
    """Signed gap ``f(p_th+) - f(p_th)`` between the Doherty and linear branches.

    The model is not continuous at ``p_th``; this reports by how much.
    Zero for the ClassAB variant.
    """
    if params.variant is Variant.CLASS_AB:
        return 0.0
    upper = params.p_th / _efficiency(params, params.p_th)
    return float(upper - (params.p_sta + params.alpha * params.p_th))
