"""How much input power does one MCPA draw?

The amplifier draws a fixed sleep power when idle, a linear "static" regime
at low output, and a Doherty regime above the threshold where efficiency
grows with output power in dB. This script prints the curve for the first
preset, its slope and curvature, and the quadratic surrogate that the
relax-and-round solver optimises.

Run:  python3 demos/01_power_model.py
"""

from __future__ import annotations

import numpy as np

from mcpamap.powermodel import (
    d2_input_power,
    d_input_power,
    input_power,
    preset,
    taylor_coeffs,
    threshold_jump,
)

params = preset("exp1")
print(f"model: {params}\n")

print(f"{'p_out W':>8} {'p_in W':>9} {'efficiency':>10}")
for p in (0.0, 1.0, 5.0, 5.0001, 10.0, 20.0, 30.0, 40.0):
    p_in = input_power(params, p)
    eff = p / p_in if p else 0.0
    print(f"{p:8.4f} {p_in:9.3f} {eff:10.3f}")
print(f"\nthe curve jumps by {threshold_jump(params):+.4f} W at the threshold p_th={params.p_th} W")

# Above the threshold the model is smooth; its curvature changes sign where
# the efficiency term equals twice 10*beta/ln(10) (about 11.7 W for this preset).
grid = np.linspace(6, 39, 12)
print(f"\n{'p_out W':>8} {'slope':>8} {'curvature':>11}")
for p in grid:
    print(f"{p:8.2f} {d_input_power(params, p):8.4f} {d2_input_power(params, p):11.6f}")

q = taylor_coeffs(params)
print(f"\nquadratic surrogate around p_mid={q.p_mid} W: "
      f"f0={q.f0:.4f}, f1={q.f1:.4f}, f2={q.f2:.6f}")
print(f"{'load W':>8} {'true W':>9} {'surrogate W':>12}")
for load in (10.0, 17.5, 25.0, 40.0):
    print(f"{load:8.1f} {input_power(params, load):9.3f} {q(load):12.3f}")
