"""Follow the packet around one Kepler period through density slices.

Writes CSV grids to demo_out/ and prints where the density peaks.

Run:  python3 demos/04_orbit_snapshots.py
"""

import math
from pathlib import Path

from kss import InitConditions, Window, classical_period, density_slice, expand, expectation_r_t, fit_params
from kss.cli import slice_text

state = fit_params(InitConditions(n_bar=45, l3_target=30, delta_l3=2.5))
coeffs = expand(state, Window.symmetric(45, 30))
t_cl = classical_period(45)
out = Path("demo_out")
out.mkdir(exist_ok=True)

print(" t/T_cl   <r>(t)    peak r   peak azimuth/2pi")
for frac in (0, 1 / 6, 1 / 3, 1 / 2, 2 / 3, 5 / 6, 1):
    t = frac * t_cl
    grid = density_slice(coeffs, "XY", t=t)
    x, y = grid.argmax()
    az = (math.atan2(y, x) % (2 * math.pi)) / (2 * math.pi)
    print(f"{frac:7.3f} {expectation_r_t(coeffs, t):9.1f} {math.hypot(x, y):9.1f} {az:12.3f}")
    (out / f"xy_{frac:.3f}.csv").write_text(slice_text(grid, "csv"))

side = density_slice(coeffs, "XZ", t=0.0)
(out / "xz_0.000.csv").write_text(slice_text(side, "csv"))
print(f"\nXZ peak at t=0: {side.argmax()}")
print(f"grids written to {out}/")
# The packet moves slowly near the outer turning point, sweeps through the
# inner one around T/2 and is back near the start, somewhat spread, at T.
