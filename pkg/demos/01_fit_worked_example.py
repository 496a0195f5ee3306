"""Fit a Keplerian squeezed state for n = 45 with <L3> = 30 and Delta L3 = 2.5.

Run:  python3 demos/01_fit_worked_example.py
"""

from kss import InitConditions, fit_params, kss_energy, orbit_geometry
from kss.angular import sss_expectations
from kss.radial import rss_expectations

cond = InitConditions(n_bar=45, l3_target=30, delta_l3=2.5)
state = fit_params(cond)

print("fitted parameters")
for name, value in state.params().items():
    print(f"  {name:7s} {value:.6f}")

ang = sss_expectations(state.sss)
rad = rss_expectations(state.rss)
geo = orbit_geometry(cond.n_bar, ang.l_sq)

# The packet starts at the outer turning point of the matching ellipse
# with zero radial momentum and the energy of the n = 45 level.
print("\nobservables")
print(f"  <r>       {rad.r_mean:10.2f}   (r_out = {geo.r_out:.2f}, r_in = {geo.r_in:.2f})")
print(f"  <L^2>     {ang.l_sq:10.3f}   l_bar = {ang.l_bar:.3f}")
print(f"  Delta L3  {ang.delta_l3:10.4f}")
print(f"  <H>       {kss_energy(state):.6e}   target {-0.5 / 45**2:.6e}")
print(f"  Dr Dp_r   {rad.dr_dpr:10.6f}   (1/2 is the absolute minimum)")
print(f"  T_cl      {geo.t_cl:10.1f} a.u. = {geo.t_cl * 2.4188843265857e-5:.3f} ps")
