"""Expand the fitted packet in hydrogen eigenstates and compare truncation windows.

Run:  python3 demos/03_expansion_windows.py
"""

import time

from kss import InitConditions, Window, expand, fit_params, kss_energy

state = fit_params(InitConditions(n_bar=45, l3_target=30, delta_l3=2.5))
print(f"closed-form <H> = {kss_energy(state):.8e}\n")

windows = {
    "n,l +-5, m in beta-3..beta": Window.narrow(45, 30),
    "n,l,m +-5": Window.symmetric(45, 30, 5, 5, 5),
    "n,l,m +-10": Window.symmetric(45, 30),
}
print(f"{'window':28s} {'entries':>8s} {'parity 0':>9s} {'captured':>9s} {'<m>':>8s} {'sum|c|^2 E':>14s} {'time':>6s}")
for label, w in windows.items():
    t0 = time.perf_counter()
    tab = expand(state, w)
    dt = time.perf_counter() - t0
    print(f"{label:28s} {tab.size:8d} {tab.parity_zeros:9d} {tab.captured_norm:9.5f} "
          f"{tab.mean_m():8.3f} {tab.mean_energy():14.8e} {dt:5.2f}s")

# The angular weight is spread over m with standard deviation Delta L3 = 2.5,
# so four m values on one side of beta hold only about half of the norm.
