"""Rydberg packet in an alkali-like atom: shifted levels and shifted fit targets.

Run:  python3 demos/05_quantum_defects.py
"""

from kss import DefectTable, InitConditions, Window, fit_params, fit_params_qdt, kss_energy, sqdt_expand
from kss.qdt import sqdt_energy, sqdt_labels

# asymptotic defects for low l, tiny ones for high l
table = DefectTable({0: 1.35, 1: 0.85, 2: 0.013, **{l: 0.5 for l in range(20, 41)}}, {0: 1})
cond = InitConditions(n_bar=45, l3_target=30, delta_l3=2.5)

print("labels for n = 45")
for l in (0, 1, 2, 30):
    lab = sqdt_labels(45, l, table)
    print(f"  l={l:2d}: n*={lab.n_star:.3f} l*={lab.l_star:.3f} degree={lab.degree} "
          f"E={sqdt_energy(45, l, table):.6e}")

hyd = fit_params(cond)
qdt = fit_params_qdt(cond, table)
print("\n              hydrogen      shifted")
for k in ("alpha", "gamma0", "delta"):
    print(f"  {k:8s} {hyd.params()[k]:12.6f} {qdt.params()[k]:12.6f}")
print(f"  <H>      {kss_energy(hyd):12.5e} {kss_energy(qdt):12.5e}")

coeffs = sqdt_expand(qdt, Window.symmetric(45, 30), table)
print(f"\nshifted-basis expansion: captured norm {coeffs.captured_norm:.5f}, "
      f"sum |c|^2 E = {coeffs.mean_energy():.6e}")
