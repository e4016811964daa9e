"""
Comparing interferometer schemes
================================

Delta phi for three schemes with 1e13 signal photons: a squeezed-light MZI,
the coherent-boosted SU(1,1) interferometer, and a coherent MZI that spends
the pump photons (about 1e12 per generated pair) as extra signal.
"""

import numpy as np

from clb_su11.schemes import Scheme, fig4_curves, ligo_report

r_values = np.round(np.linspace(0.0, 3.0, 7), 2)
rows = {}
for p in fig4_curves(r_values):
    rows.setdefault(p.r, {})[p.scheme] = p.delta_phi

print(f"{'r':>5} {'squeezed':>12} {'boosted':>12} {'pump->MZI':>12}")
for r, d in rows.items():
    print(f"{r:>5} {d[Scheme.SQUEEZED_MZI]:>12.4e} {d[Scheme.CLB]:>12.4e} {d[Scheme.COHERENT_MZI]:>12.4e}")

# the boosted scheme overtakes the squeezed MZI only once sinh(2r) > e^r, near r = 0.745

rep = ligo_report(3.0, 1e23)
for k, v in rep.as_dict().items():
    print(f"{k}: {v}")
