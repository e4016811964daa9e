"""
Which closed form matches the exact result
==========================================

The general closed form for delta_phi^2 can be written with the
mu^2 nu^2 prefactor in the numerator or the denominator, and with the
interference term carrying |alpha beta| to the first or second power.
This script measures each candidate against the exact algebra path.
"""

from clb_su11.validation import reconciliation_campaign, vacuum_ratio_campaign

deviations, matching, n = reconciliation_campaign()
print(f"{n} grid points")
for label, dev in deviations.items():
    print(f"  {label:<40} max relative deviation {dev:.3e}")
print("matching:", matching or "none")

# with the prefactor in the numerator the vacuum limit is off by mu^4 nu^4
for row in vacuum_ratio_campaign():
    print(f"r = {row['r']}: printed/exact = {row['measured_factor']:.6f}, mu^4 nu^4 = {row['mu4nu4']:.6f}")
