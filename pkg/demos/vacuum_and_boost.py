"""
Vacuum seeding and the coherent boost
=====================================

With vacuum inputs the phase sensitivity approaches 1/sinh^2(2r) as the
probe phase goes to zero. Seeding both modes with coherent light divides
that limit by the coherent photon number at the dark operating point.
"""

import numpy as np

from clb_su11.sensitivity import (
    CoherentInput,
    klauder_limit,
    phase_sensitivity,
    simple_sensitivity,
    vacuum_sensitivity_extrapolated,
)

# vacuum input: finite phi sits slightly above the limit
for r in (0.5, 1.0, 2.0):
    at_phi = phase_sensitivity(r, 1e-4, CoherentInput.vacuum()).delta_phi_squared
    print(f"r = {r}: limit {klauder_limit(r):.10e}, phi=1e-4 {at_phi:.10e}, "
          f"extrapolated {vacuum_sensitivity_extrapolated(r):.10e}")

# coherent boost at phi = 0, theta = pi/4, equal amplitudes
r = 1.0
for n in (1.0, 10.0, 100.0):
    pt = phase_sensitivity(r, 0.0, CoherentInput.equal_split(n))
    print(f"N_coh = {n:>5}: {pt.delta_phi_squared:.6e}  closed form {simple_sensitivity(r, n):.6e}")

# the sweet spot is at phi = 0 only when the input phase is pi/4
for theta in (0.0, np.pi / 8, np.pi / 4):
    pt = phase_sensitivity(r, 0.0, CoherentInput(2.0, 2.0, theta))
    print(f"theta = {theta:.3f}: delta_phi^2 = {pt.delta_phi_squared:.4e} diverged={pt.diverged}")
