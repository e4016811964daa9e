"""
The chain undoes itself at zero phase
=====================================

An OPA, a phase shift and a second OPA pumped at the opposite phase.
With no phase shift the second amplifier cancels the first, so the
interferometer returns its input. Here it is checked twice: on the 4x4
mode transform and on a brute-force Fock-space state.
"""

import numpy as np

from clb_su11.fock import evolve_chain, fidelity
from clb_su11.interferometer import chain_coefficients, clb_chain
from clb_su11.sensitivity import CoherentInput

# mode transform in the basis (a, ad, b, bd)
for r in (0.1, 1.0, 3.0):
    dev = np.abs(clb_chain(r, 0.0).matrix - np.eye(4)).max()
    print(f"r = {r}: max |M - I| = {dev:.1e}")

# away from zero phase the output mixes a with bd
c = chain_coefficients(0.5, 1.0)
print("a_f = ({:.4f}) a + ({:.4f}) bd".format(c["a_a"], c["a_bd"]))

# Fock-space round trip with coherent light in both modes
start, out, deficit = evolve_chain(0.5, 0.0, CoherentInput(1.0, 1.0, np.pi / 4), 30)
print(f"round-trip fidelity = {fidelity(start, out):.12f}, truncation deficit = {deficit:.1e}")
