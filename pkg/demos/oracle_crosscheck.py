"""
Two independent computations of the output statistics
======================================================

The algebra path propagates normal-ordered ladder polynomials through the
mode transform. The oracle builds the unitaries on a truncated Fock space
and sums over occupation numbers. They share no code, so agreement is a
real check.
"""

import numpy as np

from clb_su11.fock import simulate_chain_adaptive
from clb_su11.sensitivity import CoherentInput, moments

for r, amp, theta, phi in [(0.1, 0.5, 0.0, 0.5), (0.3, 0.5, np.pi / 4, 0.7), (0.5, 1.0, np.pi / 8, 1.0)]:
    inp = CoherentInput(amp, amp, theta)
    alg = moments(r, phi, inp)
    orc = simulate_chain_adaptive(r, phi, inp)
    print(f"r={r} amp={amp} theta={theta:.3f} phi={phi}")
    print(f"  mean     algebra {alg.mean:.12f}  oracle {orc.mean:.12f}")
    print(f"  variance algebra {alg.variance:.12f}  oracle {orc.variance:.12f}")
    print(f"  oracle truncation deficit {orc.truncation_deficit:.1e}")
