"""Simulation and verification tools for the coherent-light-boosted SU(1,1) interferometer.

Submodules
----------
algebra
    Normal-ordered two-mode ladder polynomials.
interferometer
    Bogoliubov mode transforms for the OPAs, phase shift and full chain.
sensitivity
    Moments of the detected photon number and phase sensitivity, plus the
    closed-form expressions.
fock
    Truncated Fock-space simulation used as an independent oracle.
schemes
    Competing interferometer schemes and the pump-cost comparison.
validation
    Sweeps, figure data and the cross-path validation campaign.
"""

__version__ = "0.1.0"

from .interferometer import ModeTransform, OpaParams, PhaseShift, clb_chain, compose, opa_transform, phase_transform
from .sensitivity import (
    CoherentInput,
    MomentReport,
    SensitivityPoint,
    closed_form_printed,
    closed_form_reconciled,
    klauder_limit,
    moments,
    phase_sensitivity,
    simple_sensitivity,
)

__all__ = [
    "ModeTransform",
    "OpaParams",
    "PhaseShift",
    "clb_chain",
    "compose",
    "opa_transform",
    "phase_transform",
    "CoherentInput",
    "MomentReport",
    "SensitivityPoint",
    "closed_form_printed",
    "closed_form_reconciled",
    "klauder_limit",
    "moments",
    "phase_sensitivity",
    "simple_sensitivity",
]
