"""Photon-number moments and phase sensitivity of the coherent-boosted SU(1,1) chain.

The algebra path propagates ``N_T = ad a + bd b`` through the chain, then
evaluates it on the coherent input. The closed forms are kept side by side
with it so they can be checked against each other.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .algebra import (
    LadderExpr,
    coherent_expectation,
    displace,
    multiply,
    number_operator,
    substitute_modes,
    substitute_modes_derivative,
)
from .interferometer import OpaParams, clb_chain, opa_transform

__all__ = [
    "DIVERGENCE_THRESHOLD",
    "KLAUDER_PHI",
    "PRINTED_VARIANT",
    "RECONCILED_VARIANT",
    "CoherentInput",
    "Path",
    "MomentReport",
    "SensitivityPoint",
    "ClosedFormTerms",
    "ClosedFormVariant",
    "propagated_number_operator",
    "moments",
    "mean_derivative",
    "phase_sensitivity",
    "vacuum_sensitivity_extrapolated",
    "closed_form_terms",
    "closed_form_printed",
    "closed_form_variant",
    "closed_form_reconciled",
    "simple_sensitivity",
    "klauder_limit",
    "high_gain_asymptote",
    "n_opa",
]

DIVERGENCE_THRESHOLD = 1e-30
KLAUDER_PHI = 1e-4


@dataclass(frozen=True)
class CoherentInput:
    """Coherent seeds ``|alpha>|beta>`` with a common phase ``theta``."""

    amp_a: float
    amp_b: float
    theta: float = 0.0

    def __post_init__(self):
        for name in ("amp_a", "amp_b"):
            v = getattr(self, name)
            if not np.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be finite and >= 0, got {v}")
        if not np.isfinite(self.theta):
            raise ValueError("theta must be finite")

    @classmethod
    def vacuum(cls) -> CoherentInput:
        return cls(0.0, 0.0, 0.0)

    @classmethod
    def equal_split(cls, n_coh: float, theta: float = np.pi / 4) -> CoherentInput:
        """``|alpha| = |beta| = sqrt(n_coh / 2)``."""
        amp = float(np.sqrt(n_coh / 2))
        return cls(amp, amp, theta)

    @property
    def alpha(self) -> complex:
        return self.amp_a * np.exp(1j * self.theta)

    @property
    def beta(self) -> complex:
        return self.amp_b * np.exp(1j * self.theta)

    def n_coh(self) -> float:
        return self.amp_a**2 + self.amp_b**2


class Path(str, enum.Enum):
    ALGEBRA = "algebra"
    ORACLE = "oracle"
    CLOSED_FORM = "closed_form"


@dataclass(frozen=True)
class MomentReport:
    """Moments of ``N_T``. ``clamped`` marks a rounding-negative variance set to 0."""

    mean: float
    second_moment: float
    variance: float
    path: Path
    clamped: bool = False
    truncation_deficit: float | None = None


@dataclass(frozen=True)
class SensitivityPoint:
    """``delta_phi_squared = variance / mean_derivative**2`` unless ``diverged``.

    For closed-form results ``variance`` and ``mean_derivative`` hold the
    formula's numerator and the square root of its denominator.
    """

    delta_phi_squared: float
    variance: float
    mean_derivative: float
    diverged: bool


@dataclass(frozen=True)
class ClosedFormTerms:
    b_term: float
    psi_term: float
    bracket: float
    brace: float


@dataclass(frozen=True)
class ClosedFormVariant:
    """Where the ``mu^2 nu^2`` prefactor sits, and the power of ``|alpha beta|`` in Psi."""

    prefactor: str  # "numerator" (printed form) or "denominator"
    psi_exponent: int  # 2 (printed form) or 1

    def __post_init__(self):
        if self.prefactor not in ("numerator", "denominator"):
            raise ValueError(f"unknown prefactor placement {self.prefactor!r}")
        if self.psi_exponent not in (1, 2):
            raise ValueError(f"psi exponent must be 1 or 2, got {self.psi_exponent}")

    @property
    def label(self) -> str:
        return f"prefactor={self.prefactor},psi_exponent={self.psi_exponent}"


PRINTED_VARIANT = ClosedFormVariant("numerator", 2)
# Selected by validation.reconciliation_campaign; tests/test_validation.py
# re-runs the campaign and fails if its choice differs from this one.
RECONCILED_VARIANT = ClosedFormVariant("denominator", 1)


@lru_cache(maxsize=4096)
def propagated_number_operator(r: float, phi: float) -> LadderExpr:
    """``N_T`` at the detectors written in the input-mode operators."""
    return substitute_modes(number_operator(), clb_chain(r, phi))


@lru_cache(maxsize=4096)
def _propagated_number_derivative(r: float, phi: float) -> LadderExpr:
    first = opa_transform(OpaParams(r, 0.0))
    second = opa_transform(OpaParams(r, np.pi))
    e = np.exp(1j * phi)
    d_phase = np.diag([1j * e, -1j * np.conj(e), 0.0, 0.0])
    tangent = second.matrix @ d_phase @ first.matrix
    return substitute_modes_derivative(number_operator(), clb_chain(r, phi), tangent)


def moments(r: float, phi: float, inp: CoherentInput) -> MomentReport:
    """Mean, second moment and variance of ``N_T`` via the algebra path.

    The variance is taken in the displaced frame, where the coherent input
    becomes vacuum: ``Var = <0|(N' - <N'>)^2|0>``. This avoids the
    cancellation in ``<N^2> - <N>^2`` at large photon numbers.
    """
    n_prop = propagated_number_operator(float(r), float(phi))
    shifted = displace(n_prop, inp.alpha, inp.beta)
    mean = shifted.constant().real
    fluct = shifted - mean
    var = multiply(fluct, fluct).constant().real
    clamped = var < 0
    if clamped:
        var = 0.0
    return MomentReport(mean, var + mean**2, var, Path.ALGEBRA, clamped)


def mean_derivative(r: float, phi: float, inp: CoherentInput) -> float:
    """``d<N_T>/dphi``, exact up to rounding (forward-mode through the substitution)."""
    dn = _propagated_number_derivative(float(r), float(phi))
    return coherent_expectation(dn, inp).real


def _assemble(variance: float, derivative: float, mean: float) -> SensitivityPoint:
    if abs(derivative) < DIVERGENCE_THRESHOLD * max(1.0, abs(mean)):
        return SensitivityPoint(np.inf, variance, derivative, True)
    return SensitivityPoint(variance / derivative**2, variance, derivative, False)


def phase_sensitivity(r: float, phi: float, inp: CoherentInput) -> SensitivityPoint:
    """``Var(N_T) / (d<N_T>/dphi)^2`` from the algebra path."""
    m = moments(r, phi, inp)
    return _assemble(m.variance, mean_derivative(r, phi, inp), m.mean)


def vacuum_sensitivity_extrapolated(r: float, phi: float = KLAUDER_PHI) -> float:
    """Vacuum-seeded sensitivity at ``phi -> 0`` by Richardson extrapolation in ``phi^2``."""
    vac = CoherentInput.vacuum()
    coarse = phase_sensitivity(r, phi, vac)
    fine = phase_sensitivity(r, phi / 2, vac)
    if coarse.diverged or fine.diverged:
        return np.inf
    return (4 * fine.delta_phi_squared - coarse.delta_phi_squared) / 3


def closed_form_terms(r, phi, theta, amp_a, amp_b, psi_exponent: int = 2) -> ClosedFormTerms:
    mu, nu = np.cosh(r), np.sinh(r)
    ab = amp_a * amp_b
    b_term = 1 + 2 * amp_a**2 + 2 * amp_b**2
    bracket = (
        1
        + 4 * np.cos(phi)
        + 3 * np.cos(2 * phi)
        + 8 * np.cosh(8 * r) * np.sin(phi / 2) ** 4
        + 8 * np.cosh(4 * r) * np.sin(phi) ** 2
    )
    c2, s2 = np.cosh(2 * r), np.sinh(2 * r)
    psi = (
        32
        * ab**psi_exponent
        * (
            np.sin(2 * theta) * s2 * (2 * c2**2 * np.sin(phi) - np.sin(2 * phi) * s2**2)
            + 2 * np.cos(2 * theta) * np.sin(phi / 2) ** 2 * np.sinh(4 * r) * (c2**2 - np.cos(phi) * s2**2)
        )
    )
    brace = ab * (mu**2 * np.sin(2 * theta + phi) - nu**2 * np.sin(2 * theta - phi)) + (
        1 + amp_a**2 + amp_b**2
    ) * mu * nu * np.sin(phi)
    return ClosedFormTerms(float(b_term), float(psi), float(bracket), float(brace))


def closed_form_variant(r, phi, theta, amp_a, amp_b, variant: ClosedFormVariant) -> tuple[SensitivityPoint, ClosedFormTerms]:
    terms = closed_form_terms(r, phi, theta, amp_a, amp_b, variant.psi_exponent)
    mu2nu2 = (np.cosh(r) * np.sinh(r)) ** 2
    core = terms.b_term * terms.bracket + terms.psi_term - 8
    if variant.prefactor == "numerator":
        num, den = mu2nu2 * core, 256 * terms.brace**2
    else:
        num, den = core, 256 * mu2nu2 * terms.brace**2
    if den == 0:
        return SensitivityPoint(np.inf, float(num), 0.0, True), terms
    return SensitivityPoint(float(num / den), float(num), float(np.sqrt(den)), False), terms


def closed_form_printed(r, phi, theta, amp_a, amp_b) -> tuple[SensitivityPoint, ClosedFormTerms]:
    """The full closed-form sensitivity with prefactor and Psi exactly as published."""
    return closed_form_variant(r, phi, theta, amp_a, amp_b, PRINTED_VARIANT)


def closed_form_reconciled(r, phi, theta, amp_a, amp_b) -> SensitivityPoint:
    """The closed form in the variant that agrees with the algebra path."""
    return closed_form_variant(r, phi, theta, amp_a, amp_b, RECONCILED_VARIANT)[0]


def n_opa(r: float) -> float:
    """Photon flux an OPA emits on vacuum inputs, ``2 sinh^2 r``."""
    return 2 * np.sinh(r) ** 2


def simple_sensitivity(r: float, n_coh: float) -> float:
    """``1 / (N_OPA (N_OPA + 2) N_coh)``; ``inf`` when ``r`` or ``n_coh`` is 0."""
    if r < 0 or n_coh < 0:
        raise ValueError("gain and photon number must be non-negative")
    n = n_opa(r)
    den = n * (n + 2) * n_coh
    return np.inf if den == 0 else float(1 / den)


def klauder_limit(r: float) -> float:
    """Vacuum-seeded SU(1,1) sensitivity ``1 / sinh^2(2r)``."""
    if r < 0:
        raise ValueError("gain must be non-negative")
    s = np.sinh(2 * r)
    return np.inf if s == 0 else float(1 / s**2)


def high_gain_asymptote(r: float, n_coh: float) -> dict[str, float]:
    """Large-gain forms of the simple sensitivity, as ``delta_phi^2``.

    ``printed`` squares the commonly quoted ``e^{-2r} / sqrt(2 N_coh)``; ``direct``
    is the actual limit ``4 e^{-4r} / N_coh``. They differ by a factor 8.
    """
    if r <= 0 or n_coh <= 0:
        raise ValueError("gain and photon number must be positive")
    printed = np.exp(-4 * r) / (2 * n_coh)
    direct = 4 * np.exp(-4 * r) / n_coh
    return {"printed": float(printed), "direct": float(direct), "ratio": float(direct / printed)}
