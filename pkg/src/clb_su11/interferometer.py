"""Mode-transformation matrices for OPAs, the probe phase shift and the full chain.

All matrices act on the operator column ``(a, ad, b, bd)``; row ``i`` gives
output operator ``i`` as a linear combination of the input operators.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "INVARIANT_TOL",
    "COMMUTATION_METRIC",
    "OpaParams",
    "PhaseShift",
    "ModeTransform",
    "opa_transform",
    "phase_transform",
    "compose",
    "clb_chain",
    "chain_coefficients",
]

INVARIANT_TOL = 1e-12
COMMUTATION_METRIC = np.diag([1.0, -1.0, 1.0, -1.0]).astype(complex)

# column permutation pairing a <-> ad, b <-> bd
_PAIR = np.array([1, 0, 3, 2])


@dataclass(frozen=True)
class OpaParams:
    """Gain ``r >= 0`` and pump phase, the latter reduced to ``[0, 2*pi)``."""

    gain: float
    pump_phase: float = 0.0

    def __post_init__(self):
        if not np.isfinite(self.gain) or self.gain < 0:
            raise ValueError(f"OPA gain must be finite and >= 0, got {self.gain}")
        object.__setattr__(self, "pump_phase", float(np.mod(self.pump_phase, 2 * np.pi)))


@dataclass(frozen=True)
class PhaseShift:
    phi: float

    def __post_init__(self):
        if not np.isfinite(self.phi):
            raise ValueError(f"phase must be finite, got {self.phi}")


@dataclass(frozen=True, eq=False)
class ModeTransform:
    """A 4x4 Bogoliubov matrix on ``(a, ad, b, bd)``.

    Construction does not validate; :meth:`check` does, and every consumer
    that relies on commutation preservation calls it.
    """

    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (4, 4):
            raise ValueError(f"mode transform must be 4x4, got {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls) -> ModeTransform:
        return cls(np.eye(4))

    def tolerance(self) -> float:
        # entries of composed chains grow like e^{2r}; M J M^dagger inherits their square
        return INVARIANT_TOL * max(1.0, float(np.abs(self.matrix).max())) ** 2

    def conjugation_defect(self) -> float:
        m = self.matrix
        expected = np.conj(m[[0, 2]][:, _PAIR])
        return float(np.abs(m[[1, 3]] - expected).max())

    def commutation_defect(self) -> float:
        m = self.matrix
        return float(np.abs(m @ COMMUTATION_METRIC @ m.conj().T - COMMUTATION_METRIC).max())

    def is_valid(self) -> bool:
        tol = self.tolerance()
        return self.conjugation_defect() <= tol and self.commutation_defect() <= tol

    def check(self) -> ModeTransform:
        """Return ``self`` or raise ``ValueError`` if the invariants fail."""
        tol = self.tolerance()
        if self.conjugation_defect() > tol:
            raise ValueError(f"mode transform breaks conjugation symmetry (defect {self.conjugation_defect():.3g})")
        if self.commutation_defect() > tol:
            raise ValueError(f"mode transform does not preserve commutators (defect {self.commutation_defect():.3g})")
        return self

    def allclose(self, other: ModeTransform, atol: float = INVARIANT_TOL) -> bool:
        return bool(np.allclose(self.matrix, other.matrix, rtol=0, atol=atol))

    def __matmul__(self, other: ModeTransform) -> ModeTransform:
        return compose(self, other)


def opa_transform(p: OpaParams) -> ModeTransform:
    """Two-mode squeezer ``a -> mu a + e^{i psi} nu bd``, ``b -> mu b + e^{i psi} nu ad``.

    ``pump_phase = 0`` gives the first OPA of the chain, ``pi`` the second
    (the sign of ``nu`` flips).
    """
    mu, nu = np.cosh(p.gain), np.sinh(p.gain)
    e = np.exp(1j * p.pump_phase)
    # exact endpoints so that the inverse OPA cancels to the last bit
    if p.pump_phase == 0.0:
        e = 1.0
    elif p.pump_phase == np.pi:
        e = -1.0
    ec = np.conj(e)
    m = np.array(
        [
            [mu, 0, 0, e * nu],
            [0, mu, ec * nu, 0],
            [0, e * nu, mu, 0],
            [ec * nu, 0, 0, mu],
        ],
        dtype=complex,
    )
    return ModeTransform(m)


def phase_transform(p: PhaseShift) -> ModeTransform:
    """Phase shift on mode a only: ``diag(e^{i phi}, e^{-i phi}, 1, 1)``."""
    e = np.exp(1j * p.phi)
    return ModeTransform(np.diag([e, np.conj(e), 1.0, 1.0]))


def compose(outer: ModeTransform, inner: ModeTransform) -> ModeTransform:
    """``outer·inner``: apply ``inner`` first, then ``outer``."""
    outer.check()
    inner.check()
    return ModeTransform(outer.matrix @ inner.matrix)


def clb_chain(r: float, phi: float) -> ModeTransform:
    """First OPA, probe phase on mode a, inverse OPA (pump phase pi)."""
    if r < 0:
        raise ValueError(f"gain must be >= 0, got {r}")
    first = opa_transform(OpaParams(r, 0.0))
    second = opa_transform(OpaParams(r, np.pi))
    return compose(second, compose(phase_transform(PhaseShift(phi)), first))


def chain_coefficients(r: float, phi: float) -> dict[str, complex]:
    """Closed-form nonzero entries of ``clb_chain(r, phi)``.

    ``a_f = a_a·a + a_bd·bd`` and ``b_f = b_ad·ad + b_b·b``.
    """
    mu, nu = np.cosh(r), np.sinh(r)
    e = np.exp(1j * phi)
    return {
        "a_a": mu**2 * e - nu**2,
        "a_bd": mu * nu * (e - 1),
        "b_ad": mu * nu * (1 - np.conj(e)),
        "b_b": mu**2 - nu**2 * np.conj(e),
    }
