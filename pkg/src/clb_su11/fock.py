"""Brute-force two-mode Fock-space simulation of the chain.

This path shares nothing with the ladder-algebra code: states are explicit
amplitude vectors, the OPAs are matrix exponentials of the two-mode squeezing
generator, and moments are direct sums over occupation numbers. It is only
meant for small gains and amplitudes, where the cutoff can be made harmless.

Squeezer convention (fixed by :func:`calibrate_squeezer_convention`)::

    U(r, psi) = exp(r e^{i psi} ad bd - r e^{-i psi} a b)

so that ``U^dagger a U = cosh(r) a + e^{i psi} sinh(r) bd``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np
import scipy.sparse as sp
from scipy.linalg import expm
from scipy.special import gammaln
from scipy.stats import poisson

from .sensitivity import CoherentInput, MomentReport, Path

__all__ = [
    "TRUNCATION_BUDGET",
    "MAX_CUTOFF",
    "TruncationError",
    "FockCutoff",
    "TwoModeState",
    "LadderMatrices",
    "ladder_matrices",
    "coherent_state",
    "ladder_expr_matrix",
    "product_state",
    "two_mode_squeezer",
    "phase_shifter",
    "heisenberg_annihilator",
    "heisenberg_defect",
    "low_occupation_indices",
    "calibrate_squeezer_convention",
    "evolve_chain",
    "simulate_chain",
    "simulate_chain_adaptive",
    "adaptive_cutoff",
    "oracle_mean_derivative",
    "truncation_deficit",
    "fidelity",
]

TRUNCATION_BUDGET = 1e-8
MIN_CUTOFF = 4
MAX_CUTOFF = 60

# (generator sign, pump-phase sign, pump-phase offset); see calibrate_squeezer_convention
SQUEEZER_CONVENTION = (1, 1, 0.0)


class TruncationError(RuntimeError):
    """The Fock cutoff lost more probability than the truncation budget allows."""

    def __init__(self, deficit: float, cutoff: int, budget: float):
        super().__init__(f"truncation deficit {deficit:.3e} exceeds budget {budget:.1e} at n_max={cutoff}")
        self.deficit = deficit
        self.cutoff = cutoff


@dataclass(frozen=True)
class FockCutoff:
    n_max: int

    def __post_init__(self):
        if not MIN_CUTOFF <= self.n_max <= MAX_CUTOFF:
            raise ValueError(f"n_max must lie in [{MIN_CUTOFF}, {MAX_CUTOFF}], got {self.n_max}")

    @property
    def levels(self) -> int:
        return self.n_max + 1

    @property
    def dim(self) -> int:
        return self.levels**2


def _cutoff(c) -> FockCutoff:
    return c if isinstance(c, FockCutoff) else FockCutoff(int(c))


@dataclass(frozen=True, eq=False)
class TwoModeState:
    """Amplitudes indexed ``n_a * (n_max + 1) + n_b``.

    ``lost`` is probability removed before renormalising (tail of the
    truncated coherent inputs).
    """

    amplitudes: np.ndarray
    cutoff: FockCutoff
    lost: float = 0.0

    def grid(self) -> np.ndarray:
        """Amplitudes reshaped to ``(n_a, n_b)``."""
        return self.amplitudes.reshape(self.cutoff.levels, self.cutoff.levels)

    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)


class LadderMatrices(NamedTuple):
    a: sp.csr_matrix
    a_dagger: sp.csr_matrix
    b: sp.csr_matrix
    b_dagger: sp.csr_matrix


def _single_mode_annihilator(levels: int) -> sp.csr_matrix:
    return sp.diags(np.sqrt(np.arange(1, levels)), 1, format="csr", dtype=complex)


def ladder_matrices(cutoff) -> LadderMatrices:
    """Truncated ladder operators on the two-mode space (sparse)."""
    c = _cutoff(cutoff)
    a1 = _single_mode_annihilator(c.levels)
    eye = sp.identity(c.levels, format="csr", dtype=complex)
    a = sp.kron(a1, eye, format="csr")
    b = sp.kron(eye, a1, format="csr")
    return LadderMatrices(a, a.conj().T.tocsr(), b, b.conj().T.tocsr())


def ladder_expr_matrix(x, cutoff) -> sp.csr_matrix:
    """Truncated-space matrix of a :class:`~clb_su11.algebra.LadderExpr`.

    Exact on columns whose occupations stay ``<= n_max`` under the raising
    part of ``x``.
    """
    c = _cutoff(cutoff)
    a1 = _single_mode_annihilator(c.levels)
    ad1 = a1.conj().T.tocsr()

    def mode(p: int, q: int):
        return (ad1**p if p else sp.identity(c.levels, dtype=complex, format="csr")) @ (
            a1**q if q else sp.identity(c.levels, dtype=complex, format="csr")
        )

    out = sp.csr_matrix((c.dim, c.dim), dtype=complex)
    for (p, q, s, t), coef in x.terms.items():
        out = out + coef * sp.kron(mode(p, q), mode(s, t), format="csr")
    return out


def coherent_state(amp: float, theta: float, cutoff) -> tuple[np.ndarray, float]:
    """Single-mode coherent state ``|amp e^{i theta}>`` and its truncated tail mass.

    Raises ``ValueError`` unless ``amp**2 <= n_max / 4``.
    """
    c = _cutoff(cutoff)
    if amp < 0:
        raise ValueError("amplitude must be non-negative")
    if amp**2 > c.n_max / 4:
        raise ValueError(f"amplitude {amp} too large for n_max={c.n_max} (need amp^2 <= n_max/4)")
    n = np.arange(c.levels)
    if amp == 0:
        vec = np.zeros(c.levels, dtype=complex)
        vec[0] = 1.0
        return vec, 0.0
    log_mag = -(amp**2) / 2 + n * np.log(amp) - 0.5 * gammaln(n + 1)
    vec = np.exp(log_mag) * np.exp(1j * theta * n)
    vec /= np.linalg.norm(vec)
    return vec, float(poisson.sf(c.n_max, amp**2))


def product_state(inp: CoherentInput, cutoff) -> TwoModeState:
    c = _cutoff(cutoff)
    va, la = coherent_state(inp.amp_a, inp.theta, c)
    vb, lb = coherent_state(inp.amp_b, inp.theta, c)
    return TwoModeState(np.kron(va, vb), c, la + lb - la * lb)


@lru_cache(maxsize=64)
def _squeezer_blocks(r: float, pump_phase: float, n_max: int, convention=SQUEEZER_CONVENTION):
    """Unitary blocks of the two-mode squeezer; ``n_a - n_b`` is conserved."""
    sign, phase_sign, offset = convention
    levels = n_max + 1
    xi = sign * r * np.exp(1j * (phase_sign * pump_phase + offset))
    blocks = []
    for diff in range(-n_max, n_max + 1):
        na = np.arange(max(0, diff), min(n_max, n_max + diff) + 1)
        nb = na - diff
        idx = na * levels + nb
        k = len(idx)
        gen = np.zeros((k, k), dtype=complex)
        # ad bd |na, nb> = sqrt((na+1)(nb+1)) |na+1, nb+1>
        up = np.sqrt((na[:-1] + 1.0) * (nb[:-1] + 1.0))
        gen[np.arange(1, k), np.arange(k - 1)] = xi * up
        gen[np.arange(k - 1), np.arange(1, k)] = -np.conj(xi) * up
        blocks.append((idx, expm(gen)))
    return tuple(blocks)


def two_mode_squeezer(r: float, pump_phase: float, cutoff) -> np.ndarray:
    """Dense unitary of one OPA on the truncated space."""
    return _dense(r, pump_phase, _cutoff(cutoff).n_max, SQUEEZER_CONVENTION)


def phase_shifter(phi: float, cutoff) -> np.ndarray:
    """Diagonal of ``exp(i phi ad a)``."""
    c = _cutoff(cutoff)
    na = np.repeat(np.arange(c.levels), c.levels)
    return np.exp(1j * phi * na)


def _apply_squeezer(vec: np.ndarray, r: float, pump_phase: float, n_max: int, convention=SQUEEZER_CONVENTION):
    out = np.empty_like(vec)
    for idx, block in _squeezer_blocks(float(r), float(pump_phase), n_max, convention):
        out[idx] = block @ vec[idx]
    return out


def heisenberg_annihilator(unitary: np.ndarray, cutoff) -> np.ndarray:
    """``U^dagger a U`` as a dense matrix."""
    a = ladder_matrices(cutoff).a
    return unitary.conj().T @ (a @ unitary)


def low_occupation_indices(cutoff, max_level: int) -> np.ndarray:
    """Flat indices of basis states with both occupations ``<= max_level``."""
    c = _cutoff(cutoff)
    n = np.arange(c.levels)
    na, nb = np.meshgrid(n, n, indexing="ij")
    keep = (na <= max_level) & (nb <= max_level)
    return np.flatnonzero(keep.ravel())


def heisenberg_defect(r: float, pump_phase: float, cutoff, max_level: int, convention=SQUEEZER_CONVENTION) -> float:
    """Largest deviation of ``U^dagger a U`` from ``cosh(r) a + e^{i psi} sinh(r) bd``.

    Only matrix elements between states with occupations ``<= max_level``
    are compared. The cutoff corrupts the conjugated operator far below
    ``n_max`` (roughly ``tanh(r)**(n_max - n)``), so ``max_level`` must sit
    well under it: ``n_max // 8`` keeps the error near 1e-13 at ``r = 0.5``.
    """
    c = _cutoff(cutoff)
    u = _dense(r, pump_phase, c.n_max, convention)
    lad = ladder_matrices(c)
    lhs = heisenberg_annihilator(u, c)
    rhs = np.cosh(r) * lad.a.toarray() + np.exp(1j * pump_phase) * np.sinh(r) * lad.b_dagger.toarray()
    keep = low_occupation_indices(c, max_level)
    return float(np.abs((lhs - rhs)[np.ix_(keep, keep)]).max())


def _dense(r, pump_phase, n_max, convention) -> np.ndarray:
    c = FockCutoff(n_max)
    u = np.zeros((c.dim, c.dim), dtype=complex)
    for idx, block in _squeezer_blocks(float(r), float(pump_phase), n_max, convention):
        u[np.ix_(idx, idx)] = block
    return u


def calibrate_squeezer_convention(r: float = 0.3, pump_phase: float = 0.7, n_max: int = 30, max_level: int = 4, tol: float = 1e-8):
    """Find the generator sign and phase map reproducing the OPA mode transform.

    Tries every ``(sign, phase_sign, offset)`` and returns the first whose
    conjugated annihilator ``U^dagger a U`` equals ``cosh(r) a + e^{i psi}
    sinh(r) bd`` on low occupations. Raises ``RuntimeError`` if none does.
    """
    for sign in (1, -1):
        for phase_sign in (1, -1):
            for offset in (0.0, np.pi):
                conv = (sign, phase_sign, offset)
                if heisenberg_defect(r, pump_phase, n_max, max_level, conv) < tol:
                    return conv
    raise RuntimeError("no squeezer convention reproduces the OPA mode transform")


def truncation_deficit(state: TwoModeState) -> float:
    """Lost tail mass, norm loss, and population of the top two levels of either mode."""
    norm_loss = 1.0 - state.norm_squared()
    # rounding in the norm is not truncation
    if abs(norm_loss) < 64 * np.finfo(float).eps:
        norm_loss = 0.0
    probs = np.abs(state.grid()) ** 2
    top = state.cutoff.n_max - 1
    edge = probs[top:, :].sum() + probs[:top, top:].sum()
    return float(state.lost + max(norm_loss, 0.0) + edge)


def fidelity(x: TwoModeState, y: TwoModeState) -> float:
    return float(abs(np.vdot(x.amplitudes, y.amplitudes)) ** 2)


def _number_moments(state: TwoModeState) -> tuple[float, float, float]:
    probs = np.abs(state.grid()) ** 2
    probs = probs / probs.sum()
    n = np.arange(state.cutoff.levels)
    total = n[:, None] + n[None, :]
    mean = float((probs * total).sum())
    var = float((probs * (total - mean) ** 2).sum())
    return mean, var + mean**2, var


def evolve_chain(r: float, phi: float, inp: CoherentInput, cutoff) -> tuple[TwoModeState, TwoModeState, float]:
    """Return (input state, output state, worst deficit seen along the chain)."""
    c = _cutoff(cutoff)
    start = product_state(inp, c)
    vec = _apply_squeezer(start.amplitudes, r, 0.0, c.n_max)
    worst = truncation_deficit(TwoModeState(vec, c, start.lost))
    vec = phase_shifter(phi, c) * vec
    vec = _apply_squeezer(vec, r, np.pi, c.n_max)
    out = TwoModeState(vec, c, start.lost)
    return start, out, max(worst, truncation_deficit(out))


def simulate_chain(r: float, phi: float, inp: CoherentInput, cutoff, budget: float = TRUNCATION_BUDGET) -> MomentReport:
    """Moments of ``N_T`` after OPA, phase shift and inverse OPA.

    Raises
    ------
    TruncationError
        If the worst truncation deficit along the chain exceeds ``budget``.
    """
    c = _cutoff(cutoff)
    _, out, deficit = evolve_chain(r, phi, inp, c)
    if deficit > budget:
        raise TruncationError(deficit, c.n_max, budget)
    mean, second, var = _number_moments(out)
    return MomentReport(mean, second, var, Path.ORACLE, False, deficit)


def adaptive_cutoff(r: float, phi: float, inp: CoherentInput, budget: float = TRUNCATION_BUDGET, start: int = 10) -> int:
    """Smallest ``n_max`` in the doubling sequence (capped at 60) that meets ``budget``.

    Raises :class:`TruncationError` if even ``n_max = 60`` does not.
    """
    n_max = max(start, MIN_CUTOFF, int(np.ceil(4 * max(inp.amp_a, inp.amp_b) ** 2)))
    while True:
        n_max = min(n_max, MAX_CUTOFF)
        deficit = evolve_chain(r, phi, inp, n_max)[2]
        if deficit <= budget:
            return n_max
        if n_max == MAX_CUTOFF:
            raise TruncationError(deficit, n_max, budget)
        n_max *= 2


def simulate_chain_adaptive(r: float, phi: float, inp: CoherentInput, budget: float = TRUNCATION_BUDGET, start: int = 10) -> MomentReport:
    """:func:`simulate_chain` at the cutoff picked by :func:`adaptive_cutoff`."""
    return simulate_chain(r, phi, inp, adaptive_cutoff(r, phi, inp, budget, start), budget)


def oracle_mean_derivative(r: float, phi: float, inp: CoherentInput, h: float = 1e-4, cutoff=None) -> float:
    """``d<N_T>/dphi`` by 4th-order central differences of simulated means."""
    if cutoff is None:
        cutoff = adaptive_cutoff(r, phi, inp)
    f = [simulate_chain(r, phi + k * h, inp, cutoff, budget=np.inf).mean for k in (-2, -1, 1, 2)]
    return (f[0] - 8 * f[1] + 8 * f[2] - f[3]) / (12 * h)
