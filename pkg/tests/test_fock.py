import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clb_su11.fock import (
    MAX_CUTOFF,
    SQUEEZER_CONVENTION,
    FockCutoff,
    TruncationError,
    TwoModeState,
    adaptive_cutoff,
    calibrate_squeezer_convention,
    coherent_state,
    evolve_chain,
    fidelity,
    heisenberg_defect,
    ladder_matrices,
    low_occupation_indices,
    oracle_mean_derivative,
    phase_shifter,
    simulate_chain,
    simulate_chain_adaptive,
    truncation_deficit,
    two_mode_squeezer,
)
from clb_su11.sensitivity import CoherentInput, Path, mean_derivative, moments


def vacuum_state(cutoff):
    c = FockCutoff(cutoff)
    v = np.zeros(c.dim, dtype=complex)
    v[0] = 1
    return TwoModeState(v, c)


def single_mode_stats(vec):
    n = np.arange(len(vec))
    p = np.abs(vec) ** 2
    mean = (p * n).sum()
    return mean, (p * n**2).sum() - mean**2


class TestCutoff:
    @pytest.mark.parametrize("n", [3, 61])
    def test_bounds(self, n):
        with pytest.raises(ValueError):
            FockCutoff(n)

    def test_dim(self):
        assert FockCutoff(10).dim == 121


class TestLadder:
    def test_lowers_one_to_vacuum(self):
        lad = ladder_matrices(5)
        one = np.zeros(36)
        one[6] = 1  # |1, 0>
        np.testing.assert_allclose(lad.a @ one, np.eye(36)[0])

    def test_commutator_below_top(self):
        lad = ladder_matrices(8)
        comm = (lad.a @ lad.a_dagger - lad.a_dagger @ lad.a).toarray()
        keep = low_occupation_indices(8, 7)
        np.testing.assert_allclose(comm[np.ix_(keep, keep)], np.eye(len(keep)), atol=1e-14)

    def test_number_eigenvalues(self):
        lad = ladder_matrices(6)
        diag = (lad.a_dagger @ lad.a).diagonal().real
        np.testing.assert_allclose(diag, np.repeat(np.arange(7), 7))

    def test_dagger_is_conjugate_transpose(self):
        lad = ladder_matrices(6)
        assert abs(lad.b_dagger - lad.b.conj().T).max() == 0


class TestCoherentState:
    def test_zero_amplitude_is_vacuum(self):
        vec, tail = coherent_state(0.0, 1.3, 10)
        np.testing.assert_array_equal(vec, np.eye(11)[0])
        assert tail == 0

    def test_poisson_statistics(self):
        vec, _ = coherent_state(1.0, 0.4, 30)
        mean, var = single_mode_stats(vec)
        assert mean == pytest.approx(1.0, abs=1e-10)
        assert var == pytest.approx(1.0, abs=1e-10)

    def test_eigenvalue(self):
        amp, theta, cutoff = 1.0, 0.4, 30
        vec, _ = coherent_state(amp, theta, cutoff)
        a1 = np.diag(np.sqrt(np.arange(1, cutoff + 1)), 1)
        assert abs(np.vdot(vec, vec)) ** 2 == pytest.approx(1.0, abs=1e-10)
        assert np.vdot(vec, a1 @ vec) == pytest.approx(amp * np.exp(1j * theta), abs=1e-10)

    def test_tail_below_budget(self):
        _, tail = coherent_state(1.0, 0.0, 30)
        assert tail < 1e-20

    def test_rejects_large_amplitude(self):
        with pytest.raises(ValueError, match="too large"):
            coherent_state(2.0, 0.0, 10)


class TestSqueezer:
    def test_calibration(self):
        assert calibrate_squeezer_convention() == SQUEEZER_CONVENTION

    def test_zero_gain_identity(self):
        np.testing.assert_allclose(two_mode_squeezer(0.0, 0.7, 8), np.eye(81), atol=1e-15)

    @pytest.mark.parametrize("r", [0.2, 0.5])
    def test_pi_is_adjoint(self, r):
        u0 = two_mode_squeezer(r, 0.0, 12)
        upi = two_mode_squeezer(r, np.pi, 12)
        np.testing.assert_allclose(upi, u0.conj().T, atol=1e-12)

    def test_two_mode_squeezed_vacuum_photons(self):
        out = two_mode_squeezer(0.3, 0.0, 30) @ vacuum_state(30).amplitudes
        grid = np.abs(out.reshape(31, 31)) ** 2
        n = np.arange(31)
        mean = (grid * (n[:, None] + n[None, :])).sum()
        assert mean == pytest.approx(2 * np.sinh(0.3) ** 2, rel=1e-10)
        assert mean == pytest.approx(0.1854652, abs=1e-7)

    @pytest.mark.parametrize("r,psi", [(0.1, 0.0), (0.5, 2.0), (0.5, np.pi)])
    def test_unitary_on_safe_subspace(self, r, psi):
        n_max = 20
        u = two_mode_squeezer(r, psi, n_max)
        keep = low_occupation_indices(n_max, n_max - 4)
        err = (u.conj().T @ u - np.eye(u.shape[0]))[np.ix_(keep, keep)]
        assert np.abs(err).max() < 1e-9

    @pytest.mark.parametrize("r,psi", [(0.2, 0.0), (0.5, 1.0), (0.5, np.pi), (0.4, 4.0)])
    def test_heisenberg_consistency(self, r, psi):
        assert heisenberg_defect(r, psi, 40, 5) < 1e-8

    def test_phase_shifter(self):
        d = phase_shifter(0.3, 4)
        assert d.shape == (25,)
        assert d[5 * 2 + 3] == pytest.approx(np.exp(0.6j))


class TestTruncationDeficit:
    def test_vacuum(self):
        assert truncation_deficit(vacuum_state(10)) == 0

    def test_coherent(self):
        start, _, _ = evolve_chain(0.0, 0.0, CoherentInput(1.0, 1.0, 0.2), 30)
        assert truncation_deficit(start) < 1e-20

    def test_monotone_in_cutoff(self):
        vals = []
        for n in (10, 15, 20, 30):
            vec = two_mode_squeezer(0.5, 0.0, n) @ vacuum_state(n).amplitudes
            vals.append(truncation_deficit(TwoModeState(vec, FockCutoff(n))))
        assert all(x > y for x, y in zip(vals, vals[1:]))

    def test_chain_norm_loss_small(self):
        start, out, worst = evolve_chain(0.5, 0.8, CoherentInput(1.0, 1.0, 0.3), 40)
        assert worst < 1e-8
        assert abs(start.norm_squared() - out.norm_squared()) < 1e-8


class TestSimulateChain:
    @settings(max_examples=12, deadline=None)
    @given(st.floats(0, 0.5), st.floats(0, 1), st.floats(0, 1), st.floats(0, 2 * np.pi))
    def test_round_trip_at_zero_phase(self, r, aa, ab, theta):
        start, out, _ = evolve_chain(r, 0.0, CoherentInput(aa, ab, theta), 30)
        assert fidelity(start, out) >= 1 - 1e-8

    def test_vacuum_mean(self):
        r, phi = 0.4, 0.9
        m = simulate_chain(r, phi, CoherentInput.vacuum(), 40)
        assert m.mean == pytest.approx(8 * np.cosh(r) ** 2 * np.sinh(r) ** 2 * np.sin(phi / 2) ** 2, abs=1e-8)
        assert m.path is Path.ORACLE
        assert m.truncation_deficit < 1e-8

    def test_matches_algebra(self):
        inp = CoherentInput(0.5, 0.5, np.pi / 4)
        orc, alg = simulate_chain_adaptive(0.3, 0.7, inp), moments(0.3, 0.7, inp)
        assert orc.mean == pytest.approx(alg.mean, rel=1e-8)
        assert orc.variance == pytest.approx(alg.variance, rel=1e-8)

    @settings(max_examples=10, deadline=None)
    @given(st.floats(0, 0.6), st.floats(0, 1), st.floats(0, 1), st.floats(0, 2 * np.pi), st.floats(0, np.pi))
    def test_path_equivalence(self, r, aa, ab, theta, phi):
        inp = CoherentInput(aa, ab, theta)
        orc, alg = simulate_chain_adaptive(r, phi, inp), moments(r, phi, inp)
        for x, y in ((orc.mean, alg.mean), (orc.variance, alg.variance)):
            assert x == pytest.approx(y, rel=1e-6, abs=1e-8)

    def test_budget_exceeded(self):
        with pytest.raises(TruncationError) as info:
            simulate_chain(0.5, 1.0, CoherentInput(1.0, 1.0, 0.0), 8)
        assert info.value.cutoff == 8 and info.value.deficit > 1e-8

    def test_adaptive_cutoff_doubles(self):
        assert adaptive_cutoff(0.1, 0.5, CoherentInput.vacuum()) == 10
        n = adaptive_cutoff(0.5, 1.0, CoherentInput(1.0, 1.0, 0.0))
        assert n in (20, 40, MAX_CUTOFF)

    def test_oracle_derivative(self):
        inp = CoherentInput(0.5, 0.8, 0.3)
        assert oracle_mean_derivative(0.3, 0.6, inp) == pytest.approx(mean_derivative(0.3, 0.6, inp), rel=1e-7)
