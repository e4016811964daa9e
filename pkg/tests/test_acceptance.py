"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line.

Run ``pytest tests/test_acceptance.py -v -s`` to see only these lines.
"""

import io
import json

import numpy as np
import pytest

from clb_su11.algebra import LadderExpr
from clb_su11.cli import main
from clb_su11.fock import evolve_chain, fidelity, ladder_expr_matrix, low_occupation_indices
from clb_su11.interferometer import clb_chain
from clb_su11.schemes import Scheme, fig4_curves, ligo_report
from clb_su11.sensitivity import CoherentInput, klauder_limit, n_opa, phase_sensitivity
from clb_su11.validation import ORACLE_GRID, fig3_minima, oracle_campaign


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\nACCEPTANCE [{n}] {'PASS' if ok else 'FAIL'}: {detail}")
        assert ok, detail

    return emit


def test_1_chain_identity(report):
    worst = max(np.abs(clb_chain(r, 0.0).matrix - np.eye(4)).max() for r in (0.1, 0.5, 1.0, 2.0, 3.0))
    worst_fid = 1.0
    for r in (0.1, 0.3, 0.5):
        for amp in (0.0, 0.5, 1.0):
            for theta in (0.0, np.pi / 4, 2.0):
                start, out, _ = evolve_chain(r, 0.0, CoherentInput(amp, amp, theta), 30)
                worst_fid = min(worst_fid, fidelity(start, out))
    ok = worst <= 1e-12 and worst_fid >= 1 - 1e-8
    report(1, ok, f"max |M(r,0) - I| = {worst:.2e} (tol 1e-12), min round-trip fidelity = {worst_fid:.12f} (tol 1 - 1e-8)")


def test_2_klauder_limit(report):
    rel = {r: abs(phase_sensitivity(r, 1e-4, CoherentInput.vacuum()).delta_phi_squared / klauder_limit(r) - 1) for r in (0.5, 1.0, 2.0)}
    ok = all(v <= 1e-6 for v in rel.values())
    report(2, ok, "relative deviation at phi = 1e-4: " + ", ".join(f"r={r}: {v:.3e}" for r, v in rel.items()) + " (tol 1e-6)")


def test_3_simple_operating_point(report):
    worst = 0.0
    for r in np.linspace(0.2, 2.0, 10):
        for n in np.linspace(0.5, 10.0, 5):
            got = phase_sensitivity(r, 0.0, CoherentInput.equal_split(n)).delta_phi_squared
            n_o = n_opa(r)
            worst = max(worst, abs(got * n_o * (n_o + 2) * n - 1))
    report(3, worst <= 1e-9, f"max relative deviation over 50 points = {worst:.3e} (tol 1e-9)")


def test_4_oracle_equivalence(report):
    records = oracle_campaign(ORACLE_GRID)
    dev = max(max(rec.deviations.values()) for rec in records)
    deficit = max(rec.truncation_deficit for rec in records)
    ok = len(records) == 81 and dev <= 1e-6 and deficit < 1e-8
    report(4, ok, f"{len(records)} points, max relative deviation = {dev:.3e} (tol 1e-6), max deficit = {deficit:.2e} (tol 1e-8)")


def test_5_ligo(report):
    rep = ligo_report(3.0, 1e23)
    checks = {
        "required_n_coh": (rep.required_n_coh, 2.5e18, 0.02),
        "intensity_reduction_factor": (rep.intensity_reduction_factor, 4e4, 0.02),
        "sensitivity_gain_factor": (rep.sensitivity_gain_factor, 200.0, 0.02),
        "vacuum_equivalent_gain": (rep.vacuum_equivalent_gain, 13.6, 0.005),
    }
    ok = all(abs(v / ref - 1) <= tol for v, ref, tol in checks.values())
    report(5, ok, ", ".join(f"{k} = {v:.5g}" for k, (v, _, _) in checks.items()))


def test_6_fig3_minima_decrease(report):
    minima = fig3_minima((0.5, 1.0, 1.5))
    values = [m[2] for m in minima]
    inside = all(0 < m[1] < np.pi for m in minima)
    ok = inside and values[0] > values[1] > values[2]
    report(6, ok, "; ".join(f"r={r}: min {v:.5g} at phi={p:.4g}" for r, p, v in minima))


def test_7_fig4_ordering(report):
    grid = np.linspace(0.5, 3.0, 251)
    curves = {}
    for p in fig4_curves(grid):
        curves.setdefault(p.scheme, []).append(p.delta_phi)
    clb, sq, pump = (np.array(curves[s]) for s in (Scheme.CLB, Scheme.SQUEEZED_MZI, Scheme.COHERENT_MZI))
    bad_low, bad_high = grid[clb >= sq], grid[sq >= pump]
    at_zero = {p.scheme: p.delta_phi for p in fig4_curves([0.0])}
    coincide = np.isclose(at_zero[Scheme.SQUEEZED_MZI], at_zero[Scheme.COHERENT_MZI], rtol=1e-14)
    ok = bad_low.size == 0 and bad_high.size == 0 and coincide
    detail = (f"clb < squeezed violated on {bad_low.size}/{grid.size} points"
              + (f" (r in [{bad_low.min():.3f}, {bad_low.max():.3f}])" if bad_low.size else "")
              + f", squeezed < pump-boosted violated on {bad_high.size}/{grid.size}, r=0 coincidence {bool(coincide)}")
    report(7, ok, detail)


def test_8_reconciliation_campaign(report):
    out = io.StringIO()
    code = main(["validate"], out=out)
    summary = json.loads(out.getvalue().strip().split("\n")[-1])
    r1 = next(v for v in summary["vacuum_ratios"] if v["r"] == 1.0)
    definitive = summary["kind"] == "summary" and summary["selected_variant"] is not None and summary["wide_points"] > 0
    ok = code == 0 and definitive
    report(8, ok, f"exit {code}, selected variant: {summary['selected_variant']}, "
                  f"printed/algebra at r=1: {r1['measured_factor']:.6g} vs mu^4 nu^4 = {r1['mu4nu4']:.6g}")


def _random_expr(rng, max_degree, max_terms=4):
    terms = {}
    for _ in range(rng.integers(1, max_terms + 1)):
        cuts = np.sort(rng.integers(0, rng.integers(0, max_degree + 1) + 1, size=3))
        total = cuts[-1] if cuts.size else 0
        key = (int(cuts[0]), int(cuts[1] - cuts[0]), int(cuts[2] - cuts[1]), int(rng.integers(0, max_degree - total + 1)))
        terms[key] = complex(rng.normal(), rng.normal())
    return LadderExpr(terms)


def test_9_algebra_kernel_properties(report):
    rng = np.random.default_rng(20261015)
    cases, failures = 0, []
    for i in range(2500):
        x = _random_expr(rng, 4)
        cases += 1
        if not (x.canonicalize() == x and x.canonicalize().canonicalize() == x.canonicalize()):
            failures.append(("canonicalize", i))
    for i in range(2500):
        x = _random_expr(rng, 4)
        cases += 1
        if x.adjoint().adjoint() != x:
            failures.append(("adjoint", i))
    for i in range(2500):
        # degrees 4, 2, 2 keep the triple product within the degree cap
        x, y, z = _random_expr(rng, 4), _random_expr(rng, 2), _random_expr(rng, 2)
        w = _random_expr(rng, 4)
        cases += 1
        if not (((x * y) * z).isclose(x * (y * z)) and (w * (y + z)).isclose(w * y + w * z)
                and ((y + z) * w).isclose(y * w + z * w)):
            failures.append(("ring", i))
    cutoff = 20
    cols = low_occupation_indices(cutoff, cutoff - 8)
    for i in range(2500):
        x, y = _random_expr(rng, 4), _random_expr(rng, 4)
        cases += 1
        lhs = ladder_expr_matrix(x * y, cutoff)[:, cols].toarray()
        rhs = (ladder_expr_matrix(x, cutoff) @ ladder_expr_matrix(y, cutoff))[:, cols].toarray()
        if not np.allclose(lhs, rhs, rtol=1e-10, atol=1e-10 * max(1.0, np.abs(rhs).max())):
            failures.append(("homomorphism", i))
    ok = cases == 10_000 and not failures
    report(9, ok, f"{cases} randomized cases, {len(failures)} failures" + (f" first: {failures[0]}" if failures else ""))
