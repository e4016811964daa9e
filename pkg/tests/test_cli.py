import io
import json
import subprocess
import sys

import pytest

from clb_su11 import __version__
from clb_su11.cli import EXIT_DOMAIN, EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, fmt_float, main, parse_grid, to_json


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def record(*argv):
    code, text = run(*argv)
    assert code == EXIT_OK
    return json.loads(text)


class TestFormatting:
    @pytest.mark.parametrize("x,expected", [(1.0, "1.0000000000000000e+00"), (-0.375, "-3.7500000000000000e-01"),
                                            (float("inf"), "inf"), (float("nan"), "nan")])
    def test_fmt_float(self, x, expected):
        assert fmt_float(x) == expected

    def test_json_sorted_and_null_for_nonfinite(self):
        assert to_json({"b": 1.0, "a": float("inf"), "c": [True, None, "x"]}) == (
            '{"a": null, "b": 1.0000000000000000e+00, "c": [true, null, "x"]}'
        )

    @pytest.mark.parametrize("text,values", [("0.5", [0.5]), ("0:1:3", [0, 0.5, 1])])
    def test_parse_grid(self, text, values):
        assert list(parse_grid(text).values()) == values


class TestCompute:
    def test_klauder(self):
        rec = record("compute", "--method", "algebra", "--r", "1", "--phi", "1e-4", "--amp-a", "0", "--amp-b", "0")
        assert rec["delta_phi_squared"] == pytest.approx(0.07602, rel=1e-4)
        assert rec["method"] == "algebra" and rec["tool_version"] == __version__

    def test_simple_ligo(self):
        rec = record("compute", "--method", "simple", "--r", "3", "--n-coh", "2.458e18")
        assert rec["delta_phi_squared"] == pytest.approx(1.0e-23, rel=1e-3)
        assert rec["amp_a"] == rec["amp_b"]

    def test_zero_gain_diverged(self):
        rec = record("compute", "--method", "algebra", "--r", "0", "--phi", "1")
        assert rec["diverged"] is True
        assert rec["delta_phi_squared"] is None

    def test_oracle_records_deficit(self):
        rec = record("compute", "--method", "oracle", "--r", "0.3", "--phi", "0.7", "--amp-a", "0.5", "--amp-b", "0.5")
        assert 0 <= rec["truncation_deficit"] < 1e-8

    def test_oracle_domain_error(self):
        code, _ = run("compute", "--method", "oracle", "--r", "0.3", "--amp-a", "5")
        assert code == EXIT_DOMAIN

    def test_negative_amplitude_is_domain_error(self):
        assert run("compute", "--amp-a", "-1")[0] == EXIT_DOMAIN


class TestUsage:
    @pytest.mark.parametrize("argv", [[], ["compute", "--bogus"], ["compute", "--method", "magic"], ["figure", "fig9"],
                                      ["sweep", "--r", "1:2"]])
    def test_usage_errors(self, argv, capsys):
        assert run(*argv)[0] == EXIT_USAGE

    def test_reversed_grid(self, capsys):
        assert run("sweep", "--r", "2:1:3")[0] == EXIT_USAGE

    def test_grid_cap(self, capsys):
        assert run("sweep", "--r", "0:1:1000", "--phi", "0:1:1001")[0] == EXIT_USAGE


class TestEnvironment:
    def test_env_default(self, monkeypatch):
        monkeypatch.setenv("CLB_R", "0.5")
        assert record("compute", "--phi", "0.3")["r"] == 0.5

    def test_flag_beats_env(self, monkeypatch):
        monkeypatch.setenv("CLB_R", "0.5")
        assert record("compute", "--r", "0.7", "--phi", "0.3")["r"] == 0.7

    def test_env_method(self, monkeypatch):
        monkeypatch.setenv("CLB_METHOD", "reconciled")
        assert record("compute", "--phi", "0.3", "--amp-a", "1")["method"] == "reconciled"

    def test_malformed_env(self, monkeypatch, capsys):
        monkeypatch.setenv("CLB_R", "abc")
        assert run("compute")[0] == EXIT_USAGE


class TestSweep:
    def test_csv_header_and_rows(self):
        code, text = run("sweep", "--r", "0.5:1.0:2", "--phi", "0.1:0.2:3", "--amp-a", "1")
        assert code == EXIT_OK
        lines = text.split("\n")
        assert lines[0].startswith("r,phi_rad,theta_rad,amp_a_sqrt_photons")
        assert "delta_phi_squared_rad2" in lines[0]
        assert len([x for x in lines if x]) == 1 + 6
        assert "\r" not in text

    def test_workers_do_not_change_output(self):
        argv = ("sweep", "--r", "0.2:1.0:4", "--phi", "0.1:2.0:5", "--amp-b", "0:1:2")
        assert run(*argv, "--workers", "1")[1] == run(*argv, "--workers", "3")[1]


class TestFigure:
    @pytest.mark.parametrize("name,header", [("fig3", "r,theta_rad,phi_rad,n_coh_photons,delta_phi_squared_rad2,diverged"),
                                             ("fig4", "r,scheme,delta_phi_rad,photon_budget_photons")])
    def test_headers(self, name, header):
        code, text = run("figure", name)
        assert code == EXIT_OK
        assert text.split("\n")[0] == header

    def test_fig4_zero_gain(self):
        rows = run("figure", "fig4")[1].split("\n")[1:4]
        assert any(r.startswith("0.0000000000000000e+00,clb,inf") for r in rows)

    def test_pump_per_pair_flag(self):
        assert run("figure", "fig4")[1] != run("figure", "fig4", "--pump-per-pair", "1e11")[1]


class TestLigoAndValidate:
    def test_ligo(self):
        rec = record("ligo")
        assert rec["required_n_coh_photons_per_s"] == pytest.approx(2.4577e18, rel=1e-4)
        assert rec["vacuum_equivalent_gain"] == pytest.approx(13.59, abs=5e-3)
        assert rec["method"] == "ligo" and "assumption" in rec

    def test_ligo_domain_error(self):
        assert run("ligo", "--r", "0")[0] == EXIT_DOMAIN

    def test_validate_summary(self):
        code, text = run("validate")
        assert code == EXIT_OK
        summary = json.loads(text.strip().split("\n")[-1])
        assert summary["kind"] == "summary" and summary["passed"] is True
        assert summary["selected_variant"] == "prefactor=denominator,psi_exponent=1"
        assert summary["max_oracle_deviation"] < 1e-6
        r1 = next(v for v in summary["vacuum_ratios"] if v["r"] == 1.0)
        assert r1["measured_factor"] == pytest.approx(r1["mu4nu4"], rel=1e-6)

    def test_validate_tolerance_failure(self, capsys):
        assert run("validate", "--oracle-tol", "1e-20")[0] == EXIT_VALIDATION
        assert "worst point" in capsys.readouterr().err


def test_byte_identical_subprocess_runs():
    argv = [sys.executable, "-m", "clb_su11", "sweep", "--r", "0.3:1.2:3", "--phi", "0.2:1.0:3", "--amp-a", "0.7"]
    first = subprocess.run(argv, capture_output=True, check=True).stdout
    second = subprocess.run(argv, capture_output=True, check=True).stdout
    assert first == second and first.startswith(b"r,phi_rad")
