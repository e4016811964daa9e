"""Command-line front end.

Subcommands: compute, sweep, figure {fig2,fig3,fig4}, validate, ligo.

Exit codes: 0 success, 1 usage error, 2 computation-domain error,
3 validation-tolerance failure.

Option defaults may be overridden by environment variables named
``CLB_<OPTION>`` (e.g. ``CLB_METHOD=oracle``, ``CLB_WORKERS=4``); explicit
flags always win.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys

import numpy as np

from . import __version__
from .fock import TruncationError
from .schemes import PUMP_PER_PAIR, ligo_report
from .validation import (
    METHODS,
    Grid,
    SweepSpec,
    evaluate,
    fig2_data,
    fig3_data,
    fig4_data,
    run_validation,
    sweep,
)

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_VALIDATION = 0, 1, 2, 3

RECORD_COLUMNS = [
    ("r", "r"),
    ("phi", "phi_rad"),
    ("theta", "theta_rad"),
    ("amp_a", "amp_a_sqrt_photons"),
    ("amp_b", "amp_b_sqrt_photons"),
    ("mean", "mean_photons"),
    ("variance", "variance_photons2"),
    ("mean_derivative", "mean_derivative_photons_per_rad"),
    ("delta_phi_squared", "delta_phi_squared_rad2"),
    ("diverged", "diverged"),
    ("truncation_deficit", "truncation_deficit"),
]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def fmt_float(x) -> str:
    """17 significant digits in scientific notation; ``inf``/``nan`` spelled out."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.16e}"


def _scalar_json(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if v is None:
        return "null"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return fmt_float(v) if math.isfinite(v) else "null"
    if isinstance(v, str):
        import json

        return json.dumps(v)
    raise TypeError(f"cannot serialise {type(v).__name__}")


def to_json(obj) -> str:
    """Deterministic JSON: sorted keys, fixed float format, non-finite floats as null."""
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{_scalar_json(str(k))}: {to_json(v)}" for k, v in sorted(obj.items())) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(to_json(v) for v in obj) + "]"
    return _scalar_json(obj)


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating, int, np.integer)) and not isinstance(v, bool):
        return fmt_float(v)
    return str(v)


def write_csv(rows: list[dict], columns: list[tuple[str, str]], out) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([header for _, header in columns])
    for row in rows:
        w.writerow([_cell(row[key]) for key, _ in columns])
    out.write(buf.getvalue())


def _env(name: str, default):
    raw = os.environ.get(f"CLB_{name.upper()}")
    if raw is None:
        return default
    return type(default)(raw) if default is not None else raw


def parse_grid(text: str) -> Grid:
    """``x`` for a single value or ``start:stop:count``."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return Grid.point(float(parts[0]))
        if len(parts) == 3:
            return Grid(float(parts[0]), float(parts[1]), int(parts[2]))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc
    raise argparse.ArgumentTypeError(f"expected 'x' or 'start:stop:count', got {text!r}")


def _with_meta(record: dict) -> dict:
    return {**record, "tool_version": __version__}


def cmd_compute(args, out) -> int:
    amp_a, amp_b = args.amp_a, args.amp_b
    if args.n_coh is not None:
        amp_a = amp_b = math.sqrt(args.n_coh / 2)
    rec = evaluate(args.method, args.r, args.phi, args.theta, amp_a, amp_b)
    out.write(to_json(_with_meta(rec)) + "\n")
    return EXIT_OK


def cmd_sweep(args, out) -> int:
    try:
        spec = SweepSpec(args.r, args.phi, args.theta, args.amp_a, args.amp_b, args.method)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    rows = sweep(spec, workers=args.workers)
    write_csv(rows, RECORD_COLUMNS, out)
    return EXIT_OK


FIGURE_COLUMNS = {
    "fig2": [("r", "r"), ("theta", "theta_rad"), ("phi", "phi_rad"), ("n_coh", "n_coh_photons"),
             ("delta_phi_squared", "delta_phi_squared_rad2"), ("diverged", "diverged")],
    "fig4": [("r", "r"), ("scheme", "scheme"), ("delta_phi", "delta_phi_rad"), ("photon_budget", "photon_budget_photons")],
}
FIGURE_COLUMNS["fig3"] = FIGURE_COLUMNS["fig2"]


def cmd_figure(args, out) -> int:
    if args.name == "fig2":
        rows = fig2_data()
    elif args.name == "fig3":
        rows = fig3_data()
    else:
        rows = fig4_data(pump_per_pair=args.pump_per_pair)
    write_csv(rows, FIGURE_COLUMNS[args.name], out)
    return EXIT_OK


def cmd_validate(args, out) -> int:
    summary, records = run_validation(oracle_tol=args.oracle_tol, variant_tol=args.variant_tol)
    if args.records:
        for rec in records:
            out.write(to_json(_with_meta({"kind": "record", "method": "algebra-vs-oracle", **vars(rec)})) + "\n")
    out.write(to_json(_with_meta({"kind": "summary", "method": "validate", **summary.as_dict()})) + "\n")
    if not summary.passed:
        sys.stderr.write(f"validation failed: worst point {summary.worst_oracle_point} deviation {summary.max_oracle_deviation:.3e}\n")
        return EXIT_VALIDATION
    return EXIT_OK


def cmd_ligo(args, out) -> int:
    report = ligo_report(args.r, args.n_ligo)
    out.write(to_json(_with_meta({"method": "ligo", **report.as_dict()})) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="clb-su11", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("compute", help="one point, JSON record")
    p.add_argument("--method", choices=METHODS, default=_env("method", "algebra"))
    p.add_argument("--r", type=float, default=_env("r", 1.0), help="OPA gain")
    p.add_argument("--phi", type=float, default=_env("phi", 0.0), help="probe phase [rad]")
    p.add_argument("--theta", type=float, default=_env("theta", math.pi / 4), help="input phase [rad]")
    p.add_argument("--amp-a", type=float, default=_env("amp_a", 0.0), help="|alpha|")
    p.add_argument("--amp-b", type=float, default=_env("amp_b", 0.0), help="|beta|")
    p.add_argument("--n-coh", type=float, default=None, help="total coherent photons, split equally (overrides amps)")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("sweep", help="grid evaluation, CSV; grids as 'x' or 'start:stop:count'")
    p.add_argument("--method", choices=METHODS, default=_env("method", "algebra"))
    p.add_argument("--r", type=parse_grid, default=parse_grid(_env("r", "1.0")))
    p.add_argument("--phi", type=parse_grid, default=parse_grid(_env("phi", "0.1:3.0:30")))
    p.add_argument("--theta", type=parse_grid, default=parse_grid(_env("theta", str(math.pi / 4))))
    p.add_argument("--amp-a", type=parse_grid, default=parse_grid(_env("amp_a", "0.0")))
    p.add_argument("--amp-b", type=parse_grid, default=parse_grid(_env("amp_b", "0.0")))
    p.add_argument("--workers", type=int, default=_env("workers", 1))
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("figure", help="figure data as CSV")
    p.add_argument("name", choices=("fig2", "fig3", "fig4"))
    p.add_argument("--pump-per-pair", type=float, default=_env("pump_per_pair", PUMP_PER_PAIR))
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("validate", help="algebra vs oracle and closed-form reconciliation")
    p.add_argument("--oracle-tol", type=float, default=_env("oracle_tol", 1e-6))
    p.add_argument("--variant-tol", type=float, default=_env("variant_tol", 1e-9))
    p.add_argument("--records", action="store_true", help="also emit one JSON line per oracle point")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("ligo", help="photon-budget report against a shot-noise-limited reference")
    p.add_argument("--r", type=float, default=_env("r", 3.0))
    p.add_argument("--n-ligo", type=float, default=_env("n_ligo", 1e23))
    p.set_defaults(func=cmd_ligo)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        parser = build_parser()
    except (ValueError, argparse.ArgumentTypeError) as exc:  # malformed CLB_* environment value
        sys.stderr.write(f"clb-su11: error: {exc}\n")
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except UsageError as exc:
        sys.stderr.write(f"clb-su11: error: {exc}\n")
        return EXIT_USAGE
    except (TruncationError, ValueError, OverflowError) as exc:
        sys.stderr.write(f"clb-su11: {exc}\n")
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
