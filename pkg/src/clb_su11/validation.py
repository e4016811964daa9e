"""Grid evaluation, figure data and the cross-path validation campaign."""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from . import schemes
from .fock import TruncationError, oracle_mean_derivative, simulate_chain_adaptive
from .sensitivity import (
    KLAUDER_PHI,
    PRINTED_VARIANT,
    RECONCILED_VARIANT,
    ClosedFormVariant,
    CoherentInput,
    SensitivityPoint,
    closed_form_variant,
    klauder_limit,
    moments,
    n_opa,
    phase_sensitivity,
    simple_sensitivity,
)

__all__ = [
    "METHODS",
    "GRID_CAP",
    "Grid",
    "SweepSpec",
    "evaluate",
    "sweep",
    "fig2_data",
    "fig3_data",
    "fig3_minima",
    "fig4_data",
    "ValidationRecord",
    "ValidationSummary",
    "ORACLE_GRID",
    "WIDE_GRID",
    "oracle_campaign",
    "vacuum_ratio_campaign",
    "reconciliation_campaign",
    "run_validation",
]

METHODS = ("algebra", "oracle", "printed", "reconciled", "simple")
GRID_CAP = 10**6

CANDIDATE_VARIANTS = tuple(ClosedFormVariant(p, e) for p in ("numerator", "denominator") for e in (2, 1))


@dataclass(frozen=True)
class Grid:
    """Linear grid ``start..stop`` with ``count`` points (``count == 1`` gives ``start``)."""

    start: float
    stop: float
    count: int = 1

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("grid count must be >= 1")
        if self.start > self.stop:
            raise ValueError(f"grid start {self.start} exceeds stop {self.stop}")

    @classmethod
    def point(cls, x: float) -> Grid:
        return cls(x, x, 1)

    def values(self) -> np.ndarray:
        if self.count == 1:
            return np.array([self.start])
        return np.linspace(self.start, self.stop, self.count)


@dataclass(frozen=True)
class SweepSpec:
    r: Grid
    phi: Grid
    theta: Grid = Grid.point(np.pi / 4)
    amp_a: Grid = Grid.point(0.0)
    amp_b: Grid = Grid.point(0.0)
    method: str = "algebra"
    cap: int = GRID_CAP

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; choose from {METHODS}")
        if self.size > self.cap:
            raise ValueError(f"grid has {self.size} points, cap is {self.cap}")

    @property
    def size(self) -> int:
        return self.r.count * self.phi.count * self.theta.count * self.amp_a.count * self.amp_b.count

    def points(self):
        """Grid points in row-major order ``(r, phi, theta, amp_a, amp_b)``."""
        return itertools.product(
            self.r.values(), self.phi.values(), self.theta.values(), self.amp_a.values(), self.amp_b.values()
        )


def evaluate(method: str, r: float, phi: float, theta: float, amp_a: float, amp_b: float) -> dict:
    """One point of any method as a flat record.

    ``truncation_deficit`` is only set for the oracle; ``mean`` and
    ``variance`` are NaN for closed forms that do not provide them.
    """
    r, phi, theta, amp_a, amp_b = map(float, (r, phi, theta, amp_a, amp_b))
    inp = CoherentInput(amp_a, amp_b, theta)
    rec = {"method": method, "r": r, "phi": phi, "theta": theta, "amp_a": amp_a, "amp_b": amp_b}
    nan = float("nan")
    deficit = nan
    if method == "algebra":
        m = moments(r, phi, inp)
        pt = phase_sensitivity(r, phi, inp)
        mean, var = m.mean, m.variance
    elif method == "oracle":
        m = simulate_chain_adaptive(r, phi, inp)
        pt = _point(m.variance, oracle_mean_derivative(r, phi, inp), m.mean)
        mean, var, deficit = m.mean, m.variance, m.truncation_deficit
    elif method in ("printed", "reconciled"):
        variant = PRINTED_VARIANT if method == "printed" else RECONCILED_VARIANT
        pt = closed_form_variant(r, phi, theta, amp_a, amp_b, variant)[0]
        mean, var = nan, nan
    elif method == "simple":
        value = simple_sensitivity(r, inp.n_coh())
        pt = SensitivityPoint(value, nan, nan, not np.isfinite(value))
        mean, var = nan, nan
    else:
        raise ValueError(f"unknown method {method!r}")
    rec.update(
        mean=mean,
        variance=var,
        mean_derivative=pt.mean_derivative,
        delta_phi_squared=pt.delta_phi_squared,
        diverged=pt.diverged,
        truncation_deficit=deficit,
    )
    return rec


def _point(variance: float, derivative: float, mean: float) -> SensitivityPoint:
    # finite-difference noise floor of the oracle slope
    if abs(derivative) < 1e-9 * max(1.0, abs(mean)):
        return SensitivityPoint(np.inf, variance, derivative, True)
    return SensitivityPoint(variance / derivative**2, variance, derivative, False)


def _evaluate_star(args):
    return evaluate(*args)


def sweep(spec: SweepSpec, workers: int = 1) -> list[dict]:
    """Evaluate every grid point; output order is grid order regardless of ``workers``."""
    jobs = [(spec.method, *pt) for pt in spec.points()]
    if workers <= 1:
        return [_evaluate_star(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_evaluate_star, jobs, chunksize=max(1, len(jobs) // (4 * workers))))


# figure data ---------------------------------------------------------------

FIG_PHI = np.linspace(0.0, np.pi, 181)
FIG2_THETA = np.linspace(0.0, np.pi, 61)
FIG3_GAINS = (0.5, 1.0, 1.5)


def _matched_input(r: float, theta: float) -> CoherentInput:
    # coherent flux equal to the OPA's vacuum output, split equally between modes
    return CoherentInput.equal_split(n_opa(r), theta)


def fig2_data(r: float = 0.5, phi=FIG_PHI, theta=FIG2_THETA) -> list[dict]:
    """``delta_phi^2`` over (theta, phi) at gain ``r``; rows ordered theta-major."""
    rows = []
    for th in theta:
        inp = _matched_input(r, th)
        for ph in phi:
            pt = phase_sensitivity(r, ph, inp)
            rows.append({"r": r, "theta": float(th), "phi": float(ph), "n_coh": inp.n_coh(),
                         "delta_phi_squared": pt.delta_phi_squared, "diverged": pt.diverged})
    return rows


def fig3_data(gains=FIG3_GAINS, phi=FIG_PHI, theta: float = np.pi / 4) -> list[dict]:
    rows = []
    for r in gains:
        inp = _matched_input(r, theta)
        for ph in phi:
            pt = phase_sensitivity(r, ph, inp)
            rows.append({"r": float(r), "theta": theta, "phi": float(ph), "n_coh": inp.n_coh(),
                         "delta_phi_squared": pt.delta_phi_squared, "diverged": pt.diverged})
    return rows


def fig3_minima(gains=FIG3_GAINS, theta: float = np.pi / 4, samples: int = 2001) -> list[tuple[float, float, float]]:
    """``(r, phi_min, min delta_phi^2)`` over the open interval ``(0, pi)``.

    A geometric-plus-linear scan finds the basin, then a bounded scalar
    search polishes it.
    """
    out = []
    for r in gains:
        inp = _matched_input(r, theta)
        f = lambda ph: phase_sensitivity(r, ph, inp).delta_phi_squared  # noqa: E731
        scan = np.unique(np.concatenate([np.geomspace(1e-6, 1.0, samples // 2), np.linspace(1e-6, np.pi - 1e-6, samples)]))
        vals = np.array([f(p) for p in scan])
        i = int(np.argmin(vals))
        lo, hi = scan[max(i - 1, 0)], scan[min(i + 1, len(scan) - 1)]
        res = minimize_scalar(f, bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
        best = (res.x, res.fun) if res.fun < vals[i] else (scan[i], vals[i])
        out.append((float(r), float(best[0]), float(best[1])))
    return out


def fig4_data(r_values=None, n_total: float = 1e13, pump_per_pair: float = schemes.PUMP_PER_PAIR) -> list[dict]:
    """Three curves of ``delta_phi`` over the gain; the boosted curve is ``inf`` at ``r = 0``."""
    if r_values is None:
        r_values = np.linspace(0.0, 3.0, 61)
    rows = []
    for p in schemes.fig4_curves(r_values, n_total, pump_per_pair):
        rows.append({"r": p.r, "scheme": p.scheme.value, "delta_phi": p.delta_phi, "photon_budget": p.photon_budget})
    return rows


# validation campaign --------------------------------------------------------

ORACLE_GRID = {
    "r": (0.1, 0.3, 0.5),
    "amp": (0.0, 0.5, 1.0),
    "theta": (0.0, np.pi / 8, np.pi / 4),
    "phi": (0.1, 0.5, 1.0),
}

WIDE_GRID = {
    "r": tuple(np.linspace(0.1, 2.0, 5)),
    "phi": tuple(np.linspace(0.1, np.pi - 0.1, 5)),
    "theta": tuple(np.linspace(0.0, 2 * np.pi, 6, endpoint=False)),
    "amp_a": (0.0, 0.7, 2.0),
    "amp_b": (0.0, 1.3, 2.0),
}


def _rel(x: float, y: float, floor: float = 0.0) -> float:
    scale = max(abs(x), abs(y), floor)
    return 0.0 if scale == 0 else abs(x - y) / scale


@dataclass
class ValidationRecord:
    params: dict
    values: dict
    deviations: dict
    printed_factor: float | None = None
    truncation_deficit: float | None = None


@dataclass
class ValidationSummary:
    oracle_points: int
    max_oracle_deviation: float
    worst_oracle_point: dict | None
    vacuum_ratios: list[dict]
    variant_deviations: dict[str, float]
    matching_variants: list[str]
    wide_points: int
    oracle_tolerance: float
    variant_tolerance: float
    oracle_failures: list[dict] = field(default_factory=list)

    @property
    def selected_variant(self) -> str:
        return self.matching_variants[0] if len(self.matching_variants) == 1 else "none"

    @property
    def passed(self) -> bool:
        return self.max_oracle_deviation <= self.oracle_tolerance and not self.oracle_failures

    def as_dict(self) -> dict:
        d = asdict(self)
        d["selected_variant"] = self.selected_variant
        d["passed"] = self.passed
        return d


def oracle_campaign(grid=ORACLE_GRID) -> list[ValidationRecord]:
    """Algebra path vs truncated-Fock moments; amplitudes applied to both modes."""
    records = []
    for r, amp, theta, phi in itertools.product(grid["r"], grid["amp"], grid["theta"], grid["phi"]):
        inp = CoherentInput(amp, amp, theta)
        alg = moments(r, phi, inp)
        params = {"r": r, "amp_a": amp, "amp_b": amp, "theta": theta, "phi": phi}
        try:
            orc = simulate_chain_adaptive(r, phi, inp)
        except TruncationError as exc:
            records.append(ValidationRecord(params, {"algebra_mean": alg.mean}, {"error": float("inf")}, None, exc.deficit))
            continue
        dev = {
            "mean": _rel(alg.mean, orc.mean),
            "second_moment": _rel(alg.second_moment, orc.second_moment),
            "variance": _rel(alg.variance, orc.variance),
        }
        values = {
            "algebra_mean": alg.mean, "oracle_mean": orc.mean,
            "algebra_variance": alg.variance, "oracle_variance": orc.variance,
            "algebra_second_moment": alg.second_moment, "oracle_second_moment": orc.second_moment,
        }
        records.append(ValidationRecord(params, values, dev, None, orc.truncation_deficit))
    return records


def vacuum_ratio_campaign(r_values=(0.25, 0.5, 1.0, 1.5, 2.0), phi: float = KLAUDER_PHI) -> list[dict]:
    """Printed closed form divided by the algebra path at vacuum input, ``phi -> 0``."""
    vac = CoherentInput.vacuum()
    out = []
    for r in r_values:
        alg = phase_sensitivity(r, phi, vac).delta_phi_squared
        printed = closed_form_variant(r, phi, 0.0, 0.0, 0.0, PRINTED_VARIANT)[0].delta_phi_squared
        mu_nu = np.cosh(r) * np.sinh(r)
        out.append({
            "r": float(r),
            "algebra": float(alg),
            "printed": float(printed),
            "klauder_limit": klauder_limit(r),
            "measured_factor": float(printed / alg),
            "mu4nu4": float(mu_nu**4),
        })
    return out


def reconciliation_campaign(grid=WIDE_GRID, tol: float = 1e-9) -> tuple[dict[str, float], list[str], int]:
    """Max relative deviation of each closed-form variant from the algebra path.

    Returns ``(deviation per variant label, labels within tol, grid size)``.
    """
    worst = {v.label: 0.0 for v in CANDIDATE_VARIANTS}
    n = 0
    for r, phi, theta, aa, ab in itertools.product(grid["r"], grid["phi"], grid["theta"], grid["amp_a"], grid["amp_b"]):
        alg = phase_sensitivity(r, phi, CoherentInput(aa, ab, theta))
        if alg.diverged:
            continue
        n += 1
        for v in CANDIDATE_VARIANTS:
            cf = closed_form_variant(r, phi, theta, aa, ab, v)[0]
            dev = np.inf if cf.diverged else _rel(cf.delta_phi_squared, alg.delta_phi_squared)
            worst[v.label] = max(worst[v.label], dev)
    matching = [k for k, d in worst.items() if d <= tol]
    return worst, matching, n


def run_validation(oracle_grid=ORACLE_GRID, wide_grid=WIDE_GRID, oracle_tol: float = 1e-6, variant_tol: float = 1e-9) -> tuple[ValidationSummary, list[ValidationRecord]]:
    records = oracle_campaign(oracle_grid)
    failures, worst_dev, worst_pt = [], 0.0, None
    for rec in records:
        dev = max(rec.deviations.values())
        if dev > worst_dev or worst_pt is None:
            worst_dev, worst_pt = dev, rec.params
        if dev > oracle_tol:
            failures.append({**rec.params, "deviation": dev})
    ratios = vacuum_ratio_campaign()
    for rec in records:
        p = rec.params
        alg = phase_sensitivity(p["r"], p["phi"], CoherentInput(p["amp_a"], p["amp_b"], p["theta"]))
        printed = closed_form_variant(p["r"], p["phi"], p["theta"], p["amp_a"], p["amp_b"], PRINTED_VARIANT)[0]
        if not alg.diverged and not printed.diverged and alg.delta_phi_squared != 0:
            rec.printed_factor = float(printed.delta_phi_squared / alg.delta_phi_squared)
    deviations, matching, n_wide = reconciliation_campaign(wide_grid, variant_tol)
    summary = ValidationSummary(
        oracle_points=len(records),
        max_oracle_deviation=worst_dev,
        worst_oracle_point=worst_pt,
        vacuum_ratios=ratios,
        variant_deviations=deviations,
        matching_variants=matching,
        wide_points=n_wide,
        oracle_tolerance=oracle_tol,
        variant_tolerance=variant_tol,
        oracle_failures=failures,
    )
    return summary, records
