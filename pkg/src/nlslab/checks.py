"""Regression battery: each check exercises one advertised guarantee.

Every numeric bound comes from the bundled scenario files; nothing is
hard-coded here.  A check reports the worst clause it evaluated as a
(value, bound) pair so the JSON summary stays machine-readable.

Levels: "full" runs the battery at the pinned resolutions and horizons;
"quick" shrinks horizons and cell counts for a fast smoke run while keeping
every structural assertion intact.
"""

import json
import logging
import time
from dataclasses import dataclass

import numpy as np

from .approx_compare import (
    boundedness_verdict,
    difference_series,
    extract_frequencies,
    highfreq_scan,
)
from .dnls_flow import conserved_report, evolve
from .errors import ConfigError
from .field import Potential, StateField
from .frequencies import FOUR_PI_SQ, frequency_pipeline, sum_rule_check
from .psi_normalization import (
    normalization_residual,
    solve_sigma,
    trace_identity_check,
)
from .scenarios import Scenario, bundled_scenario, initial_state
from .zs_spectral import discriminant, periodic_spectrum

logger = logging.getLogger("nlslab")

LEVELS = ("quick", "full")


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    bound: float
    passed: bool
    detail: str
    seconds: float

    def as_dict(self) -> dict:
        return {"name": self.name, "value": self.value, "bound": self.bound,
                "passed": self.passed, "detail": self.detail,
                "seconds": round(self.seconds, 3)}


def _clause(label: str, value: float, bound: float, passed=None) -> tuple:
    if passed is None:
        passed = value < bound
    return (label, float(value), float(bound), bool(passed))


def _combine(name: str, clauses: list, started: float) -> CheckResult:
    detail = "; ".join(f"{c[0]}={c[1]:.6g} (bound {c[2]:.6g})" for c in clauses)
    failed = [c for c in clauses if not c[3]]
    if failed:
        worst = failed[0]
    else:
        worst = max(clauses, key=lambda c: c[1] / c[2] if c[2] > 0 else -np.inf)
    return CheckResult(name=name, value=worst[1], bound=worst[2],
                       passed=not failed, detail=detail,
                       seconds=time.time() - started)


class CheckContext:
    """Shared scenario data and memoized pipelines for one battery run."""

    def __init__(self, level: str = "full"):
        if level not in LEVELS:
            raise ConfigError(f"unknown level {level!r}; expected quick|full")
        self.level = level
        self._cache = {}

    @property
    def quick(self) -> bool:
        return self.level == "quick"

    def _get(self, key, builder):
        if key not in self._cache:
            self._cache[key] = builder()
        return self._cache[key]

    def scenario(self, name: str) -> Scenario:
        return self._get(("scenario", name), lambda: bundled_scenario(name))

    def state(self, name: str) -> StateField:
        return self._get(("state", name),
                         lambda: initial_state(self.scenario(name)))

    def spectrum(self, name: str, K: int, cells: int):
        phi = Potential.from_state(self.state(name))
        return self._get(("spectrum", name, K, cells),
                         lambda: periodic_spectrum(phi, K, cells=cells))

    def pipeline(self, name: str, K: int, cells: int, n_list):
        phi = Potential.from_state(self.state(name))
        key = ("pipeline", name, K, cells, tuple(n_list))
        return self._get(key, lambda: frequency_pipeline(
            phi, K, n_list=list(n_list), cells=cells))

    def trajectory(self, name: str, t_end: float, dt: float, stride: int):
        u0 = self.state(name)
        return self._get(("traj", name, t_end, dt, stride),
                         lambda: evolve(u0, t_end, dt, stride=stride))


def _lambda_grid(K: int, points: int) -> np.ndarray:
    span = (K + 0.5) * np.pi
    return np.linspace(-span, span, points)


def check_zero_potential_exactness(ctx: CheckContext) -> CheckResult:
    """Empty potential: free discriminant, pinned eigenvalues, free frequencies."""
    started = time.time()
    sc = ctx.scenario("zero")
    phi = Potential.from_state(ctx.state("zero"))
    lam = _lambda_grid(sc.K, int(sc.tolerance("lambda_grid_points")))
    d_err = float(np.max(np.abs(discriminant(phi, lam) - 2 * np.cos(lam))))
    gaps, _, table = ctx.pipeline("zero", sc.K, 4 * sc.grid_points,
                                  range(-sc.K, sc.K + 1))
    pins = gaps.index * np.pi
    eig_err = float(max(np.max(np.abs(gaps.lambda_minus - pins)),
                        np.max(np.abs(gaps.lambda_plus - pins))))
    om_err = float(np.max(np.abs(
        table.omega_nls - FOUR_PI_SQ * table.index.astype(float) ** 2)))
    return _combine("zero_potential_exactness", [
        _clause("max|Delta - 2cos|", d_err, sc.tolerance("discriminant_abs")),
        _clause("max|eigenvalue - n pi|", eig_err, sc.tolerance("eigenvalue_abs")),
        _clause("max|omega - 4 pi^2 n^2|", om_err, sc.tolerance("omega_abs")),
    ], started)


def check_constant_closed_forms(ctx: CheckContext) -> CheckResult:
    """Constant a: Delta = 2cos sqrt(lambda^2 - a^2), one open gap, omega_0 = 2a^2."""
    started = time.time()
    sc = ctx.scenario("constant")
    a = float(sc.profile["a"])
    phi = Potential.from_state(ctx.state("constant"))
    lam = _lambda_grid(sc.K, int(sc.tolerance("lambda_grid_points")))
    exact = 2 * np.cos(np.sqrt(lam.astype(complex) ** 2 - a * a))
    d_err = float(np.max(np.abs(discriminant(phi, lam) - exact)))
    gaps, _, table = ctx.pipeline("constant", sc.K, 4 * sc.grid_points, [0])
    g0_err = abs(gaps.gamma_of(0) - 2 * a)
    others = float(np.max(gaps.gamma[gaps.index != 0]))
    om_err = abs(table.omega_of(0) - 2 * a * a)
    return _combine("constant_closed_forms", [
        _clause("max|Delta - closed form|", d_err, sc.tolerance("discriminant_abs")),
        _clause("|gamma_0 - 2a|", g0_err, sc.tolerance("gamma0_abs")),
        _clause("max gamma, n != 0", others, sc.tolerance("closed_gap_abs")),
        _clause("|omega_0 - 2a^2|", om_err, sc.tolerance("omega0_abs")),
    ], started)


def check_plane_wave_frequency(ctx: CheckContext) -> CheckResult:
    """Extracted rotation rate of a e^{2 pi i x} against theory and pipeline."""
    started = time.time()
    sc = ctx.scenario("plane_wave")
    a = float(sc.profile["a"])
    t_end = 10.0 if ctx.quick else sc.t_end
    traj = ctx.trajectory("plane_wave", t_end, sc.dt, sc.stride)
    est = extract_frequencies(traj, sc.tolerance("amplitude_floor"))[1]
    truth = FOUR_PI_SQ + 2 * a * a
    _, _, table = ctx.pipeline("plane_wave", sc.K,
                               int(sc.tolerance("cells")), [-1])
    return _combine("plane_wave_frequency", [
        _clause("extracted vs closed form (rel)", abs(est - truth) / truth,
                sc.tolerance("extracted_rel")),
        _clause("pipeline vs extracted (rel)",
                abs(table.omega_of(-1) - est) / abs(est),
                sc.tolerance("pipeline_rel")),
    ], started)


def check_solver_structure(ctx: CheckContext) -> CheckResult:
    """Conservation drift, second-order energy error, exact time reversal."""
    started = time.time()
    sc = ctx.scenario("two_mode")
    u0 = ctx.state("two_mode")
    dt = sc.tolerance("structure_dt")
    t_end = sc.tolerance("structure_t_end")
    if ctx.quick:
        dt, t_end = 2e-4, 5.0
    stride = max(1, round(t_end / dt / 100))
    traj = evolve(u0, t_end, dt, stride=stride)
    rep = conserved_report(traj)
    rep_half = conserved_report(evolve(u0, t_end, dt / 2, stride=2 * stride))
    ratio = float(np.max(rep.energy_drift) / np.max(rep_half.energy_drift))
    back = evolve(traj.final_state, -t_end, dt, stride=10 ** 9)
    rt_err = float(np.sqrt(np.sum(np.abs(back.final_state.modes - u0.modes) ** 2)))
    lo, hi = sc.tolerance("energy_ratio_lo"), sc.tolerance("energy_ratio_hi")
    return _combine("solver_structure", [
        _clause("max relative L2 drift", rep.max_relative_l2_drift(),
                sc.tolerance("l2_drift_rel")),
        _clause("energy drift ratio on dt halving", ratio, hi,
                passed=lo < ratio < hi),
        _clause("round trip H0 error", rt_err, sc.tolerance("roundtrip_abs")),
    ], started)


def check_normalization_certificate(ctx: CheckContext) -> CheckResult:
    """Zero-mean contour conditions, trace identity, contour-radius stability."""
    started = time.time()
    sc = ctx.scenario("two_mode")
    cells = 512 if ctx.quick else int(sc.tolerance("compare_cells"))
    gaps = ctx.spectrum("two_mode", sc.K, cells)
    targets = sorted(set(gaps.open_indices()) | {0})
    factor = sc.tolerance("contour_factor")
    res_max = trace_max = shift_max = 0.0
    for n in targets:
        sig = solve_sigma(gaps, n)
        res_max = max(res_max, max(abs(r) for r in sig.residuals.values()))
        trace_max = max(trace_max, trace_identity_check(gaps, sig))
        for m in set(sig.open_ks()) | {n}:
            base = normalization_residual(gaps, sig, m)
            moved = normalization_residual(gaps, sig, m, radius_factor=factor)
            shift_max = max(shift_max, abs(moved - base))
    return _combine("normalization_certificate", [
        _clause("max post-solve residual", res_max,
                sc.tolerance("normalization_abs")),
        _clause("max trace identity defect", trace_max,
                sc.tolerance("trace_identity_abs")),
        _clause("max residual change under radius shift", shift_max,
                sc.tolerance("contour_shift_abs")),
    ], started)


def _rho_profile(ctx: CheckContext, K: int, cells: int, ns: range):
    _, sigmas, table = ctx.pipeline("two_mode", K, cells, ns)
    rho = np.array([abs(table.row(n)["rho"]) for n in ns])
    slope = float(np.polyfit(np.log(list(ns)), np.log(rho), 1)[0])
    wmax = float(max((1 + n) * r for n, r in zip(ns, rho)))
    return sigmas, slope, wmax


def check_frequency_decay(ctx: CheckContext) -> CheckResult:
    """Renormalized frequencies fall off; the weighted sup is resolution-stable."""
    started = time.time()
    sc = ctx.scenario("two_mode")
    n_lo = int(sc.tolerance("rho_n_lo"))
    n_hi = 12 if ctx.quick else int(sc.tolerance("rho_n_hi"))
    K = 16 if ctx.quick else int(sc.tolerance("rho_K"))
    coarse = 1024 if ctx.quick else int(sc.tolerance("cells_coarse"))
    fine = 2048 if ctx.quick else int(sc.tolerance("cells_fine"))
    ns = range(n_lo, n_hi + 1)
    _, _, wmax_c = _rho_profile(ctx, K, coarse, ns)
    _, slope, wmax_f = _rho_profile(ctx, K, fine, ns)
    rel = abs(wmax_c - wmax_f) / wmax_f
    return _combine("frequency_decay", [
        _clause("log-log slope of |rho_n|", slope,
                sc.tolerance("rho_slope_max"),
                passed=slope <= sc.tolerance("rho_slope_max")),
        _clause("max (1+n)|rho_n|", wmax_f, sc.tolerance("rho_weighted_max")),
        _clause("resolution disagreement (rel)", rel,
                sc.tolerance("rho_resolution_rel")),
    ], started)


def _compare_setup(ctx: CheckContext):
    sc = ctx.scenario("two_mode")
    t_end = 10.0 if ctx.quick else sc.t_end
    dt = 5e-4 if ctx.quick else sc.dt
    stride = 40 if ctx.quick else sc.stride
    traj = ctx.trajectory("two_mode", t_end, dt, stride)
    cells = 512 if ctx.quick else int(sc.tolerance("compare_cells"))
    u0 = ctx.state("two_mode")
    carried = [-int(n) for n in u0.grid.mode_numbers if abs(u0.mode(int(n))) > 0]
    _, _, table = ctx.pipeline("two_mode", sc.K, cells, sorted(carried))
    return sc, traj, table


def check_nearly_linear_bounded(ctx: CheckContext) -> CheckResult:
    """The mode-rotation reference tracks u: difference sup stays flat."""
    started = time.time()
    sc, traj, table = _compare_setup(ctx)
    s = max(sc.s_values)
    verd = boundedness_verdict(difference_series(traj, "v", s, table),
                               slope_fraction=sc.tolerance("slope_fraction"))
    span = float(np.max(np.abs(traj.times)))
    return _combine("nearly_linear_bounded", [
        _clause(f"|slope|*span, H^{s:g} sup {verd.sup:.6g}",
                abs(verd.slope) * span,
                sc.tolerance("slope_fraction") * verd.sup,
                passed=verd.bounded),
    ], started)


def check_modified_free_linear(ctx: CheckContext) -> CheckResult:
    """u - w grows at most linearly; its (1+t)-ratio peaks early."""
    started = time.time()
    sc, traj, _ = _compare_setup(ctx)
    dw = difference_series(traj, "w", max(sc.s_values))
    ratio = dw.values / (1.0 + np.abs(traj.times))
    running = np.maximum.accumulate(ratio)
    late = np.abs(traj.times) >= 5.0
    growth = float(running[-1] - running[late][0]) if np.any(late) else 0.0
    return _combine("modified_free_linear", [
        _clause("max ||u-w|| / (1+t)", float(np.max(ratio)),
                sc.tolerance("linear_bound_constant")),
        _clause("running-max growth past t=5", growth, 0.0,
                passed=growth <= 0.0),
    ], started)


def check_fractional_norm_bounded(ctx: CheckContext) -> CheckResult:
    """A fractional Sobolev norm of u stays bounded along the flow."""
    started = time.time()
    sc, traj, _ = _compare_setup(ctx)
    s = min(sc.s_values)
    verd = boundedness_verdict(difference_series(traj, "none", s),
                               slope_fraction=sc.tolerance("slope_fraction"))
    span = float(np.max(np.abs(traj.times)))
    return _combine("fractional_norm_bounded", [
        _clause(f"|slope|*span, H^{s:g} sup {verd.sup:.6g}",
                abs(verd.slope) * span,
                sc.tolerance("slope_fraction") * verd.sup,
                passed=verd.bounded),
    ], started)


def check_highfreq_shift(ctx: CheckContext) -> CheckResult:
    """Pushing the profile to higher base modes shrinks the tracking error."""
    started = time.time()
    sc = ctx.scenario("highfreq")
    p = sc.profile
    ls = p["L_values"][:2] if ctx.quick else p["L_values"]
    profile = ctx.state("highfreq")
    reports, _ = highfreq_scan(profile, ls, epsilon=p["epsilon"], M=p["M"],
                               T=p["T"], s=p["s"], dt=sc.dt, stride=sc.stride)
    sups = [r.sup_u_minus_v for r in reports]
    ratios = [b / a for a, b in zip(sups, sups[1:])]
    detail_sups = ", ".join(f"L={r.L}: {r.sup_u_minus_v:.3e}" for r in reports)
    return _combine("highfreq_shift", [
        _clause(f"max successive sup ratio [{detail_sups}]",
                max(ratios), 1.0),
    ], started)


def check_half_window_sum_rule(ctx: CheckContext) -> CheckResult:
    """Open gaps below half the index reconstruct the pair integral."""
    started = time.time()
    sc = ctx.scenario("two_mode")
    n_lo = int(sc.tolerance("rho_n_lo"))
    n_hi = 12 if ctx.quick else int(sc.tolerance("rho_n_hi"))
    K = 16 if ctx.quick else int(sc.tolerance("rho_K"))
    fine = 2048 if ctx.quick else int(sc.tolerance("cells_fine"))
    ns = range(n_lo, n_hi + 1)
    gaps, sigmas, _ = ctx.pipeline("two_mode", K, fine, ns)
    phi = Potential.from_state(ctx.state("two_mode"))
    worst = max(sum_rule_check(gaps, sigmas[n], n, phi) for n in ns)
    return _combine("half_window_sum_rule", [
        _clause("max n*|half-window sum - pair integral|", worst,
                sc.tolerance("sum_rule_max")),
    ], started)


BATTERY = (
    check_zero_potential_exactness,
    check_constant_closed_forms,
    check_plane_wave_frequency,
    check_solver_structure,
    check_normalization_certificate,
    check_frequency_decay,
    check_nearly_linear_bounded,
    check_modified_free_linear,
    check_fractional_norm_bounded,
    check_highfreq_shift,
    check_half_window_sum_rule,
)


def check_names() -> list:
    return [fn.__name__.removeprefix("check_") for fn in BATTERY]


def run_battery(level: str = "full", names=None) -> list:
    """Run the battery (or the named subset, in battery order)."""
    wanted = set(check_names() if names is None else names)
    unknown = wanted - set(check_names())
    if unknown:
        raise ConfigError(f"unknown check(s): {', '.join(sorted(unknown))}")
    ctx = CheckContext(level)
    results = []
    for fn in BATTERY:
        name = fn.__name__.removeprefix("check_")
        if name not in wanted:
            continue
        result = fn(ctx)
        logger.info("%-28s %s  value=%.6g bound=%.6g  (%.1fs)", name,
                    "pass" if result.passed else "FAIL", result.value,
                    result.bound, result.seconds)
        results.append(result)
    return results


def summary_dict(results: list, level: str) -> dict:
    return {
        "level": level,
        "passed": all(r.passed for r in results),
        "checks": [r.as_dict() for r in results],
    }


def write_checks_json(results: list, level: str, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(summary_dict(results, level), fh, indent=2)
        fh.write("\n")
