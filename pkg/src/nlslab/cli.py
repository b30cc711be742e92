"""Command line front end.

Every subcommand reads a scenario (a JSON file path or a bundled name),
writes delimited output plus a rendered figure into --out, and prints a one
line summary.  `checks` runs the regression battery and is the only command
whose exit code reflects a verdict: 0 when every check passes, 1 otherwise.
Configuration problems exit with 2 and a diagnostic on stderr.
"""

import argparse
import json
import logging
import sys
from pathlib import Path

from . import report
from .approx_compare import (boundedness_verdict, difference_series,
                             extract_frequencies, highfreq_scan,
                             write_norm_series_csv)
from .checks import LEVELS, run_battery, write_checks_json
from .dnls_flow import conserved_report, evolve, write_conserved_csv, \
    write_trajectory_csv
from .errors import ConfigError, NlsLabError
from .field import Potential, _format_float, write_field_csv
from .frequencies import frequency_pipeline, write_frequency_csv
from .psi_normalization import solve_sigma, trace_identity_check, \
    write_sigma_csv
from .scenarios import bundled_names, bundled_scenario, initial_state, \
    load_scenario
from .zs_spectral import periodic_spectrum, write_gap_csv

logger = logging.getLogger("nlslab")


def _load_config(value: str):
    path = Path(value)
    if path.suffix == ".json" or path.exists():
        return load_scenario(path)
    if value in bundled_names():
        return bundled_scenario(value)
    raise ConfigError(
        f"--config {value!r} is neither a scenario file nor a bundled name "
        f"({', '.join(bundled_names())})")


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _scenario_trajectory(sc):
    return evolve(initial_state(sc), sc.t_end, sc.dt, stride=sc.stride)


# ---- subcommands ----------------------------------------------------------------


def cmd_simulate(args) -> int:
    sc = _load_config(args.config)
    out = _out_dir(args)
    traj = _scenario_trajectory(sc)
    conserved = conserved_report(traj)
    write_trajectory_csv(traj, out / "trajectory.csv")
    write_conserved_csv(conserved, out / "conserved.csv")
    write_field_csv(traj.final_state, out / "final_field.csv")
    report.conserved_figure(conserved, out / "conserved.png")
    summary = {
        "scenario": sc.name,
        "samples": len(traj.times),
        "t_end": sc.t_end,
        "max_relative_l2_drift": conserved.max_relative_l2_drift(),
        "max_energy_drift": float(max(abs(conserved.energy_drift))),
    }
    with open(out / "run.json", "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
    print(f"simulate {sc.name}: {summary['samples']} samples, "
          f"relative L2 drift {summary['max_relative_l2_drift']:.3e}")
    return 0


def cmd_spectrum(args) -> int:
    sc = _load_config(args.config)
    out = _out_dir(args)
    K = args.K or sc.K
    gaps = periodic_spectrum(Potential.from_state(initial_state(sc)), K)
    write_gap_csv(gaps, out / "gaps.csv")
    report.gap_figure(gaps, out / "gaps.png")
    print(f"spectrum {sc.name}: K={K}, {len(gaps.open_indices())} open gaps")
    return 0


def cmd_sigma(args) -> int:
    sc = _load_config(args.config)
    out = _out_dir(args)
    K = args.K or sc.K
    gaps = periodic_spectrum(Potential.from_state(initial_state(sc)), K)
    sig = solve_sigma(gaps, args.n)
    write_sigma_csv(sig, out / f"sigma_{args.n}.csv")
    report.sigma_figure(sig, out / f"sigma_{args.n}.png")
    print(f"sigma {sc.name}: n={args.n}, residual {sig.max_residual():.3e}, "
          f"trace identity {trace_identity_check(gaps, sig):.3e}")
    return 0


def cmd_frequencies(args) -> int:
    sc = _load_config(args.config)
    out = _out_dir(args)
    K = args.K or sc.K
    gaps, _, table = frequency_pipeline(
        Potential.from_state(initial_state(sc)), K)
    write_gap_csv(gaps, out / "gaps.csv")
    write_frequency_csv(table, out / "frequencies.csv")
    report.frequency_figure(table, out / "frequencies.png")
    print(f"frequencies {sc.name}: K={K}, "
          f"pair integral {table.pair_integral:.6e}")
    return 0


def cmd_compare(args) -> int:
    sc = _load_config(args.config)
    out = _out_dir(args)
    s = args.s if args.s is not None else max(sc.s_values)
    table = None
    if args.ref == "v":
        _, _, table = frequency_pipeline(
            Potential.from_state(initial_state(sc)), sc.K)
    traj = _scenario_trajectory(sc)
    series = difference_series(traj, args.ref, s, table)
    verdict = boundedness_verdict(series)
    write_norm_series_csv(series, out / f"difference_{series.label}.csv")
    report.difference_figure([series], out / f"difference_{series.label}.png")
    print(f"compare {sc.name}: |{series.label}|_H^{s:g} sup "
          f"{verdict.sup:.6e}, slope {verdict.slope:.3e}, {verdict.verdict}")
    return 0


def cmd_extract(args) -> int:
    sc = _load_config(args.config)
    out = _out_dir(args)
    K = args.K or sc.K
    floor = float(sc.tolerances.get("amplitude_floor", 0.05))
    traj = _scenario_trajectory(sc)
    fits = extract_frequencies(traj, amplitude_floor=floor)
    wanted = set(args.n) if args.n else set(fits)
    missing = wanted - set(fits)
    if missing:
        raise ConfigError(
            f"mode(s) {sorted(missing)} not above the amplitude floor {floor}")
    _, _, table = frequency_pipeline(
        Potential.from_state(initial_state(sc)), K)
    rows = [(n, fits[n], table.omega_of(-n)) for n in sorted(wanted)]
    lines = ["n,measured_rate,table_rate,rel_error"]
    worst = 0.0
    for n, measured, pipe in rows:
        rel = abs(measured - pipe) / max(abs(pipe), 1e-300)
        worst = max(worst, rel)
        lines.append(f"{n},{_format_float(measured)},{_format_float(pipe)},"
                     f"{_format_float(rel)}")
    with open(out / "extracted.csv", "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    report.extract_figure(rows, out / "extracted.png")
    print(f"extract {sc.name}: {len(rows)} mode(s), "
          f"worst relative mismatch {worst:.3e}")
    return 0


def cmd_highfreq(args) -> int:
    sc = _load_config(args.config)
    if sc.profile.get("kind") != "highfreq":
        raise ConfigError(
            f"scenario '{sc.name}' has profile kind "
            f"{sc.profile.get('kind')!r}; highfreq needs a highfreq profile")
    out = _out_dir(args)
    profile = sc.profile
    ls = args.L or profile["L_values"]
    eps = args.eps if args.eps is not None else profile["epsilon"]
    T = args.T if args.T is not None else profile["T"]
    reports, smallest = highfreq_scan(
        initial_state(sc), ls, eps, profile["M"], T,
        s=profile["s"], dt=sc.dt, stride=sc.stride)
    lines = ["L,sup_u_minus_v,sup_u_minus_w,v_within,w_within"]
    for r in reports:
        lines.append(f"{r.L},{_format_float(r.sup_u_minus_v)},"
                     f"{_format_float(r.sup_u_minus_w)},"
                     f"{int(r.v_within)},{int(r.w_within)}")
    with open(out / "highfreq.csv", "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    report.highfreq_figure(reports, out / "highfreq.png")
    print(f"highfreq {sc.name}: smallest L within epsilon {eps:g}: "
          f"{smallest if smallest is not None else 'none'}")
    return 0


def cmd_checks(args) -> int:
    out = _out_dir(args)
    results = run_battery(args.level)
    write_checks_json(results, args.level, out / "checks.json")
    report.checks_figure(results, out / "checks.png")
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name}: "
              f"value={r.value:.6g} bound={r.bound:.6g} ({r.seconds:.1f}s)")
    failed = [r for r in results if not r.passed]
    print(f"checks ({args.level}): {len(results) - len(failed)}/{len(results)} "
          f"passed")
    return 1 if failed else 0


# ---- parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nlslab",
        description="Spectral laboratory for the defocusing NLS on the circle")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(fn=fn)
        if name != "checks":
            p.add_argument("--config", required=True,
                           help="scenario JSON file or bundled name")
            p.add_argument("--out", default=".",
                           help="output directory (default: current)")
        return p

    add("simulate", cmd_simulate,
        "evolve a scenario and record trajectory and conserved quantities")
    p = add("spectrum", cmd_spectrum, "periodic spectrum and gap table")
    p.add_argument("--K", type=int, help="override the scenario gap count")
    p = add("sigma", cmd_sigma, "normalization zeros for one index")
    p.add_argument("--K", type=int, help="override the scenario gap count")
    p.add_argument("--n", type=int, required=True, help="distinguished index")
    p = add("frequencies", cmd_frequencies,
            "full pipeline: spectrum, zeros and the frequency table")
    p.add_argument("--K", type=int, help="override the scenario gap count")
    p = add("compare", cmd_compare,
            "H^s distance from the flow to a reference flow")
    p.add_argument("--ref", choices=("v", "w", "none"), default="v",
                   help="reference flow (default: v)")
    p.add_argument("--s", type=float, help="Sobolev index "
                   "(default: largest scenario s value)")
    p = add("extract", cmd_extract,
            "fit per-mode rotation rates and compare to the pipeline")
    p.add_argument("--K", type=int, help="override the scenario gap count")
    p.add_argument("--n", type=int, action="append",
                   help="mode to report (repeatable; default: all tracked)")
    p = add("highfreq", cmd_highfreq,
            "shift the profile to high modes and scan the approximation error")
    p.add_argument("--L", type=int, action="append",
                   help="shift to use (repeatable; default: scenario list)")
    p.add_argument("--eps", type=float, help="acceptance threshold override")
    p.add_argument("--T", type=float, help="time horizon override")
    p = sub.add_parser("checks", help="run the regression battery")
    p.set_defaults(fn=cmd_checks)
    p.add_argument("--level", choices=LEVELS, default="quick")
    p.add_argument("--out", default=".",
                   help="output directory (default: current)")
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(message)s",
                        stream=sys.stderr)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NlsLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
