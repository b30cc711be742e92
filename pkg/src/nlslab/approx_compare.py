"""Nearly linear reference flows and trajectory comparisons.

Two explicit references are built from the initial data alone:

  v(t): each mode rotates with its pipeline frequency, keeping every |mode|
        fixed, so v is unitary on every Sobolev space;
  w(t): the free flow times the global phase exp(-i c t) with
        c = 4 * integral |u0|^2.

A mode n of the field pairs with gap index -n of the spectral pipeline (the
single-mode potential a e^{2 pi i x} opens exactly the gap at -1 and its
pipeline frequency there reproduces the plane-wave phase 4 pi^2 + 2 a^2), so
v reads the frequency table at the reflected index.  Modes without table
coverage fall back to 4 pi^2 n^2 + 4 integral |u0|^2 with a logged warning.

Empirical frequencies go the other way: unwrap the phase of a recorded mode
and fit its slope, giving a dynamics-side estimate that is independent of the
whole spectral pipeline.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .dnls_flow import Trajectory, evolve
from .errors import ConfigError
from .field import Potential, StateField, l2_norm, sobolev_norm
from .frequencies import FOUR_PI_SQ, FrequencyTable, frequency_pipeline

logger = logging.getLogger("nlslab")

_COVERAGE_FLOOR = 1e-14


def mode_frequency_array(u0: StateField, omegas: FrequencyTable) -> np.ndarray:
    """Rotation rate for every grid slot of u0, reading the table at -n.

    Uncovered modes that carry amplitude fall back to the free rate plus the
    mean-field shift 4 * integral |u0|^2, with one warning per call.
    """
    c = 4.0 * l2_norm(u0) ** 2
    modes = u0.grid.mode_numbers
    out = FOUR_PI_SQ * modes.astype(float) ** 2 + c
    table_ns = set(int(n) for n in omegas.index)
    missing = []
    for i, n in enumerate(modes):
        n = int(n)
        if -n in table_ns:
            out[i] = omegas.omega_of(-n)
        elif abs(u0.modes[i]) > _COVERAGE_FLOOR:
            missing.append(n)
    if missing:
        logger.warning(
            "frequency table lacks indices %s for carried modes %s; "
            "using free rate + mean-field shift %.6g",
            sorted(-n for n in missing), sorted(missing), c)
    return out


def build_v(u0: StateField, omegas: FrequencyTable, t: float) -> StateField:
    """Mode-wise rotation of u0 by the pipeline frequencies; unitary in H^s."""
    rates = mode_frequency_array(u0, omegas)
    return StateField(u0.grid, u0.modes * np.exp(-1j * rates * t))


def build_w(u0: StateField, t: float) -> StateField:
    """Free flow with the global mean-field phase exp(-4i t integral |u0|^2)."""
    c = 4.0 * l2_norm(u0) ** 2
    modes = u0.grid.mode_numbers.astype(float)
    phase = np.exp(-1j * (FOUR_PI_SQ * modes**2 + c) * t)
    return StateField(u0.grid, u0.modes * phase)


@dataclass
class NormSeries:
    """A Sobolev norm sampled along a trajectory."""

    times: np.ndarray
    values: np.ndarray
    s: float
    label: str

    def sup(self) -> float:
        return float(np.max(self.values))


def difference_series(traj: Trajectory, reference: str, s: float,
                      omegas: FrequencyTable | None = None) -> NormSeries:
    """H^s distance from the trajectory to a rebuilt reference at every sample.

    reference: "v" (needs the frequency table), "w", or "none" for the norm of
    u itself.
    """
    u0 = traj.initial_state
    grid = u0.grid
    w2 = grid.sobolev_weights_squared.astype(float) ** s
    times = traj.times
    if reference == "v":
        if omegas is None:
            raise ConfigError("reference 'v' needs a frequency table")
        rates = mode_frequency_array(u0, omegas)
        ref = u0.modes[None, :] * np.exp(-1j * np.outer(times, rates))
        label = "u-v"
    elif reference == "w":
        c = 4.0 * l2_norm(u0) ** 2
        rates = FOUR_PI_SQ * grid.mode_numbers.astype(float) ** 2 + c
        ref = u0.modes[None, :] * np.exp(-1j * np.outer(times, rates))
        label = "u-w"
    elif reference == "none":
        ref = 0.0
        label = "u"
    else:
        raise ConfigError(f"unknown reference {reference!r}; use v, w or none")
    diff = traj.mode_history - ref
    values = np.sqrt(np.sum(w2[None, :] * np.abs(diff) ** 2, axis=1))
    return NormSeries(times=times.copy(), values=values, s=float(s), label=label)


@dataclass(frozen=True)
class BoundednessVerdict:
    sup: float
    slope: float
    verdict: str

    @property
    def bounded(self) -> bool:
        return self.verdict == "bounded"


def boundedness_verdict(series: NormSeries, slope_fraction: float = 0.05,
                        zero_floor: float = 1e-10) -> BoundednessVerdict:
    """Least-squares slope test: bounded when slope * T_end < fraction * sup.

    Statistical, not a proof; the 5% default is configuration.  Series whose
    sup never leaves roundoff scale are bounded outright.
    """
    t = series.times
    sup = series.sup()
    if len(t) < 2 or sup < zero_floor:
        return BoundednessVerdict(sup=sup, slope=0.0, verdict="bounded")
    slope = float(np.polyfit(t, series.values, 1)[0])
    span = float(np.max(np.abs(t)))
    verdict = "bounded" if slope * span < slope_fraction * sup else "growing"
    return BoundednessVerdict(sup=sup, slope=slope, verdict=verdict)


def extract_frequencies(traj: Trajectory, amplitude_floor: float) -> dict[int, float]:
    """Fitted phase slopes, negated, for every mode above the amplitude floor.

    The recorded stride must keep each tracked mode's phase advance per sample
    below pi (judged by the free rate), otherwise unwrapping is ambiguous.
    """
    if amplitude_floor <= 0:
        raise ConfigError("amplitude_floor must be positive")
    u0 = traj.initial_state
    times = traj.times
    if len(times) < 4:
        raise ConfigError("trajectory too short for a frequency fit")
    max_dt = float(np.max(np.abs(np.diff(times))))
    span = float(np.max(np.abs(times)))
    carried = [int(n) for n in u0.grid.mode_numbers
               if abs(u0.mode(int(n))) >= amplitude_floor]
    if carried:
        min_amp = min(abs(u0.mode(n)) for n in carried)
        if span < 20.0 / min_amp:
            logger.warning(
                "trajectory span %.3g below the 20/min-amplitude heuristic %.3g; "
                "fitted frequencies may drift", span, 20.0 / min_amp)
    out = {}
    for n in carried:
        if max_dt * (FOUR_PI_SQ * n * n + 10.0) >= np.pi:
            raise ConfigError(
                f"recorded stride too coarse for mode {n}: phase advance per "
                f"sample would exceed pi; record more often")
        series = traj.mode_series(n)
        if np.min(np.abs(series)) < amplitude_floor:
            logger.warning("mode %d dips below the amplitude floor; skipped", n)
            continue
        phase = np.unwrap(np.angle(series))
        out[n] = -float(np.polyfit(times, phase, 1)[0])
    return out


# ---- high-mode shift experiment ----------------------------------------------


@dataclass(frozen=True)
class HighFreqReport:
    L: int
    s: float
    epsilon: float
    T: float
    norm_target: float
    sup_u_minus_v: float
    sup_u_minus_w: float
    v_within: bool
    w_within: bool


def shift_profile(profile: StateField, L: int, M: float, s: float,
                  grid_points: int) -> StateField:
    """Move every carried mode n to n*L and rescale to H^s norm M."""
    from .field import SpectralGrid

    if L < 1:
        raise ConfigError("L must be >= 1")
    grid = SpectralGrid(grid_points)
    half = grid_points // 2
    shifted = {}
    for n in profile.grid.mode_numbers:
        amp = profile.mode(int(n))
        if abs(amp) <= _COVERAGE_FLOOR:
            continue
        target = int(n) * L
        if not (-half <= target < half):
            raise ConfigError(
                f"shifted mode {target} does not fit a {grid_points}-point grid")
        shifted[target] = amp
    out = StateField.from_mode_dict(grid, shifted)
    norm = sobolev_norm(out, s)
    if norm == 0.0:
        raise ConfigError("profile carries no modes")
    return StateField(grid, out.modes * (M / norm))


def highfreq_experiment(profile: StateField, L: int, epsilon: float, M: float,
                        T: float, s: float = 3.0, dt: float = 2.5e-4,
                        K_margin: int = 8, cells: int | None = None,
                        stride: int = 40,
                        grid_points: int | None = None) -> HighFreqReport:
    """Shift the profile to modes |n| >= L, evolve over [-T, T], compare.

    Reports the sup of |u - v|_{H^s} and |u - w|_{H^s} over both time
    directions and whether each stays within epsilon.
    """
    max_mode = max(abs(int(n)) for n in profile.grid.mode_numbers
                   if abs(profile.mode(int(n))) > _COVERAGE_FLOOR)
    if grid_points is None:
        # third-order products of shifted modes reach 3*max_mode*L; keep the
        # grid wide enough that they do not alias back onto carried modes
        span = 8 * max_mode * L
        grid_points = max(64, 1 << (span - 1).bit_length())
    u0 = shift_profile(profile, L, M, s, grid_points)
    K = max_mode * L + K_margin
    carried = [-int(n) for n in u0.grid.mode_numbers
               if abs(u0.mode(int(n))) > _COVERAGE_FLOOR]
    _, _, table = frequency_pipeline(Potential.from_state(u0), K=K,
                                     n_list=carried, cells=cells)
    sup_v = 0.0
    sup_w = 0.0
    for t_end in (T, -T):
        traj = evolve(u0, t_end, dt, stride=stride)
        sup_v = max(sup_v, difference_series(traj, "v", s, table).sup())
        sup_w = max(sup_w, difference_series(traj, "w", s).sup())
    return HighFreqReport(L=L, s=s, epsilon=epsilon, T=T, norm_target=M,
                          sup_u_minus_v=sup_v, sup_u_minus_w=sup_w,
                          v_within=sup_v <= epsilon, w_within=sup_w <= epsilon)


def highfreq_scan(profile: StateField, Ls, epsilon: float, M: float, T: float,
                  **kwargs) -> tuple[list[HighFreqReport], int | None]:
    """Run the experiment for each L; also return the smallest L passing both."""
    reports = [highfreq_experiment(profile, L, epsilon, M, T, **kwargs)
               for L in sorted(Ls)]
    passing = [r.L for r in reports if r.v_within and r.w_within]
    return reports, (min(passing) if passing else None)


def write_norm_series_csv(series: NormSeries, path) -> None:
    from .field import _format_float

    lines = [f"# label = {series.label}", f"# s = {_format_float(series.s)}",
             "t,value"]
    for t, v in zip(series.times, series.values):
        lines.append(f"{_format_float(t)},{_format_float(v)}")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
