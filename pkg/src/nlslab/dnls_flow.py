"""Split-step integration of i u_t = -u_xx + 2|u|^2 u on the unit circle.

The Strang step alternates two flows that are each exact:

  * nonlinear: i u_t = 2|u|^2 u  =>  u <- u * exp(-2i |u|^2 h), pointwise,
    because |u| is invariant under pure phase rotation;
  * linear:    i u_t = -u_xx     =>  uhat(n) <- uhat(n) * exp(-i 4 pi^2 n^2 h).

Both maps are L2-unitary, so the scheme conserves the L2 norm to round-off
and is unconditionally stable; the splitting error shows up as an O(dt^2)
Hamiltonian drift.  Plane waves a*exp(2 pi i n x) are eigenstates of both
maps and evolve with zero phase error.

Backward evolution uses the conjugation symmetry of the equation: if u(t)
solves it, so does conj(u)(-t).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BlowUpError, ConfigError
from .field import (
    SpectralGrid,
    StateField,
    _format_float,
    hamiltonian,
    l2_norm,
    momentum,
)


@dataclass
class Trajectory:
    """States recorded every `stride` steps of size `dt` (plus the endpoint)."""

    grid: SpectralGrid
    times: np.ndarray          # (n_rec,)
    mode_history: np.ndarray   # (n_rec, point_count), centered mode order
    dt: float
    stride: int

    def __len__(self) -> int:
        return len(self.times)

    def state(self, i: int) -> StateField:
        return StateField(self.grid, self.mode_history[i].copy())

    @property
    def initial_state(self) -> StateField:
        return self.state(0)

    @property
    def final_state(self) -> StateField:
        return self.state(len(self.times) - 1)

    def mode_series(self, n: int) -> np.ndarray:
        """uhat(n) as a function of the recorded times."""
        half = self.grid.point_count // 2
        if not (-half <= n < half):
            raise ConfigError(f"mode {n} outside [-{half}, {half})")
        return self.mode_history[:, n + half].copy()


def _nyquist_zeroed(modes: np.ndarray) -> np.ndarray:
    modes[0] = 0.0  # centered order puts n = -N/2 first
    return modes


def step_strang(state: StateField, dt: float) -> StateField:
    """One Strang step; see module docstring.  Exact on constants and plane waves."""
    if dt <= 0:
        raise ConfigError(f"dt must be positive, got {dt}")
    grid = state.grid
    n = grid.mode_numbers
    linear_phase = np.exp(-1j * 4.0 * np.pi**2 * n.astype(float) ** 2 * dt)
    modes = _advance(state.modes.copy(), linear_phase, dt, 1)
    return StateField(grid, modes)


def _advance(modes: np.ndarray, linear_phase: np.ndarray, dt: float, n_steps: int) -> np.ndarray:
    """Advance centered modes by n_steps Strang steps; returns the new array."""
    for _ in range(n_steps):
        samples = np.fft.ifft(np.fft.ifftshift(modes)) * modes.shape[0]
        samples *= np.exp(-1j * dt * np.abs(samples) ** 2)  # exp(-2i|u|^2 dt/2)
        modes = _nyquist_zeroed(np.fft.fftshift(np.fft.fft(samples)) / modes.shape[0])
        modes *= linear_phase
        samples = np.fft.ifft(np.fft.ifftshift(modes)) * modes.shape[0]
        samples *= np.exp(-1j * dt * np.abs(samples) ** 2)
        modes = _nyquist_zeroed(np.fft.fftshift(np.fft.fft(samples)) / modes.shape[0])
    return modes


def evolve(u0: StateField, t_end: float, dt: float, stride: int = 1,
           dt_max: float = 1e-3) -> Trajectory:
    """Integrate from t=0 to t_end (either sign), recording every stride-th state.

    The endpoint is always recorded.  t_end must be an integer number of steps
    to 1e-9 relative; negative t_end evolves conj(u0) forward and conjugates
    the records back.
    """
    if dt <= 0 or stride < 1:
        raise ConfigError(f"need dt > 0 and stride >= 1, got dt={dt}, stride={stride}")
    if dt > dt_max:
        raise ConfigError(f"dt={dt} exceeds dt_max={dt_max}")
    if not np.all(np.isfinite(u0.modes)):
        raise BlowUpError("initial data contains non-finite values")

    span = abs(float(t_end))
    n_steps = int(round(span / dt))
    if abs(n_steps * dt - span) > 1e-9 * max(span, dt):
        raise ConfigError(f"t_end={t_end} is not an integer multiple of dt={dt}")

    backward = t_end < 0
    grid = u0.grid
    work = u0.conjugate().modes if backward else u0.modes.copy()

    n = grid.mode_numbers
    linear_phase = np.exp(-1j * 4.0 * np.pi**2 * n.astype(float) ** 2 * dt)

    record_steps = list(range(0, n_steps + 1, stride))
    if record_steps[-1] != n_steps:
        record_steps.append(n_steps)
    history = np.empty((len(record_steps), grid.point_count), dtype=complex)
    times = np.empty(len(record_steps))

    history[0] = work
    times[0] = 0.0
    rec = 1
    done = 0
    for target in record_steps[1:]:
        work = _advance(work, linear_phase, dt, target - done)
        done = target
        if not np.all(np.isfinite(work)):
            raise BlowUpError(f"non-finite field after step {done} (t={done * dt})")
        history[rec] = work
        times[rec] = done * dt
        rec += 1

    if backward:
        # records hold the conjugated solution at +t; map back to u at -t
        conj_fields = [StateField(grid, h).conjugate().modes for h in history]
        history = np.array(conj_fields)
        times = -times
    return Trajectory(grid=grid, times=times, mode_history=history, dt=dt, stride=stride)


# ---- conserved quantities ---------------------------------------------------


@dataclass
class ConservedReport:
    """Per-sample invariants plus their drift relative to the first sample."""

    times: np.ndarray
    l2: np.ndarray
    energy: np.ndarray
    momentum: np.ndarray

    @property
    def l2_drift(self) -> np.ndarray:
        return np.abs(self.l2 - self.l2[0])

    @property
    def energy_drift(self) -> np.ndarray:
        return np.abs(self.energy - self.energy[0])

    @property
    def momentum_drift(self) -> np.ndarray:
        return np.abs(self.momentum - self.momentum[0])

    def max_relative_l2_drift(self) -> float:
        scale = max(abs(self.l2[0]), 1e-300)
        return float(np.max(self.l2_drift) / scale)

    def max_relative_energy_drift(self) -> float:
        scale = max(abs(self.energy[0]), 1e-300)
        return float(np.max(self.energy_drift) / scale)


def conserved_report(traj: Trajectory) -> ConservedReport:
    n_rec = len(traj)
    l2 = np.empty(n_rec)
    energy = np.empty(n_rec)
    mom = np.empty(n_rec)
    for i in range(n_rec):
        st = traj.state(i)
        l2[i] = l2_norm(st)
        energy[i] = hamiltonian(st)
        mom[i] = momentum(st)
    return ConservedReport(times=traj.times.copy(), l2=l2, energy=energy, momentum=mom)


# ---- serialization ----------------------------------------------------------


def write_trajectory_csv(traj: Trajectory, path) -> None:
    """Long format: one row per (time, mode)."""
    mode_numbers = traj.grid.mode_numbers
    lines = ["t,n,re_uhat,im_uhat"]
    for t, row in zip(traj.times, traj.mode_history):
        t_str = _format_float(t)
        for n, c in zip(mode_numbers, row):
            lines.append(f"{t_str},{n},{_format_float(c.real)},{_format_float(c.imag)}")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_conserved_csv(report: ConservedReport, path) -> None:
    lines = ["t,l2_norm,hamiltonian,momentum,l2_drift,hamiltonian_drift,momentum_drift"]
    for i, t in enumerate(report.times):
        lines.append(",".join([
            _format_float(t),
            _format_float(report.l2[i]),
            _format_float(report.energy[i]),
            _format_float(report.momentum[i]),
            _format_float(report.l2_drift[i]),
            _format_float(report.energy_drift[i]),
            _format_float(report.momentum_drift[i]),
        ]))
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
