"""Periodic fields on the unit circle and their spectral bookkeeping.

Conventions used everywhere in this package:

    u(x)    = sum_n uhat(n) exp(+2 pi i n x)
    uhat(n) = integral_0^1 u(x) exp(-2 pi i n x) dx

Mode numbers run over n = -N/2 .. N/2 - 1 for an even grid size N ("centered"
order, lowest mode first).  The unpaired mode n = -N/2 is the Nyquist slot;
the time stepper zeroes it after every nonlinear substep so that fields stay
effectively band-limited to |n| < N/2.

Sobolev weights are <n> = max(1, |n|), so the H^0 norm is the plain l2 norm
of the coefficient sequence, which by Parseval equals the L2 norm of u.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

TWO_PI = 2.0 * np.pi

# Tolerance used when a construction requires an (effectively) empty Nyquist slot.
_NYQUIST_TOL = 1e-13


def _format_float(x: float) -> str:
    """17 significant digits: round-trips any double, keeps CSVs byte-stable."""
    return format(float(x), ".17g")


@dataclass(frozen=True)
class SpectralGrid:
    """Uniform collocation grid x_j = j/N with its centered mode numbers."""

    point_count: int

    def __post_init__(self):
        n = self.point_count
        if n < 8 or n % 2 != 0:
            raise ConfigError(f"point_count must be even and >= 8, got {n}")

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.point_count) / self.point_count

    @property
    def mode_numbers(self) -> np.ndarray:
        half = self.point_count // 2
        return np.arange(-half, half)

    @property
    def sobolev_weights_squared(self) -> np.ndarray:
        """<n>^2 with <n> = max(1, |n|)."""
        n = self.mode_numbers
        return np.maximum(1, np.abs(n)).astype(float) ** 2


class StateField:
    """A complex field on a SpectralGrid, stored as centered Fourier modes."""

    __slots__ = ("grid", "modes")

    def __init__(self, grid: SpectralGrid, modes: np.ndarray):
        modes = np.asarray(modes, dtype=complex)
        if modes.shape != (grid.point_count,):
            raise ConfigError(
                f"mode array has shape {modes.shape}, grid wants ({grid.point_count},)"
            )
        self.grid = grid
        self.modes = modes

    # ---- constructors -------------------------------------------------

    @classmethod
    def from_samples(cls, grid: SpectralGrid, samples: np.ndarray) -> "StateField":
        samples = np.asarray(samples, dtype=complex)
        if samples.shape != (grid.point_count,):
            raise ConfigError(
                f"sample array has shape {samples.shape}, grid wants ({grid.point_count},)"
            )
        return cls(grid, forward_transform(samples))

    @classmethod
    def from_mode_dict(cls, grid: SpectralGrid, amplitudes: dict[int, complex]) -> "StateField":
        """Build a field from {mode number: coefficient}; all other modes zero."""
        half = grid.point_count // 2
        modes = np.zeros(grid.point_count, dtype=complex)
        for n, a in amplitudes.items():
            if not (-half <= n < half):
                raise ConfigError(f"mode {n} outside [-{half}, {half})")
            modes[n + half] = a
        return cls(grid, modes)

    # ---- views ---------------------------------------------------------

    @property
    def samples(self) -> np.ndarray:
        return inverse_transform(self.modes)

    def mode(self, n: int) -> complex:
        half = self.grid.point_count // 2
        if not (-half <= n < half):
            raise ConfigError(f"mode {n} outside [-{half}, {half})")
        return complex(self.modes[n + half])

    def copy(self) -> "StateField":
        return StateField(self.grid, self.modes.copy())

    def conjugate(self) -> "StateField":
        """Pointwise complex conjugate; mode n picks up conj(uhat(-n))."""
        return StateField.from_samples(self.grid, np.conj(self.samples))


# ---- transforms ---------------------------------------------------------


def forward_transform(samples: np.ndarray) -> np.ndarray:
    """Collocation values at x_j = j/N -> centered mode coefficients."""
    samples = np.asarray(samples, dtype=complex)
    return np.fft.fftshift(np.fft.fft(samples)) / samples.shape[-1]


def inverse_transform(modes: np.ndarray) -> np.ndarray:
    """Centered mode coefficients -> collocation values at x_j = j/N."""
    modes = np.asarray(modes, dtype=complex)
    return np.fft.ifft(np.fft.ifftshift(modes)) * modes.shape[-1]


def evaluate_on_shifted_grid(field: StateField, count: int, shift: float) -> np.ndarray:
    """Evaluate the trigonometric interpolant at x_j = (j + shift)/count.

    count may exceed the grid size (zero padding); it must not truncate modes.
    """
    n_grid = field.grid.point_count
    if count < n_grid:
        raise ConfigError(f"evaluation count {count} would truncate a {n_grid}-mode field")
    mode_numbers = field.grid.mode_numbers
    shifted = field.modes * np.exp(2j * np.pi * mode_numbers * (shift / count))
    padded = np.zeros(count, dtype=complex)
    padded[mode_numbers % count] = shifted
    return np.fft.ifft(padded) * count


# ---- diagnostics ---------------------------------------------------------


def sobolev_norm(field: StateField, s: float) -> float:
    """H^s norm (sum <n>^{2s} |uhat(n)|^2)^{1/2}; s must be >= 0."""
    if s < 0:
        raise ValueError(f"Sobolev index must be nonnegative, got {s}")
    w = field.grid.sobolev_weights_squared ** s
    return float(np.sqrt(np.sum(w * np.abs(field.modes) ** 2)))


def l2_norm(field: StateField) -> float:
    return float(np.sqrt(np.sum(np.abs(field.modes) ** 2)))


def momentum(field: StateField) -> float:
    """sum_n 2 pi n |uhat(n)|^2, conserved by the flow."""
    n = field.grid.mode_numbers
    return float(np.sum(TWO_PI * n * np.abs(field.modes) ** 2))


def hamiltonian(field: StateField) -> float:
    """Energy integral |u_x|^2 + |u|^4 in the conventions above.

    Gradient term spectrally: 4 pi^2 sum n^2 |uhat(n)|^2.  Quartic term by the
    grid mean of |u|^4, which is the exact integral as long as the field's
    band is narrower than a quarter of the grid (no quartic combination then
    aliases onto mode 0).
    """
    n = field.grid.mode_numbers
    kinetic = float(np.sum(4.0 * np.pi**2 * n.astype(float) ** 2 * np.abs(field.modes) ** 2))
    quartic = float(np.mean(np.abs(field.samples) ** 4))
    return kinetic + quartic


# ---- two-component potentials --------------------------------------------


@dataclass(frozen=True)
class Potential:
    """Off-diagonal pair (phi1, phi2) feeding the transfer-matrix spectrum.

    States of the flow sit on the slice phi2 = conj(phi1); the spectral code
    only ever sees the pair, so other slices are representable too.
    """

    phi1: StateField
    phi2: StateField

    def __post_init__(self):
        if self.phi1.grid.point_count != self.phi2.grid.point_count:
            raise ConfigError("phi1 and phi2 live on different grids")

    @classmethod
    def from_state(cls, u: StateField) -> "Potential":
        nyq = abs(u.modes[0])
        if nyq > _NYQUIST_TOL * max(1.0, float(np.max(np.abs(u.modes)))):
            raise ConfigError(
                f"state has Nyquist content {nyq:.3e}; zero it before building a potential"
            )
        return cls(u.copy(), u.conjugate())

    def midpoint_values(self, cells: int) -> tuple[np.ndarray, np.ndarray]:
        """phi1, phi2 at the cell midpoints x = (j + 1/2)/cells."""
        if cells < self.phi1.grid.point_count:
            raise ConfigError("cells must be >= grid point_count")
        v1 = evaluate_on_shifted_grid(self.phi1, cells, 0.5)
        v2 = evaluate_on_shifted_grid(self.phi2, cells, 0.5)
        return v1, v2

    def pair_integral(self) -> float:
        """integral_0^1 phi1 phi2 dx = sum_n phi1hat(n) phi2hat(-n).

        Real (and >= 0, equal to integral |u|^2) on the slice phi2 = conj(phi1).
        """
        m1 = self.phi1.modes
        m2 = self.phi2.modes
        # pairing n with -n reverses the centered array and drops the unpaired
        # Nyquist slot of one factor
        total = complex(np.sum(m1[1:] * m2[1:][::-1]))
        if abs(total.imag) > 1e-10 * max(1.0, abs(total.real)):
            raise ConfigError(
                f"pair integral is not real ({total}); expected a conjugate-pair potential"
            )
        return total.real


# ---- serialization --------------------------------------------------------

_CSV_CONVENTION = "# uhat(n) = integral_0^1 u(x) exp(-2*pi*i*n*x) dx; u(x) = sum_n uhat(n) exp(+2*pi*i*n*x)"


def write_field_csv(field: StateField, path) -> None:
    lines = [_CSV_CONVENTION, "n,re_uhat,im_uhat"]
    for n, c in zip(field.grid.mode_numbers, field.modes):
        lines.append(f"{n},{_format_float(c.real)},{_format_float(c.imag)}")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_field_csv(path) -> StateField:
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#") or line.startswith("n,"):
                continue
            n_str, re_str, im_str = line.split(",")
            rows.append((int(n_str), float(re_str), float(im_str)))
    if not rows:
        raise ConfigError(f"{path}: no data rows")
    count = len(rows)
    grid = SpectralGrid(count)
    half = count // 2
    modes = np.zeros(count, dtype=complex)
    seen = set()
    for n, re, im in rows:
        if not (-half <= n < half) or n in seen:
            raise ConfigError(f"{path}: bad or duplicate mode number {n}")
        seen.add(n)
        modes[n + half] = re + 1j * im
    return StateField(grid, modes)
