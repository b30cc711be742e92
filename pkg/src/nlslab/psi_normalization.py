"""Zeros of the normalized eigenfunction products on spectral gap contours.

For each distinguished index n there is a function whose zeros sigma_k^n (one
per open gap k != n, confined to that gap) and scalar multiplier are pinned by
contour conditions: the circle average of the ratio

    product_n(lambda) / canonical_root(lambda)

must be 1 on a contour around gap n and 0 on a contour around every other
open gap.  Closed gaps force sigma_k = tau_k exactly, since only a zero at
the double point can kill the simple zero of the canonical root there.

Both the numerator and the canonical root carry the same truncation (|k| <= K)
and the same sine-quotient tail, so in the ratio the tail and every closed-gap
factor cancel exactly.  The integrand reduces to

    multiplier * pi_n/(2i) * 1/w_n(lambda) * prod_{open k != n} (sigma_k - lambda)/w_k(lambda)

with w_k the standard root attached to gap k (branch cut exactly the gap
interval).  The trapezoid rule on a circle is spectrally accurate for this
analytic integrand, and the unknowns enter through scalar linear factors, so
Newton iterations cost almost nothing once the w_k values are cached on the
quadrature nodes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BranchCutError, ConfigError, GeometryError, SolverError
from .field import _format_float
from .zs_spectral import GapTable

_DEFAULT_NODES = 64
_INTERNAL_TOL = 1e-10
_STEP_TOL = 1e-12
_IMAG_TOL = 1e-10


def _pi_norm(k: int) -> float:
    """Normalizer pi_k: k*pi away from zero, 1 at k = 0."""
    return float(k) * np.pi if k != 0 else 1.0


def _sinc(z: np.ndarray) -> np.ndarray:
    """sin(z)/z for complex z, series near 0."""
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < 1e-6
    zsafe = np.where(small, 1.0, z)
    return np.where(small, 1.0 - z * z / 6.0, np.sin(zsafe) / zsafe)


def standard_root(gaps: GapTable, k: int, lam) -> np.ndarray:
    """w_k(lambda) = (tau_k - lambda) * sqrt(1 - ((gamma_k/2)/(tau_k - lambda))^2).

    Principal square root; the branch cut is exactly the gap interval.  On the
    real axis w_k > 0 left of the gap and w_k < 0 right of it, and for a
    closed gap the root degenerates to tau_k - lambda.
    """
    lam = np.asarray(lam, dtype=complex)
    tau = gaps.tau_of(k)
    gamma = gaps.gamma_of(k)
    if gamma == 0.0:
        return tau - lam
    ratio = (0.5 * gamma) / (tau - lam)
    return (tau - lam) * np.sqrt(1.0 - ratio * ratio)


def _distance_to_interval(lam: np.ndarray, lo: float, hi: float) -> np.ndarray:
    x = lam.real
    dx = np.maximum(np.maximum(lo - x, x - hi), 0.0)
    return np.hypot(dx, lam.imag)


def _tail_factor(K: int, lam: np.ndarray) -> np.ndarray:
    """-sin(lambda) / prod_{|k|<=K} ((k pi - lambda)/pi_k), singularities removed.

    The factor nearest to lambda is folded into sin via sinc, so the value is
    finite on the whole strip including the points k*pi.
    """
    lam = np.asarray(lam, dtype=complex)
    ks = np.arange(-K, K + 1)
    pis = np.where(ks == 0, 1.0, ks * np.pi)
    kstar = np.clip(np.rint(lam.real / np.pi).astype(int), -K, K)
    delta = lam - kstar * np.pi
    pi_star = np.where(kstar == 0, 1.0, kstar * np.pi)
    out = np.where(kstar % 2 == 0, 1.0, -1.0) * pi_star * _sinc(delta)
    for i, k in enumerate(ks):
        factor = pis[i] / (k * np.pi - lam)
        out = out * np.where(kstar == k, 1.0, factor)
    return out


def canonical_root(gaps: GapTable, lam, radius_margin: float = 0.0) -> np.ndarray:
    """2i * prod_{|k|<=K} w_k(lambda)/pi_k times the sine-quotient tail.

    Reduces exactly to -2i sin(lambda) when every gap is closed at k*pi; in
    general its square tracks Delta^2 - 4 up to the |k| > K truncation.
    """
    lam_arr = np.atleast_1d(np.asarray(lam, dtype=complex))
    for k in gaps.open_indices():
        lo, hi = gaps.interval(k)
        if np.any(_distance_to_interval(lam_arr, lo, hi) <= radius_margin):
            raise BranchCutError(
                f"evaluation point touches the open gap {k} interval [{lo}, {hi}]")
    out = np.full(lam_arr.shape, 2j, dtype=complex)
    for k in gaps.index:
        out = out * standard_root(gaps, int(k), lam_arr) / _pi_norm(int(k))
    out = out * _tail_factor(gaps.K, lam_arr)
    if np.isscalar(lam) or np.asarray(lam).ndim == 0:
        return complex(out[0])
    return out


# ---- contours -------------------------------------------------------------------


@dataclass(frozen=True)
class Contour:
    center: float
    radius: float
    nodes: int

    def points(self) -> np.ndarray:
        theta = 2.0 * np.pi * np.arange(self.nodes) / self.nodes
        return self.center + self.radius * np.exp(1j * theta)

    def weights(self) -> np.ndarray:
        """Quadrature weights for (1/2pi) * contour integral dlambda."""
        theta = 2.0 * np.pi * np.arange(self.nodes) / self.nodes
        return (1j * self.radius / self.nodes) * np.exp(1j * theta)


def build_contour(gaps: GapTable, m: int, nodes: int = _DEFAULT_NODES,
                  radius_factor: float = 1.0) -> Contour:
    """Circle around gap m: radius = factor * max(gamma_m, 0.05 * clearance)."""
    if nodes < 16:
        raise ConfigError("contour nodes must be >= 16")
    gamma = gaps.gamma_of(m)
    clearance = gaps.neighbor_clearance(m)
    if clearance <= 0.0:
        raise GeometryError(f"gap {m} has no clearance to its neighbor")
    radius = radius_factor * max(gamma, 0.05 * clearance)
    if radius <= 0.5 * gamma:
        raise GeometryError(f"contour around gap {m} does not enclose its interval")
    if radius >= 0.5 * gamma + clearance:
        raise GeometryError(f"contour around gap {m} touches a neighboring gap")
    return Contour(center=gaps.tau_of(m), radius=radius, nodes=nodes)


# ---- sigma sets ------------------------------------------------------------------


@dataclass
class SigmaSet:
    """Zeros sigma_k^n and multiplier for one distinguished index n."""

    n: int
    sigma: dict[int, float]
    multiplier: float
    tau: dict[int, float]
    residuals: dict[int, float] = field(default_factory=dict)
    iterations: int = 0
    converged: bool = False
    projected: bool = False

    def alpha(self, k: int) -> float:
        return self.sigma[k] - self.tau[k]

    def open_ks(self) -> list[int]:
        return sorted(self.sigma)

    def max_residual(self) -> float:
        return max((abs(v) for v in self.residuals.values()), default=0.0)


class _RatioIntegrand:
    """Cached node data for the ratio integrand on a fixed contour family."""

    def __init__(self, gaps: GapTable, n: int, contours: dict[int, Contour]):
        self.n = n
        self.pref = _pi_norm(n) / 2j
        self.ks = [k for k in gaps.open_indices() if k != n]
        self.node_data = {}
        for m, contour in contours.items():
            lam = contour.points()
            inv_wn = 1.0 / standard_root(gaps, n, lam)
            w_open = np.array([standard_root(gaps, k, lam) for k in self.ks])
            self.node_data[m] = (lam, contour.weights(), inv_wn, w_open)

    def integral(self, m: int, sigma_vec: np.ndarray, mu: float) -> complex:
        lam, wts, inv_wn, w_open = self.node_data[m]
        f = mu * self.pref * inv_wn
        if len(self.ks):
            f = f * np.prod((sigma_vec[:, None] - lam[None, :]) / w_open, axis=0)
        return complex(np.sum(wts * f))

    def residual_vector(self, ms: list[int], sigma_vec: np.ndarray,
                        mu: float) -> np.ndarray:
        out = np.empty(len(ms))
        for i, m in enumerate(ms):
            val = self.integral(m, sigma_vec, mu)
            if abs(val.imag) > _IMAG_TOL * max(1.0, abs(val)):
                raise RuntimeError(
                    f"internal: normalization integral around gap {m} is not real "
                    f"(imag {val.imag:.3e})")
            out[i] = val.real - (1.0 if m == self.n else 0.0)
        return out


def normalization_residual(gaps: GapTable, sig: SigmaSet, m: int,
                           nodes: int = _DEFAULT_NODES,
                           radius_factor: float = 1.0) -> float:
    """Contour average around gap m minus delta_{n m} for the stored sigma set."""
    contour = build_contour(gaps, m, nodes=nodes, radius_factor=radius_factor)
    integ = _RatioIntegrand(gaps, sig.n, {m: contour})
    vec = np.array([sig.sigma[k] for k in integ.ks])
    return float(integ.residual_vector([m], vec, sig.multiplier)[0])


def solve_sigma(gaps: GapTable, n: int, nodes: int = _DEFAULT_NODES,
                radius_factor: float = 1.0, tol: float = _INTERNAL_TOL,
                max_iter: int = 50) -> SigmaSet:
    """Newton solve for {sigma_k^n : k open, k != n} and the multiplier.

    Equations: residual = 0 on every open gap m != n and residual(n) = 0.
    Finite-difference Jacobian; damped steps keep each sigma strictly inside
    its gap, projecting (and flagging) if a step insists on leaving.
    """
    if not (-gaps.K <= n <= gaps.K):
        raise ConfigError(f"index {n} outside the gap table range")
    ks = [k for k in gaps.open_indices() if k != n]
    ms = ks + [n]
    contours = {m: build_contour(gaps, m, nodes=nodes, radius_factor=radius_factor)
                for m in ms}
    integ = _RatioIntegrand(gaps, n, contours)
    intervals = {k: gaps.interval(k) for k in ks}
    tau = {k: gaps.tau_of(k) for k in ks}

    mu = -2.0 / _pi_norm(n)
    sigma_vec = np.array([tau[k] for k in ks], dtype=float)

    def finish(res_vec, iterations, converged, projected):
        sig = SigmaSet(n=n, sigma={k: float(s) for k, s in zip(ks, sigma_vec)},
                       multiplier=float(mu), tau=tau,
                       iterations=iterations, converged=converged,
                       projected=projected)
        sig.residuals = {m: float(r) for m, r in zip(ms, res_vec)}
        return sig

    if not ks:
        # multiplier enters linearly; one integral fixes it, no iteration
        base = integ.integral(n, sigma_vec, 1.0).real
        if abs(base) < 1e-300:
            raise SolverError(f"normalization integral degenerate for n={n}")
        mu = 1.0 / base
        res = integ.residual_vector(ms, sigma_vec, mu)
        return finish(res, 0, bool(np.max(np.abs(res)) < tol), False)

    res = integ.residual_vector(ms, sigma_vec, mu)
    projected_runs = 0
    projected_flag = False
    for iteration in range(1, max_iter + 1):
        jac = np.empty((len(ms), len(ks) + 1))
        for j, k in enumerate(ks):
            lo, hi = intervals[k]
            step = max(1e-9, 1e-4 * gaps.gamma_of(k))
            if sigma_vec[j] + step > hi:
                step = -step
            pert = sigma_vec.copy()
            pert[j] += step
            jac[:, j] = (integ.residual_vector(ms, pert, mu) - res) / step
        mu_step = 1e-7 * max(abs(mu), 1e-3)
        jac[:, -1] = (integ.residual_vector(ms, sigma_vec, mu + mu_step) - res) / mu_step
        try:
            delta = np.linalg.solve(jac, -res)
        except np.linalg.LinAlgError as exc:
            raise SolverError(f"singular Jacobian for n={n}: {exc}") from exc

        # The Jacobian can be tiny near narrow gaps, so a small residual does
        # not imply small sigma error; converge on the step instead.
        if (np.max(np.abs(delta[:-1])) < _STEP_TOL
                and abs(delta[-1]) < _STEP_TOL * max(1.0, abs(mu))):
            sigma_vec = sigma_vec + delta[:-1]
            mu = mu + delta[-1]
            res = integ.residual_vector(ms, sigma_vec, mu)
            if np.max(np.abs(res)) < tol:
                return finish(res, iteration, True, projected_flag)
            raise SolverError(
                f"sigma solve for n={n} stalled with residual "
                f"{np.max(np.abs(res)):.3e}")

        damp = 1.0
        while damp > 1e-4:
            trial = sigma_vec + damp * delta[:-1]
            inside = all(
                intervals[k][0] < trial[j] < intervals[k][1]
                for j, k in enumerate(ks))
            if inside:
                break
            damp *= 0.5
        trial = sigma_vec + damp * delta[:-1]
        clipped = False
        for j, k in enumerate(ks):
            lo, hi = intervals[k]
            margin = 1e-3 * (hi - lo)
            if not (lo < trial[j] < hi):
                trial[j] = min(max(trial[j], lo + margin), hi - margin)
                clipped = True
        projected_runs = projected_runs + 1 if clipped else 0
        if projected_runs >= 3:
            projected_flag = True
        sigma_vec = trial
        mu = mu + damp * delta[-1]
        res = integ.residual_vector(ms, sigma_vec, mu)

    if np.max(np.abs(res)) < tol:
        return finish(res, max_iter, True, projected_flag)
    raise SolverError(
        f"sigma solve for n={n} did not converge in {max_iter} iterations; "
        f"max residual {np.max(np.abs(res)):.3e}")


def trace_identity_check(gaps: GapTable, sig: SigmaSet) -> float:
    """|sum over open k != n of (sigma_k^n - tau_k) - (tau_n - n pi)|."""
    total = sum(sig.alpha(k) for k in sig.open_ks())
    return abs(total - (gaps.tau_of(sig.n) - sig.n * np.pi))


def write_sigma_csv(sig: SigmaSet, path) -> None:
    lines = [
        f"# n = {sig.n}",
        f"# multiplier = {_format_float(sig.multiplier)}",
        f"# residual_n = {_format_float(sig.residuals.get(sig.n, 0.0))}",
        "k,tau_k,sigma_k_n,alpha_k_n,residual",
    ]
    for k in sig.open_ks():
        lines.append(",".join([
            str(k),
            _format_float(sig.tau[k]),
            _format_float(sig.sigma[k]),
            _format_float(sig.alpha(k)),
            _format_float(sig.residuals.get(k, 0.0)),
        ]))
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
