"""Nonlinear mode frequencies from gap data and normalization zeros.

The frequency attached to index n is assembled purely from spectral data:

    omega_n = 2 tau_n^2 + 2 n^2 pi^2
              + 2 sum_{open k != n} (tau_k - sigma_k^n)(tau_k + sigma_k^n)
              + 1/2 sum_{open k} gamma_k^2.

Closed gaps drop out exactly (sigma_k = tau_k, gamma_k = 0); the |k| > K
remainder is estimated from the fitted decay of gamma_k^2 and reported, never
silently dropped.  Subtracting the free-mode value 4 pi^2 n^2 gives the
renormalized frequency, and subtracting additionally 4 * integral(phi1 phi2)
gives the residual rho_n whose decay in n is the quantity of interest.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .field import Potential, _format_float
from .psi_normalization import SigmaSet, solve_sigma
from .zs_spectral import GapTable, periodic_spectrum

FOUR_PI_SQ = 4.0 * np.pi**2


def thread_count() -> int:
    """Worker cap from NLSLAB_THREADS (default 1, minimum 1)."""
    raw = os.environ.get("NLSLAB_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ConfigError(f"NLSLAB_THREADS must be an integer, got {raw!r}")


def frequency(gaps: GapTable, sig: SigmaSet, n: int) -> float:
    """omega_n from gap midpoints, widths and the zeros sigma_k^n."""
    if not sig.converged:
        raise ConfigError(f"sigma set for n={sig.n} is not converged")
    if sig.n != n:
        raise ConfigError(f"sigma set belongs to n={sig.n}, not n={n}")
    tau_n = gaps.tau_of(n)
    total = 2.0 * tau_n * tau_n + 2.0 * (n * np.pi) ** 2
    # Cross terms enter as (tau - sigma)(tau + sigma).  The opposite order
    # makes the renormalized frequencies converge to -4 * pair integral
    # instead of 0 and contradicts measured mode rotation rates.
    for k in sig.open_ks():
        total += 2.0 * (sig.tau[k] - sig.sigma[k]) * (sig.tau[k] + sig.sigma[k])
    for k in gaps.open_indices():
        total += 0.5 * gaps.gamma_of(k) ** 2
    return float(total)


@dataclass
class FrequencyTable:
    """Per-index frequencies with renormalized values and decay residuals."""

    index: np.ndarray
    omega_nls: np.ndarray
    omega_renorm: np.ndarray
    rho: np.ndarray
    weighted_rho: np.ndarray
    pair_integral: float
    tail_bound: float

    def row(self, n: int) -> dict:
        pos = int(np.nonzero(self.index == n)[0][0])
        return {
            "n": int(self.index[pos]),
            "omega_nls": float(self.omega_nls[pos]),
            "omega_renorm": float(self.omega_renorm[pos]),
            "rho": float(self.rho[pos]),
            "weighted_rho": float(self.weighted_rho[pos]),
        }

    def omega_of(self, n: int) -> float:
        return self.row(n)["omega_nls"]


def frequency_residuals(gaps: GapTable, sigmas: dict[int, SigmaSet],
                        phi: Potential) -> FrequencyTable:
    """Assemble the table for every index with a solved sigma set."""
    ns = np.array(sorted(sigmas), dtype=int)
    omega = np.array([frequency(gaps, sigmas[int(n)], int(n)) for n in ns])
    pair = phi.pair_integral()
    renorm = omega - FOUR_PI_SQ * ns.astype(float) ** 2
    rho = renorm - 4.0 * pair
    weighted = (1.0 + np.abs(ns)) * rho
    return FrequencyTable(index=ns, omega_nls=omega, omega_renorm=renorm,
                          rho=rho, weighted_rho=weighted, pair_integral=pair,
                          tail_bound=gaps.gamma_squared_tail_estimate())


def sum_rule_check(gaps: GapTable, sig: SigmaSet, n: int, phi: Potential) -> float:
    """Half-window sum rule: the open gaps with |k| <= |n|/2 reconstruct the
    pair integral, weighted by |n|.

    Returns |n| * |sum_{open |k| <= |n|/2} ((tau_k - sigma_k^n)(tau_k + sigma_k^n)
    + (gamma_k/2)^2) - integral(phi1 phi2)|; bounded in n for smooth data.
    """
    if sig.n != n:
        raise ConfigError(f"sigma set belongs to n={sig.n}, not n={n}")
    half = abs(n) // 2
    total = 0.0
    for k in gaps.open_indices():
        if abs(k) > half or k == n:
            continue
        sigma_k = sig.sigma[k]
        tau_k = gaps.tau_of(k)
        total += (tau_k - sigma_k) * (tau_k + sigma_k) + (0.5 * gaps.gamma_of(k)) ** 2
    return abs(n) * abs(total - phi.pair_integral())


def omega_sup_check(table: FrequencyTable) -> float:
    """sup over the table of |omega_n - 4 pi^2 n^2|; bounded as K grows."""
    return float(np.max(np.abs(table.omega_renorm))) if len(table.index) else 0.0


def frequency_pipeline(phi: Potential, K: int, n_list=None,
                       cells: int | None = None, nodes: int = 64,
                       scan_points: int = 41,
                       workers: int | None = None):
    """Spectrum, sigma solves and the frequency table in one pass.

    Returns (gaps, sigmas, table).  Solves for distinct n are independent and
    run on a thread pool sized by `workers` (default: NLSLAB_THREADS).
    """
    gaps = periodic_spectrum(phi, K=K, cells=cells, scan_points=scan_points)
    if n_list is None:
        n_list = [int(n) for n in gaps.index]
    n_list = sorted(set(int(n) for n in n_list))
    workers = thread_count() if workers is None else max(1, workers)
    if workers > 1 and len(n_list) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda n: solve_sigma(gaps, n, nodes=nodes),
                                    n_list))
        sigmas = dict(zip(n_list, results))
    else:
        sigmas = {n: solve_sigma(gaps, n, nodes=nodes) for n in n_list}
    return gaps, sigmas, frequency_residuals(gaps, sigmas, phi)


def write_frequency_csv(table: FrequencyTable, path) -> None:
    lines = [
        f"# pair_integral = {_format_float(table.pair_integral)}",
        f"# gamma_sq_tail_bound = {_format_float(table.tail_bound)}",
        "n,omega_nls,omega_renorm,rho,weighted_rho",
    ]
    for i, n in enumerate(table.index):
        lines.append(",".join([
            str(int(n)),
            _format_float(table.omega_nls[i]),
            _format_float(table.omega_renorm[i]),
            _format_float(table.rho[i]),
            _format_float(table.weighted_rho[i]),
        ]))
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
