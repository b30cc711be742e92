"""Figure rendering for the CLI report paths.

Every function takes objects the pipelines already produce and writes one PNG
next to the delimited output.  Rendering is headless; nothing here opens a
window or touches global pyplot state beyond the Agg backend.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_DPI = 130


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def conserved_figure(report, path) -> None:
    """Absolute drift of the three conserved quantities on a log scale."""
    fig, ax = plt.subplots(figsize=(6.4, 3.6))
    floor = 1e-18
    for values, label in ((report.l2_drift, "L2 norm"),
                          (report.energy_drift, "energy"),
                          (report.momentum_drift, "momentum")):
        ax.semilogy(report.times, np.maximum(np.abs(values), floor),
                    label=label)
    ax.set_xlabel("t")
    ax.set_ylabel("|drift|")
    ax.legend(loc="best", fontsize=8)
    _save(fig, path)


def gap_figure(gaps, path) -> None:
    fig, ax = plt.subplots(figsize=(6.4, 3.6))
    mask = gaps.gamma > 0
    ax.semilogy(gaps.index[mask], gaps.gamma[mask], "o", ms=4)
    ax.set_xlabel("gap index n")
    ax.set_ylabel("gamma_n")
    _save(fig, path)


def sigma_figure(sig, path) -> None:
    """Deviation of each zero from its gap midpoint, signed, on symlog axes."""
    ks = sig.open_ks()
    fig, ax = plt.subplots(figsize=(6.4, 3.6))
    ax.axhline(0.0, color="0.8", lw=0.8)
    ax.plot(ks, [sig.alpha(k) for k in ks], "o", ms=4)
    ax.set_yscale("symlog", linthresh=1e-14)
    ax.set_xlabel("gap index k")
    ax.set_ylabel(f"sigma_k - tau_k  (n = {sig.n})")
    _save(fig, path)


def frequency_figure(table, path) -> None:
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8.8, 3.6))
    n = np.asarray(table.index, dtype=int)
    ax1.plot(n, table.omega_renorm, "o", ms=4)
    ax1.set_xlabel("n")
    ax1.set_ylabel("omega_n - 4 pi^2 n^2")
    pos = np.abs(table.rho) > 0
    ax2.semilogy(np.abs(n[pos]), np.abs(table.rho[pos]), "o", ms=4)
    ax2.set_xlabel("|n|")
    ax2.set_ylabel("|rho_n|")
    _save(fig, path)


def difference_figure(series_list, path) -> None:
    fig, ax = plt.subplots(figsize=(6.4, 3.6))
    for series in series_list:
        ax.plot(series.times, series.values,
                label=f"{series.label}, s={series.s:g}")
    ax.set_xlabel("t")
    ax.set_ylabel("H^s norm")
    ax.legend(loc="best", fontsize=8)
    _save(fig, path)


def extract_figure(rows, path) -> None:
    """rows: (mode, measured rate, table rate) triples."""
    fig, ax = plt.subplots(figsize=(6.4, 3.6))
    modes = [r[0] for r in rows]
    rel = [abs(r[1] - r[2]) / max(abs(r[2]), 1e-300) for r in rows]
    ax.semilogy(modes, rel, "o", ms=5)
    ax.set_xlabel("mode n")
    ax.set_ylabel("relative rate mismatch")
    _save(fig, path)


def highfreq_figure(reports, path) -> None:
    fig, ax = plt.subplots(figsize=(6.4, 3.6))
    ls = [r.L for r in reports]
    ax.loglog(ls, [r.sup_u_minus_v for r in reports], "o-", label="sup |u-v|")
    ax.loglog(ls, [r.sup_u_minus_w for r in reports], "s-", label="sup |u-w|")
    if reports:
        ax.axhline(reports[0].epsilon, color="0.6", ls="--", lw=0.8,
                   label="epsilon")
    ax.set_xlabel("shift L")
    ax.set_ylabel(f"sup over [-T, T], s={reports[0].s:g}" if reports else "")
    ax.legend(loc="best", fontsize=8)
    _save(fig, path)


def checks_figure(results, path) -> None:
    """Value/bound ratio per check; everything under 1 passes."""
    fig, ax = plt.subplots(figsize=(7.2, 4.0))
    names = [r.name for r in results]
    ratios = [max(r.value / r.bound, 1e-18) if r.bound > 0 else 1.0
              for r in results]
    colors = ["tab:blue" if r.passed else "tab:red" for r in results]
    ax.barh(range(len(names)), ratios, color=colors)
    ax.axvline(1.0, color="0.3", lw=1.0)
    ax.set_yticks(range(len(names)))
    ax.set_yticklabels(names, fontsize=7)
    ax.set_xscale("log")
    ax.set_xlabel("value / bound")
    ax.invert_yaxis()
    _save(fig, path)
