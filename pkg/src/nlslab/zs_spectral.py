"""Floquet spectrum of the 2x2 transfer operator attached to a potential pair.

The operator  i*diag(1,-1) d/dx + offdiag(phi1, phi2)  at spectral parameter
lambda turns the eigenvalue problem into the linear system

    F' = A(x) F,   A = [[-i lambda, i phi1], [-i phi2, i lambda]],

whose period-1 fundamental matrix M(lambda) has trace Delta(lambda) (the
discriminant).  A is trace-free, so det M = 1 identically; the periodic
spectrum is the zero set of Delta^2 - 4 and splits into pairs
lambda_n- <= lambda_n+ near n*pi (gap midpoint tau_n, width gamma_n).

Numerics: the potential is frozen at the midpoint of each of `cells` equal
cells and the exact exponential of the frozen (trace-free) coefficient
matrix is applied per cell:

    exp(h A) = cos(h w) Id + h * sinc(h w) * A,   w^2 = lambda^2 - phi1 phi2.

cos and sinc are even, so no square-root branch ever matters, each factor
has determinant exactly one, and Delta stays entire in lambda.  The cell
product is evaluated as a pairwise tree so the work is a handful of large
vectorized passes rather than a Python loop per cell.

Derivatives in lambda are accumulated exactly through the same tree by the
product rule, so critical points of Delta (closed gaps) are located without
finite-difference noise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ResolutionError
from .field import Potential, _format_float

_IMAG_TOL = 1e-9          # allowed spurious imaginary part of Delta on the real axis
_CLOSED_VALUE_TOL = 1e-4  # |s*Delta - 2| at the critical point of a closed gap
_CHUNK_TARGET = 2_000_000  # cells * lambda-batch elements per vectorized chunk

# A double root perturbed by an error of size d in Delta splits into a phantom
# pair 2*sqrt(d) apart, so round-off alone fakes widths near 1e-7.  Critical
# values below this floor are treated as exact double roots.
_CRITICAL_VALUE_FLOOR = 5e-12

# Scan sign changes are only believed when the window's peak value clears this;
# below it (e.g. a scan point landing exactly on a double root) the window is
# reclassified through the critical-point path.
_SCAN_TRUST_FLOOR = 1e-10


# ---- entire helper functions of w = z^2 -------------------------------------


def _cos_sqrt(w: np.ndarray) -> np.ndarray:
    """cos(sqrt(w)), entire in w."""
    return np.cos(np.sqrt(w + 0j))


def _sinc_sqrt(w: np.ndarray) -> np.ndarray:
    """sin(sqrt(w))/sqrt(w), entire in w; series near 0."""
    w = np.asarray(w + 0j)
    small = np.abs(w) < 1e-6
    z = np.sqrt(np.where(small, 1.0, w))
    direct = np.sin(z) / z
    series = 1.0 - w / 6.0 + w * w / 120.0
    return np.where(small, series, direct)


def _cos_minus_sinc_over_2w(w: np.ndarray) -> np.ndarray:
    """(cos(sqrt(w)) - sinc(sqrt(w))) / (2w); entire, equals d/dw sinc(sqrt(w))."""
    w = np.asarray(w + 0j)
    small = np.abs(w) < 1e-3
    wsafe = np.where(small, 1.0, w)
    direct = (_cos_sqrt(wsafe) - _sinc_sqrt(wsafe)) / (2.0 * wsafe)
    series = -1.0 / 6.0 + w / 60.0 - w * w / 1680.0
    return np.where(small, series, direct)


# ---- transfer-matrix core ----------------------------------------------------


def _cell_factors(mid1: np.ndarray, mid2: np.ndarray, h: float, lam: np.ndarray,
                  with_derivative: bool = False):
    """Entries of exp(h*A) for every (cell, lambda) pair; shapes (C, B).

    With with_derivative also returns d/dlambda exp(h*A), exact:
    dE = w' (-sinc/2 Id + h T A) + h sinc diag(-i, i), w' = 2 h^2 lambda,
    where T = d sinc(sqrt(w))/dw and w = h^2 (lambda^2 - phi1 phi2).
    """
    lam = lam[None, :]
    p = (mid1 * mid2)[:, None]
    w = (h * h) * (lam * lam - p)
    c = _cos_sqrt(w)
    s = _sinc_sqrt(w)
    hs = h * s
    e11 = c - 1j * lam * hs
    e22 = c + 1j * lam * hs
    e12 = (1j * h) * mid1[:, None] * s
    e21 = (-1j * h) * mid2[:, None] * s
    mats = (e11, e12, e21, e22)
    if not with_derivative:
        return mats
    t = _cos_minus_sinc_over_2w(w)
    dw = (2.0 * h * h) * lam
    ht = h * t
    d11 = dw * (-0.5 * s - 1j * lam * ht) - 1j * hs
    d22 = dw * (-0.5 * s + 1j * lam * ht) + 1j * hs
    d12 = dw * ht * (1j * mid1[:, None])
    d21 = dw * ht * (-1j * mid2[:, None])
    return mats, (d11, d12, d21, d22)


def _mul2(a, b):
    """Entrywise product of stacked 2x2 matrices held as 4-tuples of arrays."""
    a11, a12, a21, a22 = a
    b11, b12, b21, b22 = b
    return (a11 * b11 + a12 * b21,
            a11 * b12 + a12 * b22,
            a21 * b11 + a22 * b21,
            a21 * b12 + a22 * b22)


def _add2(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _split_pairs(mats):
    """(body even/odd halves, unpaired trailing factor or None)."""
    if mats[0].shape[0] % 2 == 1:
        tail = tuple(m[-1:] for m in mats)
        body = tuple(m[:-1] for m in mats)
    else:
        tail = None
        body = mats
    lo = tuple(m[0::2] for m in body)
    hi = tuple(m[1::2] for m in body)
    return lo, hi, tail


def _cat2(a, tail):
    return tuple(np.concatenate([x, t]) for x, t in zip(a, tail))


def _tree_product(mats):
    """Ordered product E_{C-1} ... E_0 by pairwise reduction; 4-tuple of (B,) arrays."""
    while mats[0].shape[0] > 1:
        lo, hi, tail = _split_pairs(mats)
        # later cell multiplies from the left
        mats = _mul2(hi, lo)
        if tail is not None:
            mats = _cat2(mats, tail)
    return tuple(m[0] for m in mats)


def _tree_product_deriv(mats, derivs):
    """Tree product carrying d/dlambda by the product rule: (P2 P1, P2 D1 + D2 P1)."""
    while mats[0].shape[0] > 1:
        lo, hi, tail_p = _split_pairs(mats)
        dlo, dhi, tail_d = _split_pairs(derivs)
        new_d = _add2(_mul2(hi, dlo), _mul2(dhi, lo))
        mats = _mul2(hi, lo)
        if tail_p is not None:
            mats = _cat2(mats, tail_p)
            new_d = _cat2(new_d, tail_d)
        derivs = new_d
    return tuple(m[0] for m in mats), tuple(d[0] for d in derivs)


class _TransferEvaluator:
    """Monodromy entries for one (potential, cells) pair, vectorized over lambda."""

    def __init__(self, phi: Potential, cells: int):
        if cells < phi.phi1.grid.point_count:
            raise ConfigError("cells must be >= grid point_count")
        self.cells = cells
        self.h = 1.0 / cells
        self.mid1, self.mid2 = phi.midpoint_values(cells)

    def entries(self, lam: np.ndarray):
        lam = np.atleast_1d(np.asarray(lam, dtype=complex))
        out = [np.empty(lam.shape[0], dtype=complex) for _ in range(4)]
        step = max(1, _CHUNK_TARGET // self.cells)
        for start in range(0, lam.shape[0], step):
            sl = slice(start, start + step)
            factors = _cell_factors(self.mid1, self.mid2, self.h, lam[sl])
            for dst, val in zip(out, _tree_product(factors)):
                dst[sl] = val
        return out

    def delta(self, lam: np.ndarray) -> np.ndarray:
        m11, _, _, m22 = self.entries(lam)
        return m11 + m22

    def _check_real(self, d: np.ndarray) -> np.ndarray:
        scale = max(1.0, float(np.max(np.abs(d))))
        if np.max(np.abs(d.imag)) > _IMAG_TOL * scale:
            raise RuntimeError(
                "internal: discriminant not real on the real axis "
                f"(max imag {np.max(np.abs(d.imag)):.3e}); potential not conjugate-pair?"
            )
        return d.real

    def delta_real(self, lam_real: np.ndarray) -> np.ndarray:
        """Delta on the real axis; verifies it is real (conjugate-pair potential)."""
        return self._check_real(self.delta(np.asarray(lam_real, dtype=float)))

    def delta_derivative_real(self, lam_real: np.ndarray) -> np.ndarray:
        """Exact d Delta / d lambda on the real axis (product rule through the tree)."""
        lam = np.atleast_1d(np.asarray(lam_real, dtype=complex))
        out = np.empty(lam.shape[0], dtype=complex)
        step = max(1, (_CHUNK_TARGET // 2) // self.cells)
        for start in range(0, lam.shape[0], step):
            sl = slice(start, start + step)
            mats, derivs = _cell_factors(self.mid1, self.mid2, self.h, lam[sl],
                                         with_derivative=True)
            _, (d11, _, _, d22) = _tree_product_deriv(mats, derivs)
            out[sl] = d11 + d22
        return self._check_real(out)


@dataclass(frozen=True)
class MonodromyMatrix:
    lam: complex
    m11: complex
    m12: complex
    m21: complex
    m22: complex

    @property
    def trace(self) -> complex:
        return self.m11 + self.m22

    @property
    def det(self) -> complex:
        return self.m11 * self.m22 - self.m12 * self.m21


def monodromy(phi: Potential, lam: complex, cells: int | None = None) -> MonodromyMatrix:
    """Period-1 fundamental matrix at spectral parameter lam."""
    cells = default_cells(phi) if cells is None else cells
    ev = _TransferEvaluator(phi, cells)
    m11, m12, m21, m22 = (x[0] for x in ev.entries(np.array([lam], dtype=complex)))
    return MonodromyMatrix(lam=complex(lam), m11=complex(m11), m12=complex(m12),
                           m21=complex(m21), m22=complex(m22))


def discriminant(phi: Potential, lam, cells: int | None = None):
    """Delta(lambda) = trace of the monodromy; scalar in, scalar out."""
    cells = default_cells(phi) if cells is None else cells
    ev = _TransferEvaluator(phi, cells)
    lam_arr = np.atleast_1d(np.asarray(lam, dtype=complex))
    vals = ev.delta(lam_arr)
    if np.isscalar(lam) or np.asarray(lam).ndim == 0:
        return complex(vals[0])
    return vals


def discriminant_derivative(phi: Potential, lam, cells: int | None = None):
    """d Delta / d lambda at real lam; scalar in, scalar out."""
    cells = default_cells(phi) if cells is None else cells
    ev = _TransferEvaluator(phi, cells)
    lam_arr = np.atleast_1d(np.asarray(lam, dtype=float))
    vals = ev.delta_derivative_real(lam_arr)
    if np.isscalar(lam) or np.asarray(lam).ndim == 0:
        return float(vals[0])
    return vals


def default_cells(phi: Potential) -> int:
    return 4 * phi.phi1.grid.point_count


# ---- gap table ----------------------------------------------------------------


@dataclass
class GapTable:
    """Per-index eigenvalue pairs with midpoints, widths and open flags."""

    index: np.ndarray         # ints, -K..K
    lambda_minus: np.ndarray
    lambda_plus: np.ndarray
    tau: np.ndarray
    gamma: np.ndarray
    open_flag: np.ndarray     # bool
    gap_tol_coeff: float
    cells: int

    @property
    def K(self) -> int:
        return int(self.index[-1])

    def _pos(self, n: int) -> int:
        pos = n + self.K
        if not (0 <= pos < len(self.index)) or self.index[pos] != n:
            raise ConfigError(f"gap index {n} not in table range [-{self.K}, {self.K}]")
        return pos

    def interval(self, n: int) -> tuple[float, float]:
        pos = self._pos(n)
        return float(self.lambda_minus[pos]), float(self.lambda_plus[pos])

    def tau_of(self, n: int) -> float:
        return float(self.tau[self._pos(n)])

    def gamma_of(self, n: int) -> float:
        return float(self.gamma[self._pos(n)])

    def is_open(self, n: int) -> bool:
        return bool(self.open_flag[self._pos(n)])

    def open_indices(self) -> list[int]:
        return [int(n) for n in self.index[self.open_flag]]

    def neighbor_clearance(self, n: int) -> float:
        """Distance from gap n's interval to the nearest other stored interval.

        At the table edge the missing neighbor is assumed at its window edge
        (center (n±1)pi, half-width pi/2), which is conservative.
        """
        pos = self._pos(n)
        if pos + 1 < len(self.index):
            right = self.lambda_minus[pos + 1] - self.lambda_plus[pos]
        else:
            right = ((n + 1) * np.pi - np.pi / 2.0) - self.lambda_plus[pos]
        if pos - 1 >= 0:
            left = self.lambda_minus[pos] - self.lambda_plus[pos - 1]
        else:
            left = self.lambda_minus[pos] - ((n - 1) * np.pi + np.pi / 2.0)
        return float(min(left, right))

    def gamma_squared_tail_estimate(self) -> float:
        """Extrapolated sum of gamma^2 beyond the table, from the outer decay.

        Fits log gamma^2 against log |k| over the outermost open gaps on each
        side (|k| >= K/2) and sums the fitted power law beyond K.  Returns 0
        when everything out there is already closed.
        """
        K = self.K
        sel = self.open_flag & (np.abs(self.index) >= max(2, K // 2))
        if not np.any(sel):
            return 0.0
        kk = np.abs(self.index[sel]).astype(float)
        g2 = self.gamma[sel] ** 2
        if np.unique(kk).size < 2:
            # one sampled |k|: assume the slowest summable decay through its peak
            c = float(np.max(g2)) * kk[0] ** 2
            return float(2.0 * c / K)
        slope, logc = np.polyfit(np.log(kk), np.log(np.maximum(g2, 1e-300)), 1)
        p = -slope
        if p <= 1.0:
            p = 2.0  # decay too shallow to integrate; fall back to the generic rate
        c = np.exp(logc)
        # sum_{k>K} c k^-p  ~  c K^{1-p}/(p-1), both signs of k
        return float(2.0 * c * K ** (1.0 - p) / (p - 1.0))


def write_gap_csv(gaps: GapTable, path) -> None:
    lines = ["n,lambda_minus,lambda_plus,tau,gamma,open"]
    for i, n in enumerate(gaps.index):
        lines.append(",".join([
            str(int(n)),
            _format_float(gaps.lambda_minus[i]),
            _format_float(gaps.lambda_plus[i]),
            _format_float(gaps.tau[i]),
            _format_float(gaps.gamma[i]),
            "1" if gaps.open_flag[i] else "0",
        ]))
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


# ---- root localization ----------------------------------------------------------


def _bisect_batch(f, lo: np.ndarray, hi: np.ndarray, f_lo_sign: np.ndarray,
                  tol: float) -> np.ndarray:
    """Vectorized bisection; f maps a lambda array to values, signs from f_lo_sign."""
    lo = lo.astype(float).copy()
    hi = hi.astype(float).copy()
    span = float(np.max(hi - lo, initial=0.0))
    if span <= 0.0:
        return lo
    n_iter = int(np.ceil(np.log2(span / tol))) + 1
    for _ in range(n_iter):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        same = np.sign(fm) == f_lo_sign
        lo = np.where(same, mid, lo)
        hi = np.where(same, hi, mid)
    return 0.5 * (lo + hi)


def count_zeros_box(phi: Potential, center: float, half_width: float,
                    half_height: float, cells: int | None = None,
                    samples: int = 400) -> int:
    """Zeros of Delta^2 - 4 inside a rectangle, by winding number of its boundary image."""
    cells = default_cells(phi) if cells is None else cells
    ev = _TransferEvaluator(phi, cells)
    c, w, h = center, half_width, half_height
    quarter = max(samples // 4, 8)
    # counterclockwise, so the winding equals the zero count
    bottom = np.linspace(c - w - 1j * h, c + w - 1j * h, quarter, dtype=complex)
    right = np.linspace(c + w - 1j * h, c + w + 1j * h, quarter, dtype=complex)
    top = np.linspace(c + w + 1j * h, c - w + 1j * h, quarter, dtype=complex)
    left = np.linspace(c - w + 1j * h, c - w - 1j * h, quarter, dtype=complex)
    boundary = np.concatenate([bottom[:-1], right[:-1], top[:-1], left[:-1]])
    vals = ev.delta(boundary) ** 2 - 4.0
    ratios = vals / np.roll(vals, 1)
    winding = np.sum(np.angle(ratios)) / (2.0 * np.pi)
    return int(np.rint(winding))


def periodic_spectrum(phi: Potential, K: int, cells: int | None = None,
                      scan_points: int = 41, bisect_tol: float = 1e-11,
                      gap_tol_coeff: float = 1e-9,
                      critical_value_floor: float = _CRITICAL_VALUE_FLOOR) -> GapTable:
    """Locate both zeros of Delta^2 - 4 in every window |lambda - n pi| <= pi/2.

    In window n the relevant branch is s*Delta - 2 with s = (-1)^n: it is
    negative in the neighboring bands, nonnegative on the gap, and has either
    two simple zeros (open gap) or a double zero at its critical point
    (closed gap).  Strategy per window:

      * scan for sign changes; two changes -> bisect each bracket;
      * no change -> bisect d Delta/d lambda for the single critical point;
        a positive value there means the scan missed a narrow open gap
        (bisect both halves), a tiny nonpositive value means a closed gap;
      * anything else -> resolution error, with a winding-number recount
        included in the diagnostics.

    The opposite branch -s*Delta - 2 must stay strictly negative in the
    window; a crossing there means the window/counting hypothesis failed.
    """
    if K < 4:
        raise ConfigError(f"K must be >= 4, got {K}")
    cells = default_cells(phi) if cells is None else cells
    if scan_points < 9:
        raise ConfigError("scan_points must be >= 9")
    ev = _TransferEvaluator(phi, cells)

    idx = np.arange(-K, K + 1)
    centers = idx * np.pi
    offsets = np.linspace(-np.pi / 2.0, np.pi / 2.0, scan_points)
    lam_grid = (centers[:, None] + offsets[None, :]).ravel()
    delta_grid = ev.delta_real(lam_grid).reshape(len(idx), scan_points)
    signs = np.where(idx % 2 == 0, 1.0, -1.0)

    lam_minus = np.empty(len(idx))
    lam_plus = np.empty(len(idx))

    # classify windows
    brackets_lo, brackets_hi, brackets_sign, brackets_slot = [], [], [], []
    crit_windows = []
    for i, n in enumerate(idx):
        g = signs[i] * delta_grid[i] - 2.0
        other = -signs[i] * delta_grid[i] - 2.0
        ss = np.sign(g)
        ss[ss == 0] = 1.0
        changes = np.nonzero(ss[:-1] != ss[1:])[0]
        if np.any(np.sign(other)[:-1] != np.sign(other)[1:]) or np.any(other >= 0):
            raise ResolutionError(
                f"window {n}: opposite discriminant branch crosses 2; "
                f"winding count {count_zeros_box(phi, centers[i], np.pi / 2, 1.0, cells)}"
            )
        grid = centers[i] + offsets
        if np.max(g) <= _SCAN_TRUST_FLOOR:
            # at or below the noise scale of a double root: decide via Delta'
            crit_windows.append(i)
        elif len(changes) == 2:
            for j, c in enumerate(changes):
                brackets_lo.append(grid[c])
                brackets_hi.append(grid[c + 1])
                brackets_sign.append(ss[c])
                brackets_slot.append(2 * i + j)
        elif len(changes) == 0:
            crit_windows.append(i)
        else:
            raise ResolutionError(
                f"window {n}: {len(changes)} sign changes in the scan; "
                f"winding count {count_zeros_box(phi, centers[i], np.pi / 2, 1.0, cells)}"
            )

    # open gaps caught by the scan
    if brackets_lo:
        lo = np.array(brackets_lo)
        hi = np.array(brackets_hi)
        sgn_lo = np.array(brackets_sign)
        slot = np.array(brackets_slot, dtype=int)
        window_sign = signs[slot // 2]

        def g_eval(lam):
            return window_sign * ev.delta_real(lam) - 2.0

        roots = _bisect_batch(g_eval, lo, hi, sgn_lo, bisect_tol)
        for s, r in zip(slot, roots):
            if s % 2 == 0:
                lam_minus[s // 2] = r
            else:
                lam_plus[s // 2] = r

    # windows with no scan crossing: find the critical point of Delta first
    if crit_windows:
        ci = np.array(crit_windows, dtype=int)
        dgrid = ev.delta_derivative_real(
            (centers[ci][:, None] + offsets[None, :]).ravel()
        ).reshape(len(ci), scan_points)
        crit_lo = np.empty(len(ci))
        crit_hi = np.empty(len(ci))
        crit_sign = np.empty(len(ci))
        for j, i in enumerate(ci):
            dg = signs[i] * dgrid[j]
            ss = np.sign(dg)
            ss[ss == 0] = 1.0
            changes = np.nonzero(ss[:-1] != ss[1:])[0]
            if len(changes) != 1:
                raise ResolutionError(
                    f"window {idx[i]}: {len(changes)} critical points of the "
                    f"discriminant; winding count "
                    f"{count_zeros_box(phi, centers[i], np.pi / 2, 1.0, cells)}"
                )
            c = changes[0]
            grid = centers[i] + offsets
            crit_lo[j] = grid[c]
            crit_hi[j] = grid[c + 1]
            crit_sign[j] = ss[c]

        win_sign = signs[ci]

        def dg_eval(lam):
            # one derivative batch per bisection round, all windows at once
            return win_sign * ev.delta_derivative_real(lam)

        crit = _bisect_batch(dg_eval, crit_lo, crit_hi, crit_sign, bisect_tol)
        g_at_crit = win_sign * ev.delta_real(crit) - 2.0

        # narrow open gaps missed by the scan: the critical value is positive
        narrow = np.nonzero(g_at_crit > critical_value_floor)[0]
        if len(narrow):
            lows = centers[ci[narrow]] - np.pi / 2.0
            highs = centers[ci[narrow]] + np.pi / 2.0
            ns = win_sign[narrow]

            def g_eval_narrow(lam):
                return ns * ev.delta_real(lam) - 2.0

            left = _bisect_batch(g_eval_narrow, lows, crit[narrow],
                                 np.full(len(narrow), -1.0), bisect_tol)
            right = _bisect_batch(g_eval_narrow, crit[narrow], highs,
                                  np.full(len(narrow), 1.0), bisect_tol)
            for pos, j in enumerate(narrow):
                lam_minus[ci[j]] = left[pos]
                lam_plus[ci[j]] = right[pos]

        closed = np.nonzero(g_at_crit <= critical_value_floor)[0]
        too_low = np.nonzero(g_at_crit < -_CLOSED_VALUE_TOL)[0]
        if len(too_low):
            i = ci[too_low[0]]
            raise ResolutionError(
                f"window {idx[i]}: no root (critical value {g_at_crit[too_low[0]]:.3e}); "
                f"winding count {count_zeros_box(phi, centers[i], np.pi / 2, 1.0, cells)}"
            )
        for j in closed:
            lam_minus[ci[j]] = crit[j]
            lam_plus[ci[j]] = crit[j]

    # assemble and verify
    swap = lam_minus > lam_plus
    lam_minus[swap], lam_plus[swap] = lam_plus[swap], lam_minus[swap]
    if np.any(lam_plus[:-1] >= lam_minus[1:]):
        raise ResolutionError("gap intervals out of order; windows are not separating")
    tau = 0.5 * (lam_minus + lam_plus)
    gamma = lam_plus - lam_minus
    gap_tol = gap_tol_coeff * np.maximum(1.0, np.abs(idx))
    return GapTable(index=idx, lambda_minus=lam_minus, lambda_plus=lam_plus,
                    tau=tau, gamma=gamma, open_flag=gamma > gap_tol,
                    gap_tol_coeff=gap_tol_coeff, cells=cells)


# ---- asymptotic checks ----------------------------------------------------------


def tau_asymptotics_check(gaps: GapTable, phi: Potential) -> tuple[np.ndarray, np.ndarray]:
    """k^2 * |tau_k - k pi - (integral phi1 phi2)/(2 pi k)| for k != 0; bounded."""
    pair = phi.pair_integral()
    nz = gaps.index != 0
    k = gaps.index[nz].astype(float)
    residual = np.abs(gaps.tau[nz] - k * np.pi - pair / (2.0 * np.pi * k))
    return gaps.index[nz].copy(), (k**2) * residual


def tau_square_residuals(gaps: GapTable, phi: Potential) -> tuple[np.ndarray, np.ndarray]:
    """|n| * |tau_n^2 - n^2 pi^2 - integral phi1 phi2| for n != 0; bounded."""
    pair = phi.pair_integral()
    nz = gaps.index != 0
    k = gaps.index[nz].astype(float)
    residual = np.abs(gaps.tau[nz] ** 2 - (k * np.pi) ** 2 - pair)
    return gaps.index[nz].copy(), np.abs(k) * residual
