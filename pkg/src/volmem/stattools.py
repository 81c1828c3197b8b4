"""Estimators and tests: DFA/Hurst, Hill, Kolmogorov-Smirnov, divergences.

All functions are pure; nothing here draws random numbers.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DomainError, FitError, InsufficientDataError


@dataclass(frozen=True)
class DfaResult:
    """Fluctuation function F(l) with the fitted scaling exponent H."""

    ells: np.ndarray
    F: np.ndarray
    H: float
    h_stderr: float
    fit_r: float
    fit_range: tuple


@dataclass(frozen=True)
class HillResult:
    k: int
    alpha_hat: float
    trace_k: np.ndarray
    trace_alpha: np.ndarray


@dataclass(frozen=True)
class KsResult:
    """D statistic, asymptotic p-value, and p_star = 1 - p_value.

    p_star follows the reporting convention 1 - alpha_crit, where
    alpha_crit is the significance level at which the observed D sits
    exactly on the rejection boundary, i.e. the achieved p-value.
    """

    D: float
    p_value: float
    n_eff: float

    @property
    def p_star(self) -> float:
        return 1.0 - self.p_value


@dataclass(frozen=True)
class MomentSummary:
    mean: float
    variance: float
    kurtosis: float
    count: int


def _geometric_grid(lo: int, hi: int, points: int) -> np.ndarray:
    grid = np.unique(np.round(np.geomspace(lo, hi, points)).astype(int))
    return grid[grid >= 4]


def dfa(series, detrend_order: int = 1, ell_grid=None, fit_range=None,
        grid_points: int = 20) -> DfaResult:
    """Detrended fluctuation analysis of a 1-d series.

    Profile = cumulative sum of the mean-subtracted series; for each
    segment size l the series is cut into non-overlapping segments (swept
    from both ends), each detrended by a polynomial of the given order,
    and F(l) is the RMS residual.  H is the slope of log F vs log l over
    ``fit_range`` (default: the whole grid, which itself defaults to 20
    geometric points in [10, N/10]).
    """
    x = np.asarray(series, dtype=float)
    n = len(x)
    if detrend_order < 1:
        raise DomainError("detrend_order must be >= 1")
    if ell_grid is None:
        if n < 100:
            raise InsufficientDataError(f"series too short for DFA: {n} points")
        ell_grid = _geometric_grid(10, max(n // 10, 12), grid_points)
    ells = np.asarray(ell_grid, dtype=int)
    if n < 4 * ells.max():
        raise InsufficientDataError(
            f"series length {n} < 4 * max segment size {ells.max()}"
        )
    profile = np.cumsum(x - x.mean())
    F = np.empty(len(ells), dtype=float)
    for idx, ell in enumerate(ells):
        k = n // ell
        tt = np.arange(ell, dtype=float)
        # orthonormal basis of polynomials on the segment; residual power
        # is |y|^2 - |Q^T y|^2
        V = np.vander(tt, detrend_order + 1, increasing=True)
        Q, _ = np.linalg.qr(V)
        segs_fwd = profile[: k * ell].reshape(k, ell)
        segs_bwd = profile[n - k * ell:].reshape(k, ell)
        segs = np.vstack([segs_fwd, segs_bwd])
        coeffs = segs @ Q
        ss = np.einsum("ij,ij->i", segs, segs) - np.einsum("ij,ij->i", coeffs, coeffs)
        F[idx] = math.sqrt(max(ss.mean() / ell, 0.0))
    if fit_range is None:
        fit_range = (int(ells.min()), int(ells.max()))
    mask = (ells >= fit_range[0]) & (ells <= fit_range[1]) & (F > 0)
    if mask.sum() < 3:
        raise InsufficientDataError("fewer than 3 usable points in the DFA fit range")
    lx, ly = np.log(ells[mask].astype(float)), np.log(F[mask])
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    m = mask.sum()
    sxx = np.sum((lx - lx.mean()) ** 2)
    h_stderr = math.sqrt(max(resid @ resid, 0.0) / max(m - 2, 1) / sxx)
    fit_r = float(np.corrcoef(lx, ly)[0, 1])
    H = float(slope)
    if not 0.0 < H < 1.2:
        warnings.warn(f"fitted H = {H:.3f} outside the supported range (0, 1.2)",
                      stacklevel=2)
    return DfaResult(ells=ells, F=F, H=H, h_stderr=float(h_stderr),
                     fit_r=fit_r, fit_range=(int(fit_range[0]), int(fit_range[1])))


def hill(series, k: int | None = None) -> HillResult:
    """Hill estimator of the tail exponent of |series|.

    alpha_hat = k / sum_{j<=k} ln(x_(j) / x_(k+1)) over descending order
    statistics.  The per-k trace is returned so a plateau can be inspected;
    the default k is ceil(0.05 n).
    """
    x = np.abs(np.asarray(series, dtype=float))
    n = len(x)
    if k is None:
        k = int(math.ceil(0.05 * n))
    if k < 10:
        raise DomainError(f"k must be >= 10, got {k}")
    if k >= n / 2:
        raise DomainError(f"k must be < n/2 = {n / 2}, got {k}")
    xs = np.sort(x)[::-1]
    if xs[k] <= 0:
        raise DomainError("tail order statistics must be positive")
    logs = np.log(xs[: k + 1])
    csum = np.cumsum(logs[:-1])
    ks = np.arange(1, k + 1)
    denom = csum - ks * logs[1 : k + 1]
    with np.errstate(divide="ignore", invalid="ignore"):
        trace = ks / denom
    alpha = float(trace[-1])
    if not math.isfinite(alpha) or denom[-1] <= 0:
        raise DomainError("degenerate tail: zero Hill denominator")
    return HillResult(k=int(k), alpha_hat=alpha, trace_k=ks, trace_alpha=trace)


def _kolmogorov_pvalue(d: float, n_eff: float) -> float:
    """Asymptotic Kolmogorov survival probability with finite-n scaling."""
    rt = math.sqrt(n_eff)
    lam = (rt + 0.12 + 0.11 / rt) * d
    return float(min(max(special.kolmogorov(lam), 0.0), 1.0))


def ks_one_sample(data, cdf) -> KsResult:
    """Two-sided KS test of a sample against a distribution function.

    D = max_i max(F(x_i) - (i-1)/n, i/n - F(x_i)) over the sorted sample.
    """
    x = np.sort(np.asarray(data, dtype=float))
    n = len(x)
    if n == 0:
        raise InsufficientDataError("empty sample")
    f = np.asarray(cdf(x), dtype=float)
    i = np.arange(1, n + 1)
    d_plus = np.max(i / n - f)
    d_minus = np.max(f - (i - 1) / n)
    d = float(max(d_plus, d_minus))
    return KsResult(D=d, p_value=_kolmogorov_pvalue(d, n), n_eff=float(n))


def ks_two_sample(x, y) -> KsResult:
    """Two-sided two-sample KS test with effective size n*m/(n+m)."""
    x = np.sort(np.asarray(x, dtype=float))
    y = np.sort(np.asarray(y, dtype=float))
    n, m = len(x), len(y)
    if n == 0 or m == 0:
        raise InsufficientDataError("both samples must be nonempty")
    xy = np.concatenate([x, y])
    cdf_x = np.searchsorted(x, xy, side="right") / n
    cdf_y = np.searchsorted(y, xy, side="right") / m
    d = float(np.max(np.abs(cdf_x - cdf_y)))
    n_eff = n * m / (n + m)
    return KsResult(D=d, p_value=_kolmogorov_pvalue(d, n_eff), n_eff=float(n_eff))


def symmetrized_kl(p, q, grid) -> float:
    """(1/2)[int p ln(p/q) + int q ln(q/p)] by the trapezoid rule.

    Both densities are renormalized on the grid (they must already
    integrate to 1 within 1e-6).  Nodes where either density vanishes are
    excluded; if the excluded probability mass exceeds 1e-4 a warning is
    emitted.
    """
    grid = np.asarray(grid, dtype=float)
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != grid.shape or q.shape != grid.shape:
        raise DomainError("p, q and grid must have identical shapes")
    if (p < 0).any() or (q < 0).any():
        raise DomainError("densities must be nonnegative")
    ip = np.trapezoid(p, grid)
    iq = np.trapezoid(q, grid)
    if abs(ip - 1) > 1e-6 or abs(iq - 1) > 1e-6:
        raise DomainError(
            f"densities must integrate to 1 within 1e-6 on the grid "
            f"(got {ip:.8f}, {iq:.8f})"
        )
    keep = (p > 0) & (q > 0)
    lost = max(np.trapezoid(np.where(keep, 0.0, p), grid),
               np.trapezoid(np.where(keep, 0.0, q), grid))
    if lost > 1e-4:
        warnings.warn(f"zero-density nodes excluded; mass loss {lost:.2e} > 1e-4",
                      stacklevel=2)
    pk = p[keep] / ip
    qk = q[keep] / iq
    g = grid[keep]
    log_ratio = np.log(pk) - np.log(qk)
    return float(0.5 * (np.trapezoid(pk * log_ratio, g) - np.trapezoid(qk * log_ratio, g)))


def acf(series, max_lag: int) -> np.ndarray:
    """Biased sample autocorrelation at lags 0..max_lag."""
    x = np.asarray(series, dtype=float)
    n = len(x)
    if max_lag >= n:
        raise DomainError("max_lag must be < series length")
    xc = x - x.mean()
    denom = float(xc @ xc)
    if denom == 0:
        raise DomainError("zero-variance series has no autocorrelation")
    out = np.empty(max_lag + 1)
    out[0] = 1.0
    for k in range(1, max_lag + 1):
        out[k] = float(xc[:-k] @ xc[k:]) / denom
    return out


def fit_exp_time(acf_values, threshold: float = 0.05) -> float:
    """Decay time from least squares of ln(acf) on the lag index.

    ``acf_values[k]`` is the autocorrelation at lag k (index 0 = lag 0).
    Only lags k >= 1 with acf above the threshold enter the fit.
    """
    a = np.asarray(acf_values, dtype=float)
    lags = np.arange(len(a))
    mask = (lags >= 1) & (a > threshold)
    if mask.sum() < 2:
        raise FitError("fewer than 2 autocorrelation values above threshold")
    slope, _ = np.polyfit(lags[mask], np.log(a[mask]), 1)
    if slope >= 0:
        raise FitError(f"autocorrelation does not decay (slope {slope:.3g})")
    return float(-1.0 / slope)


def moments(series) -> MomentSummary:
    """Mean, unbiased variance, and kurtosis m4/m2^2."""
    x = np.asarray(series, dtype=float)
    n = len(x)
    if n < 4:
        raise InsufficientDataError("need at least 4 observations")
    mu = float(x.mean())
    xc = x - mu
    m2 = float((xc ** 2).mean())
    if m2 == 0:
        raise DomainError("kurtosis undefined for a constant series")
    m4 = float((xc ** 4).mean())
    var = float(xc @ xc / (n - 1))
    return MomentSummary(mean=mu, variance=var, kurtosis=m4 / m2 ** 2, count=n)


def standardize_sample(x) -> np.ndarray:
    """Zero-mean, unit-variance copy (ddof=1)."""
    x = np.asarray(x, dtype=float)
    sd = x.std(ddof=1)
    if sd == 0:
        raise DomainError("cannot standardize a zero-variance sample")
    return (x - x.mean()) / sd
