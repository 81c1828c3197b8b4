"""Fat-tail density family, volatility-law fits, and mixture closed forms.

The central family is

    P(z) = Z^{-1} (1 + B |z|^{2 nu})^{1/(1 - q')},      q' > 1

whose tails decay like |z|^{-2 nu/(q'-1)}.  The q' = 1 member is defined
as the stretched exponential Z^{-1} exp(-B |z|^{2 nu}) (an explicit
analytic branch, not a numerical limit).  The tail index q maps the decay
exponent to the nu = 1 convention: 2/(q-1) = 2 nu/(q'-1).

Normalization and moments come from the closed form

    int z^n (1 + B z^{2 nu})^{1/(1-q')} dz
        = (1/nu) B^{-(n+1)/(2 nu)} Beta((n+1)/(2 nu), 1/(q'-1) - (n+1)/(2 nu))

for even n, finite while 2 nu/(q'-1) > n + 1.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, special

from .errors import DomainError, FitError, InsufficientDataError
from .stattools import hill as hill_estimator

__all__ = [
    "GqParams", "GqFit", "Gumbel2Params", "MixtureParams", "BinnedDensity",
    "gq_pdf", "gq_logpdf", "gq_cdf", "gq_moment", "gq_sample", "tail_index",
    "fit_gq_mle", "fit_gq_binned", "bin_density",
    "fit_gumbel2", "gumbel2_pdf", "gumbel2_sample", "predict_tail_from_sigma",
    "detect_crossover",
    "expint_ei", "mixture_pdf", "mixture_kurtosis", "mixture_variance",
]


# ---------------------------------------------------------------------------
# The density family

@dataclass(frozen=True)
class GqParams:
    """Shape q' >= 1, stretching nu > 0, scale B > 0."""

    q_prime: float
    nu: float
    B: float

    def __post_init__(self):
        if self.q_prime < 1:
            raise DomainError(f"q_prime must be >= 1, got {self.q_prime}")
        if self.nu <= 0:
            raise DomainError(f"nu must be positive, got {self.nu}")
        if self.B <= 0:
            raise DomainError(f"B must be positive, got {self.B}")
        if self.q_prime > 1 and 2 * self.nu / (self.q_prime - 1) <= 1:
            raise DomainError(
                f"not normalizable: 2 nu/(q'-1) = "
                f"{2 * self.nu / (self.q_prime - 1):.4g} <= 1"
            )

    @property
    def q_tail(self) -> float:
        return tail_index(self.q_prime, self.nu)


def tail_index(q_prime: float, nu: float) -> float:
    """q = (q' + nu - 1)/nu, the nu=1-equivalent tail shape."""
    if nu <= 0:
        raise DomainError(f"nu must be positive, got {nu}")
    return (q_prime + nu - 1.0) / nu


def _log_norm(params: GqParams) -> float:
    """log of the normalizing constant Z."""
    a = 1.0 / (2.0 * params.nu)
    if params.q_prime == 1.0:
        return (-math.log(params.nu) - a * math.log(params.B)
                + special.gammaln(a))
    u = 1.0 / (params.q_prime - 1.0)
    if u - a <= 0:
        raise DomainError("not normalizable")
    return (-math.log(params.nu) - a * math.log(params.B)
            + special.gammaln(a) + special.gammaln(u - a) - special.gammaln(u))


def gq_logpdf(params: GqParams, z) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    power = np.abs(z) ** (2.0 * params.nu)
    if params.q_prime == 1.0:
        core = -params.B * power
    else:
        core = -np.log1p(params.B * power) / (params.q_prime - 1.0)
    return core - _log_norm(params)


def gq_pdf(params: GqParams, z) -> np.ndarray:
    """Density of the family at z (vectorized)."""
    return np.exp(gq_logpdf(params, z))


def gq_cdf(params: GqParams, z) -> np.ndarray:
    """Distribution function, exact via incomplete Beta/Gamma."""
    z = np.asarray(z, dtype=float)
    a = 1.0 / (2.0 * params.nu)
    power = params.B * np.abs(z) ** (2.0 * params.nu)
    if params.q_prime == 1.0:
        half = special.gammainc(a, power)
    else:
        u = 1.0 / (params.q_prime - 1.0)
        half = special.betainc(a, u - a, power / (1.0 + power))
    return 0.5 + 0.5 * np.sign(z) * half


def gq_sample(params: GqParams, n: int, rng: np.random.Generator) -> np.ndarray:
    """Exact inverse-CDF sample of size n."""
    u = rng.random(int(n))
    sign = np.where(rng.random(int(n)) < 0.5, -1.0, 1.0)
    a = 1.0 / (2.0 * params.nu)
    if params.q_prime == 1.0:
        g = special.gammaincinv(a, u)
        zpow = g / params.B
    else:
        uu = 1.0 / (params.q_prime - 1.0)
        x = special.betaincinv(a, uu - a, u)
        zpow = x / (params.B * (1.0 - x))
    return sign * zpow ** (1.0 / (2.0 * params.nu))


def gq_moment(params: GqParams, n: int) -> float:
    """E[z^n] for even n (odd moments vanish by symmetry).

    Requires 2 nu/(q'-1) > n + 1 when q' > 1, otherwise the moment
    diverges.
    """
    if n < 0 or n % 2 == 1:
        if n % 2 == 1:
            return 0.0
        raise DomainError("n must be a nonnegative even integer")
    a_n = (n + 1.0) / (2.0 * params.nu)
    a_0 = 1.0 / (2.0 * params.nu)
    if params.q_prime == 1.0:
        log_in = -a_n * math.log(params.B) + special.gammaln(a_n) - math.log(params.nu)
        log_i0 = -a_0 * math.log(params.B) + special.gammaln(a_0) - math.log(params.nu)
        return math.exp(log_in - log_i0)
    u = 1.0 / (params.q_prime - 1.0)
    bound = 2.0 * params.nu / (params.q_prime - 1.0)
    if bound <= n + 1:
        raise DomainError(
            f"moment of order {n} diverges: requires 2 nu/(q'-1) > {n + 1}, "
            f"got {bound:.4g}"
        )
    log_in = (-a_n * math.log(params.B) + special.gammaln(a_n)
              + special.gammaln(u - a_n))
    log_i0 = (-a_0 * math.log(params.B) + special.gammaln(a_0)
              + special.gammaln(u - a_0))
    return math.exp(log_in - log_i0)


def _variance_at_b1(q_prime: float, nu: float) -> float:
    """Variance of the family member with B = 1 (scale reference)."""
    return gq_moment(GqParams(q_prime, nu, 1.0), 2)


# ---------------------------------------------------------------------------
# Fitting

@dataclass(frozen=True)
class GqFit:
    params: GqParams
    loglik: float
    q_tail: float
    chi2_per_bin: float
    r2: float
    hill_crosscheck: float
    meta: dict = field(default_factory=dict)


def _neg_loglik(theta, absz_pow_cache, n, fix, q1_floor):
    """theta in (q'-1, nu, B) space with fixed components removed."""
    q1, nu, B = fix(theta)
    if not (q1 >= q1_floor and nu > 0 and B > 0):
        return np.inf
    if q1 > 0 and 2 * nu / q1 <= 1.0:
        return np.inf
    try:
        params = GqParams(1.0 + q1, nu, B)
        lz = _log_norm(params)
    except DomainError:
        return np.inf
    absz, cache_nu, cache_pow = absz_pow_cache
    if cache_nu[0] != nu:
        cache_pow[:] = absz ** (2.0 * nu)
        cache_nu[0] = nu
    if q1 == 0:
        core = -B * cache_pow
    else:
        core = -np.log1p(B * cache_pow) / q1
    return -(core.sum() - n * lz)


def fit_gq_mle(data, fix_nu: float | None = None, fix_qprime: float | None = None,
               restarts: int = 50, tol: float = 1e-8) -> GqFit:
    """Maximum-likelihood fit of the family by multi-start Nelder-Mead.

    Starts from a 3x3x3 grid over (q', nu) with the scale B matched to the
    sample variance at each shape, polishes the best point until the
    log-likelihood improves by less than ``tol`` (restart budget
    ``restarts``).  ``fix_nu``/``fix_qprime`` pin parameters.  The tail
    exponent 2/(q_tail - 1) is cross-checked against the Hill estimator on
    the same data (stored, not enforced).
    """
    x = np.asarray(data, dtype=float)
    n = len(x)
    if n < 50:
        raise InsufficientDataError(f"need at least 50 observations, got {n}")
    absz = np.abs(x)
    var = float(x.var())
    if var <= 0:
        raise DomainError("zero-variance data")

    q_grid = [1.05, 1.3, 1.6] if fix_qprime is None else [float(fix_qprime)]
    nu_grid = [0.7, 1.0, 1.4] if fix_nu is None else [float(fix_nu)]
    # the shape parameter may equal 1 only via fix_qprime (explicit
    # stretched-exponential branch); a free fit stays strictly above 1
    q1_floor = 0.0 if fix_qprime is not None else 1e-10

    cache = (absz, [None], np.empty_like(absz))

    def make_fix():
        if fix_qprime is not None and fix_nu is not None:
            return lambda th: (fix_qprime - 1.0, fix_nu, th[0])
        if fix_qprime is not None:
            return lambda th: (fix_qprime - 1.0, th[0], th[1])
        if fix_nu is not None:
            return lambda th: (th[0], fix_nu, th[1])
        return lambda th: (th[0], th[1], th[2])

    fix = make_fix()

    def pack(q1, nu, B):
        if fix_qprime is not None and fix_nu is not None:
            return [B]
        if fix_qprime is not None:
            return [nu, B]
        if fix_nu is not None:
            return [q1, B]
        return [q1, nu, B]

    trace = []
    best = None
    for q0 in q_grid:
        for nu0 in nu_grid:
            if q0 > 1 and 2 * nu0 / (q0 - 1) <= 3.2:
                b0 = 1.0 / var
            else:
                b0 = (_variance_at_b1(q0, nu0) / var) ** nu0
            for b_start in (b0, 3.0 * b0, b0 / 3.0):
                x0 = np.array(pack(q0 - 1.0, nu0, b_start))
                res = optimize.minimize(
                    _neg_loglik, x0, args=(cache, n, fix, q1_floor), method="Nelder-Mead",
                    options={"xatol": 1e-6, "fatol": tol, "maxiter": 2000},
                )
                trace.append((x0.tolist(), float(res.fun)))
                if np.isfinite(res.fun) and (best is None or res.fun < best.fun):
                    best = res

    if best is None or not np.isfinite(best.fun):
        raise FitError("all optimizer starts failed", trace=trace)

    for _ in range(restarts):
        prev = best.fun
        res = optimize.minimize(
            _neg_loglik, best.x, args=(cache, n, fix, q1_floor), method="Nelder-Mead",
            options={"xatol": 1e-9, "fatol": tol, "maxiter": 4000},
        )
        if np.isfinite(res.fun) and res.fun <= best.fun:
            best = res
        if prev - best.fun < tol:
            break
    else:
        raise FitError(
            f"no convergence after {restarts} restarts", trace=trace
        )

    q1, nu, B = fix(best.x)
    params = GqParams(1.0 + q1, nu, B)
    try:
        h = hill_estimator(x).alpha_hat
    except DomainError:
        h = math.nan
    return GqFit(
        params=params,
        loglik=-float(best.fun),
        q_tail=params.q_tail,
        chi2_per_bin=math.nan,
        r2=math.nan,
        hill_crosscheck=float(h),
        meta={"n": n, "starts": len(trace), "fix_nu": fix_nu, "fix_qprime": fix_qprime},
    )


@dataclass(frozen=True)
class BinnedDensity:
    """Histogram as a density: bin centers, density values, counts."""

    centers: np.ndarray
    density: np.ndarray
    counts: np.ndarray
    bin_width: float
    n: int


def bin_density(data, bins: int = 101, span_stds: float = 6.0,
                min_count: int = 5) -> BinnedDensity:
    """Equal-width histogram over +-span_stds sample stds, sparse bins dropped."""
    x = np.asarray(data, dtype=float)
    sd = x.std()
    if sd == 0:
        raise DomainError("zero-variance data")
    lim = span_stds * sd
    counts, edges = np.histogram(x, bins=bins, range=(-lim, lim))
    width = edges[1] - edges[0]
    centers = 0.5 * (edges[:-1] + edges[1:])
    keep = counts >= min_count
    density = counts / (len(x) * width)
    return BinnedDensity(
        centers=centers[keep], density=density[keep], counts=counts[keep],
        bin_width=float(width), n=len(x),
    )


def fit_gq_binned(histogram: BinnedDensity, fix_nu: float | None = None,
                  fix_qprime: float | None = None) -> GqFit:
    """Least-squares fit of the family to binned density values.

    chi2_per_bin is the mean squared density residual over occupied bins
    and r2 the corresponding determination coefficient.
    """
    h = histogram
    if len(h.centers) < 20:
        raise InsufficientDataError(
            f"need >= 20 occupied bins, got {len(h.centers)}"
        )

    def unpack(theta):
        i = 0
        if fix_qprime is None:
            q1 = theta[i]; i += 1
        else:
            q1 = fix_qprime - 1.0
        if fix_nu is None:
            nu = theta[i]; i += 1
        else:
            nu = fix_nu
        B = theta[i]
        return q1, nu, B

    def resid_fn(theta):
        q1, nu, B = unpack(theta)
        if not (q1 >= 0 and nu > 0 and B > 0):
            return np.inf
        try:
            params = GqParams(1.0 + q1, nu, B)
            model = gq_pdf(params, h.centers)
        except DomainError:
            return np.inf
        return float(np.mean((model - h.density) ** 2))

    var = float(np.sum(h.density * h.centers ** 2 * h.bin_width))
    starts = []
    for q0 in ([1.05, 1.2, 1.5] if fix_qprime is None else [fix_qprime]):
        for nu0 in ([0.8, 1.0, 1.3] if fix_nu is None else [fix_nu]):
            if q0 > 1 and 2 * nu0 / (q0 - 1) <= 3.2:
                b0 = 1.0 / max(var, 1e-12)
            else:
                b0 = (_variance_at_b1(q0, nu0) / max(var, 1e-12)) ** nu0
            theta0 = []
            if fix_qprime is None:
                theta0.append(q0 - 1.0)
            if fix_nu is None:
                theta0.append(nu0)
            theta0.append(b0)
            starts.append(np.array(theta0))

    best = None
    for x0 in starts:
        res = optimize.minimize(resid_fn, x0, method="Nelder-Mead",
                                options={"xatol": 1e-10, "fatol": 1e-16,
                                         "maxiter": 4000})
        if np.isfinite(res.fun) and (best is None or res.fun < best.fun):
            best = res
    if best is None:
        raise FitError("binned fit failed from every start")
    q1, nu, B = unpack(best.x)
    params = GqParams(1.0 + q1 if q1 > 1e-12 else 1.0, nu, B)
    model = gq_pdf(params, h.centers)
    ss_res = float(np.sum((model - h.density) ** 2))
    ss_tot = float(np.sum((h.density - h.density.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else math.nan
    return GqFit(
        params=params, loglik=math.nan, q_tail=params.q_tail,
        chi2_per_bin=ss_res / len(h.centers), r2=r2, hill_crosscheck=math.nan,
        meta={"bins": len(h.centers), "fix_nu": fix_nu, "fix_qprime": fix_qprime},
    )


# ---------------------------------------------------------------------------
# Inverse-power volatility law (type-2 Gumbel / Frechet)

@dataclass(frozen=True)
class Gumbel2Params:
    """Density beta*zeta * exp(-beta s^-zeta) * s^(-zeta-1) on s > 0."""

    beta: float
    zeta: float
    beta_stderr: float = math.nan
    zeta_stderr: float = math.nan

    def __post_init__(self):
        if self.beta <= 0 or self.zeta <= 0:
            raise DomainError("beta and zeta must be positive")


def gumbel2_pdf(params: Gumbel2Params, s) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    pos = s > 0
    sp = s[pos]
    out[pos] = (params.beta * params.zeta * np.exp(-params.beta * sp ** -params.zeta)
                * sp ** (-params.zeta - 1.0))
    return out


def gumbel2_sample(params: Gumbel2Params, n: int, rng: np.random.Generator) -> np.ndarray:
    """Inverse-transform sample: s = (-ln U / beta)^(-1/zeta)."""
    u = rng.random(int(n))
    return (-np.log(u) / params.beta) ** (-1.0 / params.zeta)


def _gumbel2_profile_nll(zeta: float, logs: np.ndarray, s: np.ndarray) -> float:
    """Negative profile log-likelihood; beta is concentrated out.

    Returns a large finite value outside the domain so bounded Brent
    stays well behaved.
    """
    big = 1e300
    if zeta <= 0:
        return big
    with np.errstate(over="ignore"):
        t = s ** -zeta
    m = float(np.mean(t))
    if not np.isfinite(m) or m <= 0:
        return big
    n = len(s)
    beta = 1.0 / m
    # log L = n log(beta zeta) - beta sum t - (zeta+1) sum logs
    ll = n * math.log(beta * zeta) - n - (zeta + 1.0) * float(np.sum(logs))
    return -ll if math.isfinite(ll) else big


def fit_gumbel2(sigma_samples, upper_cut="auto") -> Gumbel2Params:
    """Maximum-likelihood fit of the inverse-power volatility law.

    ``upper_cut``: fit only samples below this value.  "auto" detects the
    crossover where the empirical tail steepens beyond the fitted
    power-law slope (see ``detect_crossover``); None uses every sample.
    Standard errors come from the observed information at the optimum.
    """
    s_all = np.asarray(sigma_samples, dtype=float)
    if (s_all <= 0).any():
        raise DomainError("all samples must be positive")
    if len(s_all) < 100:
        raise InsufficientDataError("need at least 100 samples")
    if np.ptp(s_all) == 0:
        raise FitError("degenerate constant sample")

    def mle(s):
        logs = np.log(s)
        res = optimize.minimize_scalar(
            _gumbel2_profile_nll, args=(logs, s), bounds=(1e-3, 1e3),
            method="bounded", options={"xatol": 1e-10},
        )
        if not res.success or not np.isfinite(res.fun):
            raise FitError("volatility-law fit did not converge")
        zeta = float(res.x)
        beta = 1.0 / float(np.mean(s ** -zeta))
        return beta, zeta

    beta, zeta = mle(s_all)
    s = s_all
    if upper_cut == "auto":
        cut = detect_crossover(s_all, zeta)
        if cut is not None:
            s = s_all[s_all <= cut]
            if len(s) >= 100:
                beta, zeta = mle(s)
            else:
                s = s_all
    elif upper_cut is not None:
        s = s_all[s_all <= float(upper_cut)]
        if len(s) < 100:
            raise InsufficientDataError("fewer than 100 samples below the cut")
        beta, zeta = mle(s)

    # observed information from a finite-difference Hessian of the nll
    def nll(theta):
        b, zt = theta
        if b <= 0 or zt <= 0:
            return np.inf
        t = s ** -zt
        return -(len(s) * math.log(b * zt) - b * float(np.sum(t))
                 - (zt + 1.0) * float(np.sum(np.log(s))))

    theta = np.array([beta, zeta])
    eps = np.maximum(1e-5 * np.abs(theta), 1e-8)
    H = np.empty((2, 2))
    f0 = nll(theta)
    for i in range(2):
        for j in range(i, 2):
            ei = np.zeros(2); ei[i] = eps[i]
            ej = np.zeros(2); ej[j] = eps[j]
            H[i, j] = H[j, i] = (
                nll(theta + ei + ej) - nll(theta + ei) - nll(theta + ej) + f0
            ) / (eps[i] * eps[j])
    try:
        cov = np.linalg.inv(H)
        se = np.sqrt(np.maximum(np.diag(cov), 0.0))
    except np.linalg.LinAlgError:
        se = np.array([math.nan, math.nan])
    return Gumbel2Params(beta=beta, zeta=zeta,
                         beta_stderr=float(se[0]), zeta_stderr=float(se[1]))


def detect_crossover(sigma_samples, zeta_hat: float, bins: int = 60,
                     steep_margin: float = 3.0, min_count: int = 20):
    """Smallest scale beyond which the empirical tail steepens sharply.

    Builds a log-spaced histogram and looks, above the mode, for the first
    scale where the local log-log slope of the density (centered 3-point
    regression, bins with at least ``min_count`` samples) stays below
    -(zeta_hat + steep_margin) for two consecutive bins.  Returns that
    scale, or None if the tail never steepens; statistical flutter in the
    sparse far tail is ignored by the count floor.
    """
    s = np.asarray(sigma_samples, dtype=float)
    lo, hi = np.quantile(s, [0.001, 1.0])
    if lo <= 0 or hi <= lo:
        return None
    edges = np.geomspace(lo, hi, bins + 1)
    counts, _ = np.histogram(s, bins=edges)
    widths = np.diff(edges)
    centers = np.sqrt(edges[:-1] * edges[1:])
    dens = counts / (len(s) * widths)
    ok = counts >= min_count
    lc, ld = np.log(centers[ok]), np.log(dens[ok])
    if len(lc) < 8:
        return None
    mode_pos = int(np.argmax(ld))
    slopes = np.full(len(lc), np.nan)
    for i in range(1, len(lc) - 1):
        xw, yw = lc[i - 1: i + 2], ld[i - 1: i + 2]
        slopes[i] = np.polyfit(xw, yw, 1)[0]
    thresh = -(zeta_hat + steep_margin)
    for i in range(mode_pos + 1, len(lc) - 2):
        if slopes[i] < thresh and slopes[i + 1] < thresh:
            return float(np.exp(lc[i]))
    return None


def predict_tail_from_sigma(params: Gumbel2Params) -> float:
    """Asymptotic power-law exponent of the observable implied by the
    volatility law: the survival function of |z| inherits the exponent
    zeta of the sigma^(-zeta-1) tail."""
    if params.zeta <= 0:
        raise DomainError("zeta must be positive")
    if params.zeta > 100:
        warnings.warn("zeta > 100: tail is effectively thin", stacklevel=2)
    return params.zeta


# ---------------------------------------------------------------------------
# Exponential integral and the uniform+point volatility mixture

def expint_ei(x: float) -> float:
    """Exponential integral Ei(x); for y > 0, Ei(-y) = -E1(y)."""
    if x == 0:
        raise DomainError("Ei is singular at 0")
    return float(special.expi(x))


@dataclass(frozen=True)
class MixtureParams:
    """Volatility mixture: mass 1-f at sigma = 1, mass f uniform on
    (1-c, 1+c)."""

    f: float
    c: float

    def __post_init__(self):
        if not 0 <= self.f <= 1:
            raise DomainError(f"f must be in [0, 1], got {self.f}")
        if not 0 <= self.c < 1:
            raise DomainError(f"c must be in [0, 1), got {self.c}")


def mixture_pdf(params: MixtureParams, z, standardized: bool = False) -> np.ndarray:
    """Long-run density of z under the volatility mixture.

    The Gaussian component integrated over the uniform sigma-leg reduces
    to a difference of exponential integrals; at z = 0 the analytic limit
    f/(2c) ln((1+c)/(1-c)) / sqrt(2 pi) is used.  With ``standardized``
    the density is rescaled to unit variance.
    """
    f, c = params.f, params.c
    z = np.asarray(z, dtype=float)
    scale = math.sqrt(mixture_variance(params)) if standardized else 1.0
    zz = z * scale
    out = np.empty_like(zz)
    root = 1.0 / math.sqrt(2.0 * math.pi)
    if f > 0 and c > 0:
        nz = zz != 0
        z2 = zz[nz] ** 2
        ei_term = (special.expi(-z2 / (2.0 * (1.0 - c) ** 2))
                   - special.expi(-z2 / (2.0 * (1.0 + c) ** 2)))
        out[nz] = f / (4.0 * math.sqrt(2.0 * math.pi) * c) * ei_term
        out[~nz] = f / (2.0 * c) * root * math.log((1.0 + c) / (1.0 - c))
    else:
        out[:] = 0.0
    out += (1.0 - f) * root * np.exp(-zz ** 2 / 2.0)
    return out * scale


def mixture_variance(params: MixtureParams) -> float:
    """E[sigma^2] = 1 + f c^2 / 3 (z inherits it as its variance)."""
    return 1.0 + params.f * params.c ** 2 / 3.0


def mixture_kurtosis(params: MixtureParams) -> float:
    """Kurtosis of z: 3 E[sigma^4] / E[sigma^2]^2, in closed form.

    E[sigma^4] = 1 + f (2 c^2 + c^4/5).  Scale-invariant, so the
    unit-variance rescaling leaves it unchanged.
    """
    f, c = params.f, params.c
    m2 = 1.0 + f * c ** 2 / 3.0
    m4 = 1.0 + f * (2.0 * c ** 2 + c ** 4 / 5.0)
    return 3.0 * m4 / (m2 * m2)
