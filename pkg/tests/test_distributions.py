import math

import numpy as np
import pytest
from scipy.integrate import quad

from volmem.distributions import (
    BinnedDensity,
    GqParams,
    Gumbel2Params,
    MixtureParams,
    bin_density,
    detect_crossover,
    expint_ei,
    fit_gq_binned,
    fit_gq_mle,
    fit_gumbel2,
    gq_cdf,
    gq_moment,
    gq_pdf,
    gq_sample,
    gumbel2_pdf,
    gumbel2_sample,
    mixture_kurtosis,
    mixture_pdf,
    mixture_variance,
    predict_tail_from_sigma,
    tail_index,
)
from volmem.errors import DomainError, FitError

PARAM_GRID = [
    GqParams(1.0, 1.0, 0.5),          # Gaussian
    GqParams(1.1, 1.0, 0.1 / 1.7),    # unit-variance, mild tail
    GqParams(1.4, 1.0, 1.0),
    GqParams(1.47, 0.92, 0.3),
    GqParams(1.0, 1.3, 0.7),          # stretched
    GqParams(2.0, 1.0, 1.0),          # fat, near-boundary variance
    GqParams(1.8, 0.9, 2.0),
]


# ---------------------------------------------------------------------------
# density family

def test_gq_params_validation():
    with pytest.raises(DomainError):
        GqParams(0.9, 1.0, 1.0)
    with pytest.raises(DomainError):
        GqParams(1.5, 1.0, -1.0)
    with pytest.raises(DomainError):
        GqParams(3.5, 1.0, 1.0)  # 2 nu/(q'-1) = 0.8 <= 1, not normalizable


def test_gaussian_member():
    p = GqParams(1.0, 1.0, 0.5)
    assert gq_pdf(p, 0.0) == pytest.approx(1.0 / math.sqrt(2 * math.pi), rel=1e-12)
    zs = np.linspace(-3, 3, 7)
    from scipy.stats import norm
    assert np.allclose(gq_pdf(p, zs), norm.pdf(zs), rtol=1e-12)
    assert np.allclose(gq_cdf(p, zs), norm.cdf(zs), rtol=1e-10)


@pytest.mark.parametrize("params", PARAM_GRID)
def test_pdf_normalization_by_quadrature(params):
    val, err = quad(lambda z: gq_pdf(params, z), -np.inf, np.inf, limit=300)
    assert abs(val - 1.0) < 1e-8


def test_near_boundary_normalization():
    # 2 nu / (q' - 1) = 1.05
    nu = 0.6
    qp = 1.0 + 2 * nu / 1.05
    params = GqParams(qp, nu, 1.0)
    val, _ = quad(lambda z: gq_pdf(params, z), -np.inf, np.inf, limit=500)
    assert abs(val - 1.0) < 1e-7


def test_unit_variance_scale_relation():
    # for nu=1 the member with B = (q-1)/(5-3q) has unit variance
    for q in (1.05, 1.1, 1.3, 1.49):
        p = GqParams(q, 1.0, (q - 1) / (5 - 3 * q))
        assert gq_moment(p, 2) == pytest.approx(1.0, rel=1e-12)


@pytest.mark.parametrize("params", PARAM_GRID[:5])
def test_moments_match_quadrature(params):
    m0 = gq_moment(params, 0)
    assert m0 == pytest.approx(1.0, rel=1e-12)
    m2 = gq_moment(params, 2)
    val, _ = quad(lambda z: z * z * gq_pdf(params, z), -np.inf, np.inf, limit=300)
    assert m2 == pytest.approx(val, rel=1e-8)


def test_moment_existence_bound():
    with pytest.raises(DomainError) as err:
        gq_moment(GqParams(2.0, 1.0, 1.0), 2)  # 2 nu/(q'-1) = 2 <= 3
    assert "requires" in str(err.value)
    assert gq_moment(GqParams(2.0, 1.0, 1.0), 0) == pytest.approx(1.0)


def test_odd_moments_vanish():
    assert gq_moment(GqParams(1.3, 1.0, 1.0), 1) == 0.0
    assert gq_moment(GqParams(1.3, 1.0, 1.0), 3) == 0.0


@pytest.mark.parametrize("params", PARAM_GRID[:5])
def test_cdf_monotone_and_consistent(params):
    zs = np.linspace(-8, 8, 161)
    c = gq_cdf(params, zs)
    assert (np.diff(c) >= 0).all()
    assert c[0] >= 0 and c[-1] <= 1
    assert gq_cdf(params, 0.0) == pytest.approx(0.5, abs=1e-14)
    # numerical derivative matches the density
    h = 1e-5
    mid = np.linspace(-3, 3, 25)
    deriv = (gq_cdf(params, mid + h) - gq_cdf(params, mid - h)) / (2 * h)
    assert np.allclose(deriv, gq_pdf(params, mid), atol=1e-6)


def test_tail_index_values():
    assert tail_index(1.47, 0.92) == pytest.approx(1.5108695652173914, abs=1e-12)
    assert tail_index(1.3, 1.0) == pytest.approx(1.3, abs=1e-15)
    for nu in (0.5, 1.0, 2.7):
        assert tail_index(1.0, nu) == pytest.approx(1.0, abs=1e-15)


def test_tail_index_exact_algebra(rng):
    for _ in range(100):
        qp = 1.0 + rng.random() * 1.5
        nu = 0.3 + rng.random() * 2
        q = tail_index(qp, nu)
        assert nu * q - nu + 1 - qp == pytest.approx(0.0, abs=1e-12)


def test_sampler_matches_cdf(rng):
    params = GqParams(1.3, 0.9, 0.8)
    s = gq_sample(params, 100_000, rng)
    from volmem.stattools import ks_one_sample
    assert ks_one_sample(s, lambda z: gq_cdf(params, z)).p_value > 0.01


# ---------------------------------------------------------------------------
# fitting

def test_mle_recovery_fixed_nu(rng):
    true = GqParams(1.4, 1.0, 1.0)
    data = gq_sample(true, 400_000, rng)
    fit = fit_gq_mle(data, fix_nu=1.0)
    assert abs(fit.params.q_prime - 1.4) < 0.03
    assert abs(fit.params.B - 1.0) < 0.10
    assert fit.q_tail == pytest.approx(fit.params.q_prime, abs=1e-12)
    assert math.isfinite(fit.hill_crosscheck)


def test_mle_recovery_free(rng):
    true = GqParams(1.4, 1.0, 1.0)
    data = gq_sample(true, 400_000, rng)
    fit = fit_gq_mle(data)
    assert abs(fit.params.q_prime - 1.4) < 0.04
    assert abs(fit.params.nu - 1.0) < 0.05


def test_mle_gaussian_data_gives_q_one(rng):
    fit = fit_gq_mle(rng.standard_normal(200_000), fix_nu=1.0)
    assert abs(fit.q_tail - 1.0) < 0.03


def test_mle_stretched_branch(rng):
    # q' pinned to 1: stretched-exponential MLE over (nu, B)
    true = GqParams(1.0, 1.3, 0.7)
    data = gq_sample(true, 200_000, rng)
    fit = fit_gq_mle(data, fix_qprime=1.0)
    assert fit.params.q_prime == 1.0
    assert abs(fit.params.nu - 1.3) < 0.05


def test_mle_convergence_rate(rng):
    # error bars shrink with n (self-consistency at rate ~ n^(-1/2))
    true = GqParams(1.3, 1.0, 1.0)
    errs = []
    for n in (1_000, 10_000, 100_000):
        trials = [abs(fit_gq_mle(gq_sample(true, n, rng), fix_nu=1.0).params.q_prime
                      - 1.3) for _ in range(3)]
        errs.append(np.mean(trials))
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 0.05


def test_hill_crosscheck_on_heavy_tail(rng):
    # survival-function exponent from Hill vs 2/(q-1) - 1 from the fit
    true = GqParams(1.5, 1.0, 2.0)
    data = gq_sample(true, 400_000, rng)
    fit = fit_gq_mle(data, fix_nu=1.0)
    assert fit.q_tail > 1.25
    density_exponent = 2.0 / (fit.q_tail - 1.0)
    survival_exponent = density_exponent - 1.0
    assert abs(fit.hill_crosscheck - survival_exponent) / survival_exponent < 0.25


def test_binned_fit_exact_curve():
    params = GqParams(1.2, 1.0, 0.5)
    centers = np.linspace(-5.9, 5.9, 101)
    hist = BinnedDensity(centers=centers, density=gq_pdf(params, centers),
                         counts=np.full(101, 1000), bin_width=centers[1] - centers[0],
                         n=101_000)
    fit = fit_gq_binned(hist, fix_nu=1.0)
    assert abs(fit.params.q_prime - 1.2) < 1e-5
    assert abs(fit.params.B - 0.5) < 1e-5
    assert fit.chi2_per_bin < 1e-14
    assert fit.r2 > 1 - 1e-12


def test_binned_fit_on_sample(rng):
    true = GqParams(1.3, 1.0, (1.3 - 1) / (5 - 3 * 1.3))
    data = gq_sample(true, 400_000, rng)
    fit = fit_gq_binned(bin_density(data), fix_nu=1.0)
    assert abs(fit.params.q_prime - 1.3) < 0.05
    assert fit.chi2_per_bin < 3e-5
    assert fit.r2 > 0.998


def test_binned_fit_needs_bins():
    hist = BinnedDensity(centers=np.arange(5.0), density=np.ones(5) / 5,
                         counts=np.full(5, 10), bin_width=1.0, n=50)
    with pytest.raises(Exception):
        fit_gq_binned(hist)


# ---------------------------------------------------------------------------
# inverse-power volatility law

def test_gumbel2_pdf_normalized():
    p = Gumbel2Params(beta=0.421, zeta=2.323)
    val, _ = quad(lambda s: gumbel2_pdf(p, s), 0, np.inf, limit=300)
    assert abs(val - 1.0) < 1e-8


def test_gumbel2_recovery(rng):
    true = Gumbel2Params(beta=0.421, zeta=2.323)
    s = gumbel2_sample(true, 100_000, rng)
    fit = fit_gumbel2(s)
    assert abs(fit.beta - 0.421) < 0.02
    assert abs(fit.zeta - 2.323) < 0.05
    assert 0 < fit.beta_stderr < 0.02
    assert 0 < fit.zeta_stderr < 0.05


def test_gumbel2_degenerate_sample():
    with pytest.raises(FitError):
        fit_gumbel2(np.full(500, 2.0))


def test_gumbel2_requires_positive():
    with pytest.raises(DomainError):
        fit_gumbel2(np.array([1.0, -0.5] * 100))


def test_crossover_detection(rng):
    true = Gumbel2Params(beta=0.421, zeta=2.323)
    s = gumbel2_sample(true, 200_000, rng)
    # pure sample: no crossover
    assert detect_crossover(s, 2.323) is None
    # truncate the tail sharply: detector must fire below the cut region
    s_cut = s[s < 5.0]
    cut = detect_crossover(s_cut, 2.323)
    assert cut is not None
    assert 2.0 < cut <= 5.0


def test_predict_tail_from_sigma():
    p = Gumbel2Params(beta=0.421, zeta=2.323)
    assert predict_tail_from_sigma(p) == pytest.approx(2.323)
    with pytest.warns(UserWarning):
        predict_tail_from_sigma(Gumbel2Params(beta=1.0, zeta=500.0))


# ---------------------------------------------------------------------------
# exponential integral and the mixture

def test_expint_known_values():
    assert expint_ei(-1.0) == pytest.approx(-0.21938393439552026, rel=1e-10)
    assert expint_ei(-10.0) == pytest.approx(-4.15696892968532e-06, rel=1e-9)
    with pytest.raises(DomainError):
        expint_ei(0.0)


def test_expint_vs_quadrature_oracle():
    # Ei(-y) = -E1(y) = -int_y^inf e^-t / t dt
    for y in (0.5, 1.0, 2.0, 10.0):
        oracle, _ = quad(lambda t: math.exp(-t) / t, y, np.inf, limit=200)
        assert expint_ei(-y) == pytest.approx(-oracle, rel=1e-8)


def test_expint_antisymmetry_definition():
    from scipy.special import exp1
    for y in np.linspace(0.1, 8.0, 25):
        assert exp1(y) == pytest.approx(-expint_ei(-y), rel=1e-10)


def test_mixture_pdf_gaussian_limit():
    p = MixtureParams(f=0.0, c=0.5)
    zs = np.linspace(-4, 4, 17)
    from scipy.stats import norm
    assert np.allclose(mixture_pdf(p, zs), norm.pdf(zs), rtol=1e-12)


def test_mixture_kurtosis_exact():
    val = mixture_kurtosis(MixtureParams(0.5, 0.5))
    assert val == pytest.approx(10854 / 3125, abs=1e-9)


def test_mixture_kurtosis_by_quadrature():
    p = MixtureParams(0.5, 0.5)
    m2, _ = quad(lambda z: z * z * mixture_pdf(p, z), -np.inf, np.inf, limit=300)
    m4, _ = quad(lambda z: z ** 4 * mixture_pdf(p, z), -np.inf, np.inf, limit=300)
    assert m4 / m2 ** 2 == pytest.approx(10854 / 3125, abs=1e-4)
    assert m2 == pytest.approx(mixture_variance(p), rel=1e-8)


@pytest.mark.parametrize("f,c", [(0.2, 0.3), (0.5, 0.5), (0.9, 0.8), (1.0, 0.4)])
def test_mixture_pdf_normalized(f, c):
    p = MixtureParams(f, c)
    val, _ = quad(lambda z: mixture_pdf(p, z), -np.inf, np.inf, limit=300)
    assert abs(val - 1.0) < 1e-8


def test_mixture_matches_sigma_superposition():
    # closed form vs direct integration over the volatility leg
    p = MixtureParams(0.5, 0.5)

    def direct(z):
        g = lambda s: math.exp(-z * z / (2 * s * s)) / (math.sqrt(2 * math.pi) * s)
        inner, _ = quad(g, 0.5, 1.5, limit=200)
        return 0.5 / (2 * 0.5) * inner + 0.5 * g(1.0)

    for z in (0.0, 0.2, 1.0, 2.5, 6.0):
        assert mixture_pdf(p, z) == pytest.approx(direct(z), abs=1e-7)


def test_mixture_standardized_variant():
    p = MixtureParams(0.5, 0.5)
    val, _ = quad(lambda z: z * z * mixture_pdf(p, z, standardized=True),
                  -np.inf, np.inf, limit=300)
    assert val == pytest.approx(1.0, rel=1e-8)


def test_mixture_domain_errors():
    with pytest.raises(DomainError):
        MixtureParams(f=1.2, c=0.5)
    with pytest.raises(DomainError):
        MixtureParams(f=0.5, c=1.0)
