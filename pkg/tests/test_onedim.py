"""One-dimensional exact laws, hypergeometric machinery, rate function."""
import math

import numpy as np
import pytest

from rwde import onedim as od
from rwde import sampling as sp
from rwde.errors import DepthInsufficientError, ParameterDomainError
from rwde.rng import RngHandle

P31 = od.BetaEnvParams(3.0, 1.0)
P151 = od.BetaEnvParams(1.5, 1.0)


# ---------------------------------------------------------------------------
# oracles
# ---------------------------------------------------------------------------

def hyp2f1_by_power_series(a, b, c, z, tol=1e-14):
    """Direct power series sum_k (a)_k (b)_k / (c)_k z^k / k! for |z| < 1."""
    assert abs(z) < 1
    term = 1.0
    total = 1.0
    k = 0
    while abs(term) > tol * max(abs(total), 1.0):
        term *= (a + k) * (b + k) / (c + k) * z / (k + 1)
        total += term
        k += 1
        if k > 10 ** 6:
            raise RuntimeError("series did not converge")
    return total


# ---------------------------------------------------------------------------
# renewal series and constants
# ---------------------------------------------------------------------------

def test_sample_R_at_least_one():
    r = od.sample_R(P31, RngHandle(1), size=1000)
    assert np.all(r >= 1.0)


def test_inverse_R_beta_law():
    n = 3 * 10 ** 4
    r = od.sample_R(P31, RngHandle(12), size=n)
    stat = sp.ks_statistic(1.0 / r, lambda x: sp.beta_cdf(2.0, 1.0, x))
    assert stat < sp.ks_threshold(n)
    assert abs((1.0 / r).mean() - 2.0 / 3.0) < 3 * (1 / r).std() / math.sqrt(n)


def test_sample_R_truncation_stability():
    # tightening the tolerance tenfold moves the KS statistic by < 2/sqrt(n)
    n = 2 * 10 ** 4
    cdf = lambda x: sp.beta_cdf(2.0, 1.0, x)
    s1 = sp.ks_statistic(1.0 / od.sample_R(P31, RngHandle(3), tol=1e-8, size=n), cdf)
    s2 = sp.ks_statistic(1.0 / od.sample_R(P31, RngHandle(3), tol=1e-9, size=n), cdf)
    assert abs(s1 - s2) < 2.0 / math.sqrt(n)


@pytest.mark.slow
def test_R_tail_exponent():
    r = od.sample_R(P151, RngHandle(4), size=10 ** 6, tol=1e-8)
    est = sp.hill_tail_exponent(r, k=10 ** 4)
    assert abs(est - 0.5) / 0.5 <= 0.15


def test_sample_R_requires_transience():
    with pytest.raises(ParameterDomainError):
        od.sample_R(od.BetaEnvParams(1.0, 1.0), RngHandle(0))


def test_kesten_constant_values():
    assert od.kesten_constant(P151) == pytest.approx(1.0, rel=1e-12)
    assert od.kesten_constant(od.BetaEnvParams(2.0, 1.0)) == pytest.approx(1.0)


def test_solomon_speed_values():
    assert od.solomon_speed(P31) == pytest.approx(1.0 / 3.0)
    assert od.solomon_speed(od.BetaEnvParams(2.0, 1.0)) == 0.0
    assert od.solomon_speed(od.BetaEnvParams(4.0, 1.0)) == pytest.approx(0.5)
    assert od.solomon_speed(od.BetaEnvParams(1.2, 1.0)) == 0.0


# ---------------------------------------------------------------------------
# quenched identities
# ---------------------------------------------------------------------------

def test_quenched_identities_cross_checked():
    for seed in range(5):
        qi = od.quenched_identities(P31, RngHandle(10 + seed))
        assert qi.within_tol
        assert qi.escape == pytest.approx(qi.solve_escape, rel=1e-6)
        assert qi.green == pytest.approx(qi.solve_green, rel=1e-6)
        assert qi.mean_hitting == pytest.approx(qi.solve_mean_hitting, rel=1e-6)


def test_escape_probability_beta_law():
    n = 2000
    vals = np.array([od.quenched_identities(P31, RngHandle(20, i)).escape
                     for i in range(n)])
    stat = sp.ks_statistic(vals, lambda x: sp.beta_cdf(2.0, 1.0, x))
    assert stat < sp.ks_threshold(n)


@pytest.mark.slow
def test_green_function_tail_exponent_kappa1():
    # G = R / omega_0 with independent omega_0; the tail index equals kappa1
    n = 10 ** 6
    gen = RngHandle(21).generator()
    r = od.sample_R(P151, RngHandle(22), size=n, tol=1e-8)
    omega0 = gen.beta(1.5, 1.0, size=n)
    green = r / omega0
    est = sp.hill_tail_exponent(green, k=10 ** 4)
    assert abs(est - 0.5) / 0.5 <= 0.15


# ---------------------------------------------------------------------------
# regimes
# ---------------------------------------------------------------------------

def test_regime_gaussian_constant():
    rc = od.regime_constants(od.BetaEnvParams(4.0, 1.0))
    assert rc.regime == "gaussian"
    assert rc.speed == pytest.approx(0.5)
    assert rc.scale_constant == pytest.approx(1.5, rel=1e-12)


def test_regime_critical_constant():
    rc = od.regime_constants(od.BetaEnvParams(2.0, 1.0))
    assert rc.regime == "critical"
    assert rc.scale_constant == pytest.approx(0.5)
    assert rc.speed == 0.0


def test_regime_subballistic_constant_closed_form():
    # digamma(1.5) - digamma(1) = 2 - 2 log 2 and B(1/2, 1) = 2, both exact,
    # give sin(pi/2) / (sqrt(2) pi) * 4 / (2 - 2 log 2)
    rc = od.regime_constants(P151)
    expected = 4.0 / (math.sqrt(2.0) * math.pi * (2.0 - math.log(4.0)))
    assert rc.regime == "sub-ballistic"
    assert rc.exponent == pytest.approx(0.5)
    assert rc.scale_constant == pytest.approx(expected, rel=1e-12)


def test_regime_boundary_has_no_constant():
    rc = od.regime_constants(od.BetaEnvParams(3.5, 1.5))
    assert rc.regime == "boundary"
    assert rc.scale_constant is None
    assert "sqrt(n log n)" in rc.note


def test_regime_stable_constant_is_negative():
    rc = od.regime_constants(od.BetaEnvParams(2.5, 1.0))
    assert rc.regime == "stable"
    assert rc.scale_constant < 0
    assert rc.fluctuation_exponent == pytest.approx(1.0 / 1.5)


def test_regime_exponent_is_growth_exponent():
    for a, b in ((1.5, 1.0), (2.0, 1.0), (2.5, 1.0), (4.0, 1.0)):
        rc = od.regime_constants(od.BetaEnvParams(a, b))
        assert rc.exponent == pytest.approx(min(1.0, a - b))


def test_regime_table_csv():
    csv = od.regime_table_csv([P31, od.BetaEnvParams(3.5, 1.5)])
    lines = csv.strip().splitlines()
    assert lines[0] == "alpha,beta,kappa1,regime,v,exponent,scale_constant_or_NA"
    assert lines[2].endswith("NA")


# ---------------------------------------------------------------------------
# hypergeometric machinery
# ---------------------------------------------------------------------------

def test_hyp2f1_at_zero():
    assert od.hyp2f1(0.7, 1.1, 2.3, 0.0) == pytest.approx(1.0, abs=1e-12)


def test_hyp2f1_log_value():
    # F(1, 1; 2; z) = -log(1 - z) / z
    assert od.hyp2f1(1.0, 1.0, 2.0, 0.5) == pytest.approx(2 * math.log(2.0),
                                                          rel=1e-10)


def test_hyp2f1_against_power_series():
    for a, b, c, z in ((0.5, 1.5, 2.5, 0.3), (2.0, 0.7, 1.1, -0.4),
                       (3.0, 3.0, 4.0, 0.25), (1.2, 0.4, 0.9, 0.6)):
        oracle = hyp2f1_by_power_series(a, b, c, z)
        assert od.hyp2f1(a, b, c, z) == pytest.approx(oracle, rel=1e-9)


def test_hyp2f1_symmetry():
    for a, b, c, z in ((1.3, 0.7, 2.1, 0.3), (3.0, 1.0, 4.0, 0.7)):
        assert od.hyp2f1(a, b, c, z) == pytest.approx(od.hyp2f1(b, a, c, z),
                                                      rel=1e-10)


def test_hyp2f1_domain_errors():
    with pytest.raises(ParameterDomainError):
        od.hyp2f1(1.0, 2.0, 1.5, 0.5)  # c <= b
    with pytest.raises(ParameterDomainError):
        od.hyp2f1(1.0, 1.0, 2.0, 1.0)  # z >= 1


def test_h1_density_at_zero_is_beta():
    u = np.linspace(0.01, 0.99, 33)
    beta_pdf = u ** 2 * 3.0  # Beta(3, 1)
    assert np.max(np.abs(od.h1_density(P31, 0.0, u) - beta_pdf)) < 1e-10


def test_h1_density_normalizes():
    assert od.h1_expect(P31, 0.25, lambda u: 1.0) == pytest.approx(1.0, abs=1e-8)


def test_h1_density_integrable_with_small_beta():
    p = od.BetaEnvParams(2.0, 0.6)
    assert od.h1_expect(p, 0.3, lambda u: 1.0) == pytest.approx(1.0, abs=1e-8)


def test_h1_cdf_monotone_with_endpoints():
    xs = np.linspace(0.0, 1.0, 41)
    vals = od.h1_cdf(P31, 0.25, xs)
    assert vals[0] == 0.0 and vals[-1] == 1.0
    assert np.all(np.diff(vals) >= -1e-12)


def test_h1_requires_z_below_one():
    with pytest.raises(ParameterDomainError):
        od.h1_density(P31, 1.0, 0.5)


def test_fixed_point_moment_identity():
    # s-moments of both sides of the fixed-point equation for X = Z/(1-Z):
    # E[X^s] = E[Y^s] E[((1+X)/(1+(1-z)X))^s], finite only for s < beta, so
    # (3, 1) admits s = 0.5 and (3, 2) the full set {0.5, 1, 1.5}
    cases = [(od.BetaEnvParams(3.0, 1.0), (0.5,)),
             (od.BetaEnvParams(3.0, 2.0), (0.5, 1.0, 1.5))]
    z = 0.25
    for p, svals in cases:
        a, b = p.alpha, p.beta
        for s in svals:
            lhs = od.h2_expect(p, z, lambda x: x ** s)
            y_mom = math.exp(
                sp.log_gamma(a + s) + sp.log_gamma(b - s)
                - sp.log_gamma(a) - sp.log_gamma(b))
            ratio = od.h2_expect(
                p, z, lambda x: ((1 + x) / (1 + (1 - z) * x)) ** s)
            assert lhs == pytest.approx(y_mom * ratio, rel=1e-6)


# ---------------------------------------------------------------------------
# phi and the fixed point
# ---------------------------------------------------------------------------

def test_phi_small_lambda_limit():
    gen = RngHandle(30).generator()
    slab = gen.beta(3.0, 1.0, size=64)
    lam = 1e-4
    phi = od.phi_continued_fraction(slab, lam)
    assert phi / lam == pytest.approx(slab[0], abs=1e-6)


def test_phi_at_lambda_one_is_one():
    gen = RngHandle(31).generator()
    slab = gen.beta(3.0, 1.0, size=256)
    assert od.phi_continued_fraction(slab, 1.0) == pytest.approx(1.0, abs=1e-9)


def test_phi_depth_flag():
    gen = RngHandle(32).generator()
    with pytest.raises(DepthInsufficientError):
        od.phi_continued_fraction(gen.beta(3.0, 1.0, size=2), 0.95,
                                  agreement_tol=1e-12)


def test_phi_monte_carlo_matches_h1():
    n = 2 * 10 ** 4
    lam = 0.5
    z = od.sample_phi(P31, lam, RngHandle(33), n) / lam
    grid = np.linspace(0, 1, 1501)
    cdfg = od.h1_cdf(P31, lam * lam, grid)
    stat = sp.ks_statistic(z, lambda x: np.interp(x, grid, cdfg))
    assert stat < sp.ks_threshold(n)


def test_fixed_point_zero_lambda_is_beta():
    n = 2 * 10 ** 4
    z = od.sample_Z_fixed_point(P31, 1e-9, 50, RngHandle(34), size=n)
    stat = sp.ks_statistic(z, lambda x: sp.beta_cdf(3.0, 1.0, x))
    assert stat < sp.ks_threshold(n)


def test_fixed_point_matches_continued_fraction():
    n = 2 * 10 ** 4
    lam = 0.5
    z1 = np.sort(od.sample_Z_fixed_point(P31, lam, 64, RngHandle(35), size=n))
    z2 = od.sample_phi(P31, lam, RngHandle(36), n) / lam
    cdf = lambda x: np.searchsorted(z1, x, side="right") / z1.size
    stat = sp.ks_statistic(z2, cdf)
    assert stat < 1.358 * math.sqrt(2.0 / n) * 1.5


def test_fixed_point_stays_inside_interval():
    z = od.sample_Z_fixed_point(P31, 0.9, 200, RngHandle(37), size=500)
    assert np.all((z > 0) & (z < 1))
    # at lambda = 1 the law degenerates at 1; saturation there is tolerated
    z1 = od.sample_Z_fixed_point(P31, 1.0, 200, RngHandle(37), size=500)
    assert np.all((z1 > 0) & (z1 <= 1))


# ---------------------------------------------------------------------------
# rate function
# ---------------------------------------------------------------------------

def test_log_mgf_at_one():
    assert od.log_mgf(P31, 1.0) == 0.0


def test_log_mgf_quadrature_vs_monte_carlo():
    for lam in (0.3, 0.6, 0.9):
        quad_val = od.log_mgf(P31, lam)
        mc = np.log(od.sample_phi(P31, lam, RngHandle(38), 3 * 10 ** 4))
        se = mc.std(ddof=1) / math.sqrt(mc.size)
        assert abs(quad_val - mc.mean()) <= 3 * se


def test_rate_function_zero_at_inverse_speed():
    val, lam = od.rate_function(P31, 3.0)
    assert val <= 1e-3
    assert lam == pytest.approx(1.0)


def test_rate_function_at_one_is_log_moment():
    # I(1) forces a straight march: rate = E[log(1/omega)] = 1/3 for (3, 1)
    val, _ = od.rate_function(P31, 1.0)
    assert val == pytest.approx(1.0 / 3.0, abs=1e-6)


def test_rate_function_shape():
    ts = np.linspace(1.0, 8.0, 29)
    table = od.rate_function_table(P31, ts)
    assert np.all(table.rate >= 0.0)
    d2 = np.diff(table.rate, 2)
    assert d2.min() >= -1e-8
    k = int(np.argmin(table.rate))
    assert np.all(np.diff(table.rate)[:k] <= 1e-10)
    assert np.all(np.diff(table.rate)[k:] >= -1e-10)
    assert np.all((table.lambda_star > 0) & (table.lambda_star <= 1.0))
    csv = table.to_csv()
    assert csv.splitlines()[0] == "t,I,lambda_star"


def test_rate_function_rejects_t_below_one():
    with pytest.raises(ParameterDomainError):
        od.rate_function(P31, 0.5)


def test_rate_function_zero_speed_case_decreasing():
    vals = [od.rate_function(P151, t)[0] for t in (2.0, 5.0, 15.0)]
    assert vals[0] > vals[1] > vals[2] > 0.0
