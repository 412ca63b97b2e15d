"""Exact one-dimensional computations for Beta(alpha, beta) environments.

Covers the renewal series R and its Beta law, Kesten's tail constant, the
ballistic speed, the four scaling regimes with explicit constants, the
hypergeometric density h1 of the normalized hitting-time transform, the
continued-fraction evaluation of phi(omega, lambda) = E[lambda^(H_1)], the
distributional fixed point, and the large-deviation rate function of H_k / k
as a Legendre transform.

Sign convention for the rate function, fixed so that I(1/v) = 0 and I >= 0:

    I(t) = sup_{lambda in (0, 1]} ( t log(lambda) - E[log phi(omega, lambda)] ).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy import special as sps

from .errors import DepthInsufficientError, ParameterDomainError, UsageError
from .sampling import _as_generator

SERIES_CAP = 10 ** 5
PHI_DEPTH_CAP = 10 ** 5


@dataclass(frozen=True)
class BetaEnvParams:
    """Per-site right-step probability is Beta(alpha, beta)."""

    alpha: float
    beta: float

    def __post_init__(self):
        if self.alpha <= 0 or self.beta <= 0:
            raise ParameterDomainError("alpha and beta must be positive")

    @property
    def kappa1(self) -> float:
        return self.alpha - self.beta

    def require_transient_right(self):
        if self.alpha <= self.beta:
            raise ParameterDomainError(
                f"need alpha > beta for rightward transience, got {self.alpha}, {self.beta}")


# ---------------------------------------------------------------------------
# Renewal series R = 1 + rho_1 + rho_1 rho_2 + ...
# ---------------------------------------------------------------------------

def sample_R(params: BetaEnvParams, rng, tol: float = 1e-10, size: int | None = None):
    """Truncated renewal series; stops once the running product of rho's
    drops below tol times the partial sum.  Always >= 1."""
    params.require_transient_right()
    if tol <= 0:
        raise ParameterDomainError("tol must be positive")
    gen = _as_generator(rng)
    scalar = size is None
    n = 1 if scalar else int(size)
    total = np.ones(n)
    prod = np.ones(n)
    active = np.arange(n)
    rounds = 0
    while active.size:
        rounds += 1
        if rounds > SERIES_CAP:
            raise DepthInsufficientError("renewal series failed to converge")
        u = gen.beta(params.alpha, params.beta, size=active.size)
        prod[active] *= (1.0 - u) / u
        total[active] += prod[active]
        keep = prod[active] >= tol * total[active]
        active = active[keep]
    return float(total[0]) if scalar else total


def kesten_constant(params: BetaEnvParams) -> float:
    """Prefactor of the tail P(R > t) ~ C t^(-kappa1):
    C = 1 / (kappa1 * B(kappa1, beta))."""
    params.require_transient_right()
    k1 = params.kappa1
    return float(1.0 / (k1 * np.exp(sps.betaln(k1, params.beta))))


def solomon_speed(params: BetaEnvParams) -> float:
    """Almost-sure limit of X_n / n: zero unless alpha > beta + 1."""
    a, b = params.alpha, params.beta
    if a <= b + 1:
        return 0.0
    return (a - b - 1) / (a + b - 1)


# ---------------------------------------------------------------------------
# Quenched identities through R
# ---------------------------------------------------------------------------

@dataclass
class QuenchedIdentities:
    """Series-route values and their linear-solve cross-checks."""

    escape: float          # P_{1, omega}(never hits 0) = 1 / R
    green: float           # G_omega(0, 0) = R / omega_0
    mean_hitting: float    # E_{0, omega}[H_1] = 2 R_minus - 1
    solve_escape: float
    solve_green: float
    solve_mean_hitting: float
    within_tol: bool


def _series_from_stream(gen, params, tol):
    """Draw omegas until the running rho-product is below tol * partial sum."""
    omegas = []
    total = 1.0
    prod = 1.0
    while prod >= tol * total:
        if len(omegas) > SERIES_CAP:
            raise DepthInsufficientError("slab grew past the series cap")
        u = float(gen.beta(params.alpha, params.beta))
        omegas.append(u)
        prod *= (1.0 - u) / u
        total += prod
    return total, omegas


def quenched_identities(params: BetaEnvParams, rng, tol: float = 1e-12,
                        flag_tol: float = 1e-6) -> QuenchedIdentities:
    """Evaluate the three R-identities on one sampled environment and
    cross-check each against a direct linear solve on a truncated segment."""
    from .graph_env import (Environment, absorption_probability, build_segment,
                            expected_hitting_time, green_function_finite)

    params.require_transient_right()
    gen = _as_generator(rng)
    r_plus, right = _series_from_stream(gen, params, tol)    # omega_1, omega_2, ...
    r_minus, left = _series_from_stream(gen, params, tol)    # omega_0, omega_-1, ...
    omega0 = left[0]
    escape = 1.0 / r_plus
    green = r_plus / omega0
    mean_hitting = 2.0 * r_minus - 1.0

    # segment vertices 0..L; vertex i + off is lattice site i
    n_left = len(left)
    sites = list(range(-n_left, len(right) + 2))  # site -n_left .. K+1
    off = n_left
    length = len(sites) - 1
    seg = build_segment(length)
    omega_at = {}
    for i, w in enumerate(right, start=1):
        omega_at[i] = w
    for i, w in enumerate(left, start=0):
        omega_at[-i] = w
    probs = np.empty(seg.n_edges)
    for e in range(seg.n_edges):
        t, h = int(seg.tails[e]), int(seg.heads[e])
        site = t - off
        if t == 0:
            probs[e] = 1.0  # bottom boundary: forced right, never reached in practice
        elif site in omega_at:
            probs[e] = omega_at[site] if h > t else 1.0 - omega_at[site]
        else:
            probs[e] = 0.5  # top boundary site K+1, absorbing targets only
    env = Environment(seg, _renormalize_vertex(seg, probs))
    top = length
    solve_green = green_function_finite(env, range(1, length), 0 + off)
    solve_mean = expected_hitting_time(env, 0 + off, [1 + off])
    # escape never looks left of 0; solving on the right sub-segment keeps
    # the system well conditioned
    right_len = top - off
    right_seg = build_segment(right_len)
    right_probs = np.empty(right_seg.n_edges)
    for e in range(right_seg.n_edges):
        t, h = int(right_seg.tails[e]), int(right_seg.heads[e])
        if t == 0 or t == right_len:
            right_probs[e] = 1.0
        else:
            right_probs[e] = omega_at[t] if h > t else 1.0 - omega_at[t]
    right_env = Environment(right_seg, _renormalize_vertex(right_seg, right_probs))
    solve_escape = absorption_probability(right_env, 1, [right_len], [0])

    def _rel(a, b):
        return abs(a - b) / max(abs(a), abs(b), 1e-300)

    ok = (_rel(escape, solve_escape) < flag_tol
          and _rel(green, solve_green) < flag_tol
          and _rel(mean_hitting, solve_mean) < flag_tol)
    return QuenchedIdentities(escape, green, mean_hitting,
                              solve_escape, solve_green, solve_mean, ok)


def _renormalize_vertex(graph, probs):
    sums = np.bincount(graph.tails, weights=probs, minlength=graph.n_vertices)
    return probs / sums[graph.tails]


# ---------------------------------------------------------------------------
# Scaling regimes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RegimeConstants:
    """Scaling regime of X_n with its explicit constants.

    `exponent` is the growth exponent of X_n itself, min(1, kappa1);
    `fluctuation_exponent` is the n-power normalizing the limit law.  The
    scale constant multiplies the limit variable; it is None at kappa1 = 2,
    where the correct normalization sqrt(n log n) has no closed-form constant.
    """

    regime: str
    kappa1: float
    speed: float
    exponent: float
    fluctuation_exponent: float
    scale_constant: float | None
    note: str = ""


def regime_constants(params: BetaEnvParams) -> RegimeConstants:
    params.require_transient_right()
    a, b = params.alpha, params.beta
    k1 = params.kappa1
    v = solomon_speed(params)
    psi_diff = float(sps.digamma(a) - sps.digamma(b))
    log_b = float(sps.betaln(k1, b))
    if k1 < 1:
        scale = math.sin(math.pi * k1) / (2 ** k1 * math.pi) \
            * math.exp(2 * log_b) / psi_diff
        return RegimeConstants("sub-ballistic", k1, 0.0, k1, k1, scale,
                               "X_n / n^kappa1 converges to scale * S^(-kappa1)")
    if k1 == 1:
        return RegimeConstants("critical", k1, 0.0, 1.0, 1.0, 1.0 / (2 * b),
                               "X_n log(n) / n -> 1/(2 beta) in probability")
    if k1 < 2:
        inner = -math.pi / math.sin(math.pi * k1) * psi_diff / math.exp(2 * log_b)
        scale = -2.0 * inner ** (1.0 / k1) * v ** (1.0 + 1.0 / k1)
        return RegimeConstants("stable", k1, v, 1.0, 1.0 / k1, scale,
                               "(X_n - n v) / n^(1/kappa1) converges to scale * S")
    if k1 == 2:
        return RegimeConstants("boundary", k1, v, 1.0, 0.5, None,
                               "CLT at scale sqrt(n log n); constant not in closed form")
    scale = 2.0 * math.sqrt(b * (a - 1) * k1 / ((k1 - 2) * (a + b - 1) ** 2))
    return RegimeConstants("gaussian", k1, v, 1.0, 0.5, scale,
                           "(X_n - n v) / sqrt(n) converges to scale * N(0,1)")


def regime_table_csv(rows) -> str:
    lines = ["alpha,beta,kappa1,regime,v,exponent,scale_constant_or_NA"]
    for params in rows:
        rc = regime_constants(params)
        sc = "NA" if rc.scale_constant is None else f"{rc.scale_constant:.12g}"
        lines.append(f"{params.alpha},{params.beta},{rc.kappa1},{rc.regime},"
                     f"{rc.speed:.12g},{rc.exponent},{sc}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Hypergeometric machinery
# ---------------------------------------------------------------------------

def _beta_weighted_quad(g, a: float, b: float, upper: float = 1.0,
                        near_one_scale: float | None = None) -> float:
    """integral_0^upper u^(a-1) (1-u)^(b-1) g(u) du.

    Endpoint singularities are removed by the substitutions u = s^(1/a) near 0
    and 1 - u = s^(1/b) near 1, then integrated adaptively.  If g turns over
    sharply at distance `near_one_scale` from u = 1 (the hypergeometric factor
    when z -> 1), breakpoints are planted there so the quadrature resolves it.
    """
    if upper <= 0.0:
        return 0.0
    upper = min(upper, 1.0)
    total = 0.0
    mid = 0.5
    lo_hi = min(upper, mid)
    # left piece: u = s^(1/a)
    s_hi = lo_hi ** a
    def left(s):
        u = s ** (1.0 / a)
        return (1.0 - u) ** (b - 1.0) * g(u) / a
    total += integrate.quad(left, 0.0, s_hi, limit=200, epsabs=1e-13, epsrel=1e-12)[0]
    if upper > mid:
        # right piece: 1 - u = s^(1/b), s from (1-upper)^b to (1/2)^b
        s_lo = (1.0 - upper) ** b
        def right(s):
            u = 1.0 - s ** (1.0 / b)
            return u ** (a - 1.0) * g(u) / b
        points = None
        if near_one_scale is not None and near_one_scale > 0:
            cand = [(near_one_scale * f) ** b for f in (0.01, 1.0, 100.0)]
            points = [p for p in cand if s_lo < p < mid ** b] or None
        total += integrate.quad(right, s_lo, mid ** b, limit=200, points=points,
                                epsabs=1e-13, epsrel=1e-12)[0]
    return total


def _peak_scale(z: float) -> float | None:
    """Distance from u = 1 at which (1 - u z)^(-a) stops varying."""
    if z <= 0.0:
        return None
    return (1.0 - z) / z


def hyp2f1(a: float, b: float, c: float, z: float) -> float:
    """Gauss hypergeometric F(a, b; c; z) on the Euler-integral domain
    c > b > 0, z < 1, by adaptive quadrature."""
    if not (c > b > 0):
        raise ParameterDomainError("need c > b > 0")
    if z >= 1:
        raise ParameterDomainError("need z < 1")
    val = _beta_weighted_quad(lambda u: (1.0 - u * z) ** (-a), b, c - b,
                              near_one_scale=_peak_scale(z))
    return float(val / np.exp(sps.betaln(b, c - b)))


def h1_normalizer(params: BetaEnvParams, z: float) -> float:
    """B(alpha, beta) * F(alpha, alpha; alpha+beta; z), the h1 mass factor."""
    if z >= 1:
        raise ParameterDomainError("need z < 1")
    a, b = params.alpha, params.beta
    return _beta_weighted_quad(lambda u: (1.0 - u * z) ** (-a), a, b,
                               near_one_scale=_peak_scale(z))


def h1_density(params: BetaEnvParams, z: float, u) -> np.ndarray:
    """Density of the hypergeometric law h1(alpha, beta; z) on (0, 1):
    u^(alpha-1) (1-u)^(beta-1) (1-uz)^(-alpha), normalized.

    At z = 0 this is exactly the Beta(alpha, beta) density.
    """
    if z >= 1:
        raise ParameterDomainError("need z < 1")
    a, b = params.alpha, params.beta
    un = np.asarray(u, dtype=float)
    norm = h1_normalizer(params, z)
    with np.errstate(divide="ignore"):
        val = np.where(
            (un > 0) & (un < 1),
            un ** (a - 1) * (1 - un) ** (b - 1) * (1 - un * z) ** (-a) / norm,
            0.0,
        )
    return val if val.ndim else float(val)


def h1_cdf(params: BetaEnvParams, z: float, u) -> np.ndarray:
    """CDF of h1 by quadrature; monotone with endpoints 0 and 1."""
    a, b = params.alpha, params.beta
    norm = h1_normalizer(params, z)
    un = np.atleast_1d(np.asarray(u, dtype=float))
    out = np.empty(un.shape)
    for i, x in enumerate(un):
        if x <= 0:
            out[i] = 0.0
        elif x >= 1:
            out[i] = 1.0
        else:
            out[i] = _beta_weighted_quad(lambda t: (1.0 - t * z) ** (-a), a, b,
                                         upper=x,
                                         near_one_scale=_peak_scale(z)) / norm
    return out if np.asarray(u).ndim else float(out[0])


def h1_expect(params: BetaEnvParams, z: float, g) -> float:
    """E[g(U)] for U ~ h1(alpha, beta; z)."""
    a, b = params.alpha, params.beta
    norm = h1_normalizer(params, z)
    val = _beta_weighted_quad(lambda u: (1.0 - u * z) ** (-a) * g(u), a, b,
                              near_one_scale=_peak_scale(z))
    return float(val / norm)


def h2_expect(params: BetaEnvParams, z: float, g) -> float:
    """E[g(X)] for X ~ h2(alpha, beta; z) on (0, inf).

    Under X = U / (1 - U) the h2 law pulls back to h1, so this is
    E_{h1}[g(U / (1 - U))].
    """
    return h1_expect(params, z, lambda u: g(u / (1.0 - u)))


# ---------------------------------------------------------------------------
# phi(omega, lambda) = E_{0, omega}[lambda^(H_1)]
# ---------------------------------------------------------------------------

def _phi_forward(omega_slab: np.ndarray, lam: float, seed_value: float) -> np.ndarray:
    """Run the one-step recursion from the deep end of the slab to site 0.

    omega_slab[..., i] is the right-step probability at site -i; the recursion
    is phi(k) = lam * omega_k / (1 - lam * (1 - omega_k) * phi(k - 1)).
    """
    phi = np.full(omega_slab.shape[:-1], seed_value, dtype=float)
    depth = omega_slab.shape[-1]
    for i in range(depth - 1, -1, -1):
        w = omega_slab[..., i]
        phi = lam * w / (1.0 - lam * (1.0 - w) * phi)
    return phi


def phi_continued_fraction(omega_slab, lam: float, agreement_tol: float = 1e-10) -> float:
    """phi(omega, lambda) from a finite slab omega_0, omega_-1, ..., omega_-M.

    The backward recursion is seeded at the unknown deep site with the two
    extreme values 0 and lambda; their agreement at site 0 certifies that the
    slab is deep enough (phi always lies between the two runs).
    """
    if not 0.0 < lam <= 1.0:
        raise ParameterDomainError("lambda must lie in (0, 1]")
    slab = np.asarray(omega_slab, dtype=float)
    if slab.ndim != 1 or slab.size < 1:
        raise UsageError("slab must be a nonempty 1-D array")
    lo = _phi_forward(slab, lam, 0.0)
    hi = _phi_forward(slab, lam, lam)
    if abs(hi - lo) > agreement_tol:
        raise DepthInsufficientError(
            f"seeds disagree by {abs(hi - lo):.2e} at depth {slab.size - 1}")
    return float(0.5 * (lo + hi))


def sample_phi(params: BetaEnvParams, lam: float, rng, size: int,
               agreement_tol: float = 1e-10) -> np.ndarray:
    """Monte Carlo of phi over environments, with adaptive slab depth.

    Doubles the slab until the two-seed gap is below tolerance for every
    sample (capped), then returns the certified values.
    """
    if not 0.0 < lam <= 1.0:
        raise ParameterDomainError("lambda must lie in (0, 1]")
    gen = _as_generator(rng)
    depth = 32
    slab = gen.beta(params.alpha, params.beta, size=(size, depth))
    while True:
        lo = _phi_forward(slab, lam, 0.0)
        hi = _phi_forward(slab, lam, lam)
        if np.max(hi - lo) <= agreement_tol:
            return 0.5 * (lo + hi)
        if depth >= PHI_DEPTH_CAP:
            raise DepthInsufficientError(f"no two-seed agreement at depth {depth}")
        extra = gen.beta(params.alpha, params.beta, size=(size, depth))
        slab = np.concatenate([slab, extra], axis=1)
        depth *= 2


def sample_Z_fixed_point(params: BetaEnvParams, lam: float, iterations: int,
                         rng, size: int = 1) -> np.ndarray:
    """Iterate the distributional fixed point Z <- Y / (1 + Y - lam^2 Z)
    with fresh Y = U / (1 - U), U ~ Beta(alpha, beta).

    Each chain starts at 0.5; after burn-in the output follows the stationary
    law.  The iteration keeps Z in (0, 1) for lam <= 1, which is asserted per
    sample; at lam = 1 the stationary law is the point mass at 1 and floating
    point may saturate there, so only the open lower bound is enforced.
    """
    if not 0.0 < lam <= 1.0:
        raise ParameterDomainError("lambda must lie in (0, 1]")
    if iterations < 1:
        raise UsageError("need at least one iteration")
    gen = _as_generator(rng)
    z = np.full(size, 0.5)
    lam2 = lam * lam
    for _ in range(iterations):
        u = gen.beta(params.alpha, params.beta, size=size)
        z = u / (1.0 - lam2 * (1.0 - u) * z)
        if lam == 1.0:
            # the lam = 1 law is the point mass at 1; rounding may overshoot
            # the degenerate fixed point, so pin the iterate to the limit
            np.minimum(z, 1.0, out=z)
            if not np.all(z > 0.0):
                raise AssertionError("fixed-point iterate left (0, 1]")
        elif not np.all((z > 0.0) & (z < 1.0)):
            raise AssertionError("fixed-point iterate left (0, 1)")
    return z


# ---------------------------------------------------------------------------
# Rate function
# ---------------------------------------------------------------------------

def log_mgf(params: BetaEnvParams, lam: float) -> float:
    """E[log phi(omega, lambda)] = log(lambda) + E_{h1(lam^2)}[log U].

    At lambda = 1, phi = 1 for rightward-transient parameters, so the value
    is 0 (the h1 density degenerates there and is handled as this limit).
    """
    params.require_transient_right()
    if not 0.0 < lam <= 1.0:
        raise ParameterDomainError("lambda must lie in (0, 1]")
    if lam == 1.0:
        return 0.0
    return math.log(lam) + h1_expect(params, lam * lam, np.log)


def rate_function(params: BetaEnvParams, t: float,
                  bracket: tuple[float, float] = (-20.0, 0.0),
                  tol: float = 1e-10) -> tuple[float, float]:
    """Large-deviation rate of H_k / k at t >= 1 and its maximizer.

    I(t) = sup over lambda in (0, 1] of (t log lambda - log_mgf(lambda)),
    computed by golden-section on log(lambda); the objective is concave there.
    Returns (I(t), lambda_star).  I(1/v) = 0 with maximizer lambda = 1.

    For t >= 1/v the objective has slope t - 1/v >= 0 at lambda = 1, so the
    supremum sits at the boundary with value 0; that branch is returned
    exactly (slow hitting is driven by polynomial tails, not exponential).
    """
    params.require_transient_right()
    if t < 1.0:
        raise ParameterDomainError("H_k >= k makes t < 1 unreachable")
    v = solomon_speed(params)
    if v > 0.0 and t >= 1.0 / v:
        return 0.0, 1.0

    def objective(s: float) -> float:
        return t * s - log_mgf(params, math.exp(s))

    lo, hi = bracket
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = objective(c), objective(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = objective(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = objective(d)
    s_star = 0.5 * (a + b)
    candidates = [(objective(s_star), s_star), (objective(hi), hi)]
    best, s_best = max(candidates)
    return float(max(best, 0.0)), float(math.exp(s_best))


@dataclass
class RateFunctionTable:
    t: np.ndarray
    rate: np.ndarray
    lambda_star: np.ndarray

    def to_csv(self) -> str:
        lines = ["t,I,lambda_star"]
        for t, i, l in zip(self.t, self.rate, self.lambda_star):
            lines.append(f"{t:.12g},{i:.12g},{l:.12g}")
        return "\n".join(lines) + "\n"


def rate_function_table(params: BetaEnvParams, t_grid) -> RateFunctionTable:
    ts = np.asarray(t_grid, dtype=float)
    rates = np.empty(ts.size)
    lams = np.empty(ts.size)
    for i, t in enumerate(ts):
        rates[i], lams[i] = rate_function(params, float(t))
    return RateFunctionTable(ts, rates, lams)
