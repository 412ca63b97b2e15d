"""Exact samplers, Polya urns, closed-form moments, and test statistics.

Everything random takes an explicit :class:`~rwde.rng.RngHandle` (or a numpy
Generator); there is no hidden global state.  Moments that the underlying
distribution makes infinite are returned as ``math.inf``, not raised.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import special as sps

from .errors import ParameterDomainError, UsageError
from .rng import RngHandle

# Asymptotic two-sided Kolmogorov-Smirnov critical value at the 5% level,
# used as c / sqrt(n) throughout the statistical checks.
KS_5PCT = 1.358


def _as_generator(rng) -> np.random.Generator:
    if isinstance(rng, RngHandle):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise UsageError(f"expected RngHandle or numpy Generator, got {type(rng)!r}")


# ---------------------------------------------------------------------------
# Gamma / Dirichlet sampling
# ---------------------------------------------------------------------------

def sample_gamma(shape: float, rng, size=None):
    """Gamma(shape, 1) draws by rejection sampling (numpy's exact sampler)."""
    if shape <= 0:
        raise ParameterDomainError(f"gamma shape must be positive, got {shape}")
    return _as_generator(rng).gamma(shape, 1.0, size=size)


def sample_dirichlet(weights, rng, size=None) -> np.ndarray:
    """Dirichlet draw(s) as normalized independent Gamma(weight, 1) vectors.

    With ``size=None`` returns one simplex point of length ``len(weights)``;
    otherwise an array of shape ``(size, len(weights))``.
    """
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or w.size == 0:
        raise ParameterDomainError("weights must be a nonempty 1-D sequence")
    if np.any(w <= 0):
        raise ParameterDomainError("all Dirichlet weights must be positive")
    gen = _as_generator(rng)
    if size is None:
        g = gen.gamma(w)
        return g / g.sum()
    g = gen.gamma(w, size=(size, w.size))
    return g / g.sum(axis=1, keepdims=True)


def check_simplex(point, atol: float = 1e-12) -> np.ndarray:
    """Validate a simplex point: strictly positive, sums to 1 within atol."""
    p = np.asarray(point, dtype=float)
    if np.any(p <= 0):
        raise ParameterDomainError("simplex coordinates must be strictly positive")
    if abs(p.sum() - 1.0) > atol:
        raise ParameterDomainError(f"coordinates sum to {p.sum()!r}, not 1")
    return p


# ---------------------------------------------------------------------------
# Polya urns
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class UrnState:
    """Reinforced urn: current weight per color and number of draws so far."""

    weights: tuple
    draw_count: int = 0

    def __post_init__(self):
        if len(self.weights) == 0 or any(w <= 0 for w in self.weights):
            raise ParameterDomainError("urn weights must be positive")
        if self.draw_count < 0:
            raise UsageError("draw_count must be nonnegative")


def polya_draw(state: UrnState, rng) -> tuple[int, UrnState]:
    """One reinforced draw: color i picked prop. to weight, then weight += 1."""
    gen = _as_generator(rng)
    w = np.asarray(state.weights, dtype=float)
    color = int(gen.choice(w.size, p=w / w.sum()))
    new_weights = list(state.weights)
    new_weights[color] += 1
    return color, UrnState(tuple(new_weights), state.draw_count + 1)


def polya_path_probability(initial_weights, colors: Sequence[int]) -> float:
    """Probability of drawing the color sequence `colors` (0-based indices).

    Equals prod_i a_i (a_i+1)...(a_i+n_i-1) / prod_k (A+k-1) with A the total
    initial weight and n_i the count of color i, i.e. the Dirichlet joint
    moment with integer exponents n_i.
    """
    w = list(map(float, initial_weights))
    if any(c < 0 or c >= len(w) for c in colors):
        raise UsageError("color index out of range")
    total = sum(w)
    prob = 1.0
    counts = [0.0] * len(w)
    for k, c in enumerate(colors):
        prob *= (w[c] + counts[c]) / (total + k)
        counts[c] += 1
    return prob


def dirichlet_joint_moment(weights, exponents) -> float:
    """E[prod V_i^{xi_i}] under Dirichlet(weights); +inf when some a_i+xi_i <= 0.

    Valid for arbitrary real exponents, via the gamma-ratio product.
    """
    a = np.asarray(weights, dtype=float)
    xi = np.asarray(exponents, dtype=float)
    if a.shape != xi.shape:
        raise UsageError("weights and exponents must have matching shapes")
    if np.any(a <= 0):
        raise ParameterDomainError("Dirichlet weights must be positive")
    if np.any(a + xi <= 0):
        return math.inf
    log_m = (
        np.sum(sps.gammaln(a + xi)) - sps.gammaln(np.sum(a + xi))
        + sps.gammaln(a.sum()) - np.sum(sps.gammaln(a))
    )
    return float(np.exp(log_m))


# ---------------------------------------------------------------------------
# Special functions
# ---------------------------------------------------------------------------

def log_gamma(x: float) -> float:
    if x <= 0:
        raise ParameterDomainError(f"log_gamma needs x > 0, got {x}")
    return float(sps.gammaln(x))


def digamma(x: float) -> float:
    if x <= 0:
        raise ParameterDomainError(f"digamma needs x > 0, got {x}")
    return float(sps.digamma(x))


def beta_fn(a: float, b: float) -> float:
    if a <= 0 or b <= 0:
        raise ParameterDomainError("beta_fn needs positive arguments")
    return float(np.exp(sps.gammaln(a) + sps.gammaln(b) - sps.gammaln(a + b)))


def beta_cdf(a: float, b: float, x) -> float | np.ndarray:
    """Regularized incomplete beta; clamps x into [0, 1]."""
    if a <= 0 or b <= 0:
        raise ParameterDomainError("beta_cdf needs positive shape parameters")
    return sps.betainc(a, b, np.clip(x, 0.0, 1.0))


# ---------------------------------------------------------------------------
# Test statistics
# ---------------------------------------------------------------------------

def ks_statistic(samples, cdf: Callable) -> float:
    """Two-sided sup distance between the empirical CDF and `cdf`."""
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    if n == 0:
        raise UsageError("ks_statistic needs a nonempty sample")
    f = np.asarray(cdf(x), dtype=float)
    i = np.arange(1, n + 1)
    d_plus = np.max(i / n - f)
    d_minus = np.max(f - (i - 1) / n)
    return float(max(d_plus, d_minus))


def ks_threshold(n: int, c: float = KS_5PCT) -> float:
    """Asymptotic critical sup-distance c / sqrt(n)."""
    if n <= 0:
        raise UsageError("sample size must be positive")
    return c / math.sqrt(n)


def hill_tail_exponent(samples, k: int | None = None) -> float:
    """Hill estimate of the tail index kappa in P(X > t) ~ t^(-kappa).

    Uses the top-k order statistics; by default k = round(n^(2/3)), a
    bias/variance compromise.
    """
    x = np.asarray(samples, dtype=float)
    n = x.size
    if n < 2:
        raise UsageError("need at least two samples")
    if np.any(x <= 0):
        raise UsageError("Hill estimator needs positive samples")
    if k is None:
        k = int(round(n ** (2.0 / 3.0)))
    if not 0 < k < n:
        raise UsageError(f"order-statistic count k={k} out of range for n={n}")
    tail = np.sort(x)[n - k - 1:]
    h = np.mean(np.log(tail[1:]) - math.log(tail[0]))
    if h <= 0:
        return math.inf
    return 1.0 / h
