"""
interval.py — Confidence intervals for σ and their images for power.

Any 100(1−γ)% interval (a, b) for σ maps through a strictly monotone f to
a 100(1−γ)% interval for f(σ): (f(a), f(b)) if f increases,
(f(b), f(a)) if it decreases.  Power decreases in σ, so

    a < σ < b    ⇔    ω(b) < ω(σ) < ω(a)

on every sample, and the power interval inherits the exact coverage of
the σ interval.

σ intervals come from the residual sum of squares q (q/σ² ~ chi-square(v)):
a = √(q/B), b = √(q/A) with F_v(B) − F_v(A) = 1 − γ.  The equal-tail
choice puts A and B at γ/2 and 1 − γ/2.  The minimum-length choice picks
A, B to minimise the induced power-interval length; because those
positions depend on the observed q, its coverage is NOT guaranteed.

All intervals are open; coverage indicators use strict comparisons.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

import config as cfg
from dist import ChiSquare, chisq_cdf, chisq_quantile
from power import power_at_sigma, power_mle
from specfun import ConvergenceError, DomainError

log = logging.getLogger(__name__)

_PHI = 2.0 / (1.0 + math.sqrt(5.0))


class DegenerateMapError(DomainError):
    """The noncentrality map is constant (λ = 0), so interval length is identically 0."""


class DegenerateSampleError(DomainError):
    """The sample has zero residual sum of squares."""


class OptimizerError(ConvergenceError):
    """The minimum-length search failed to converge."""


# ────────────────────────────────────────────────────────────
# Types
# ────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class SigmaInterval:
    """
    Interval (a, b) for σ built from q at chi-square positions (A, B).

    V denotes both the chi-square variable and the observed residual sum
    of squares; the observed quantity is `q` (squared response units).
    """

    a: float
    b: float
    A: float
    B: float
    gamma: float
    v: float
    q: float

    def __post_init__(self):
        if not (0 < self.a < self.b):
            raise DomainError(f"SigmaInterval needs 0 < a < b, got a={self.a!r}, b={self.b!r}")
        if not (0 < self.A < self.B):
            raise DomainError(f"SigmaInterval needs 0 < A < B, got A={self.A!r}, B={self.B!r}")
        if not 0.0 < self.gamma < 1.0:
            raise DomainError(f"SigmaInterval.gamma must lie in (0, 1), got {self.gamma!r}")

    @property
    def content(self):
        """F_v(B) − F_v(A); equals 1 − gamma."""
        chi = ChiSquare(self.v)
        return chisq_cdf(chi, self.B) - chisq_cdf(chi, self.A)

    def covers(self, sigma):
        return self.a < sigma < self.b


@dataclass(frozen=True)
class PowerInterval:
    lo: float
    hi: float
    gamma: float
    alpha: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.lo <= self.hi <= 1.0):
            raise DomainError(f"PowerInterval needs 0 <= lo <= hi <= 1, got ({self.lo!r}, {self.hi!r})")
        if self.lo < self.alpha:
            raise DomainError(f"PowerInterval.lo must be >= alpha {self.alpha!r}, got {self.lo!r}")

    @property
    def length(self):
        return self.hi - self.lo

    def covers(self, omega):
        return self.lo < omega < self.hi


@dataclass(frozen=True)
class MinLengthResult:
    """
    Outcome of the minimum-length search.

    coverage_guaranteed is always False: the positions depend on the
    observed q, so the 1 − γ content of the σ interval no longer implies
    1 − γ coverage.
    """

    A: float
    B: float
    t: float
    sigma_interval: SigmaInterval
    power_interval: PowerInterval
    length: float
    equal_tail_length: float
    coverage_guaranteed: bool = False


@dataclass(frozen=True)
class SampleSummary:
    """n, Ȳ, q = Σ(Yᵢ − Ȳ)², and the MLE scale S = √(q/n)."""

    n: int
    mean: float
    q: float
    s_mle: float


# ────────────────────────────────────────────────────────────
# σ intervals
# ────────────────────────────────────────────────────────────

def _check_interval_args(q, v, gamma):
    if not (math.isfinite(q) and q > 0):
        raise DomainError(f"q must be > 0, got {q!r}")
    if not (math.isfinite(v) and v > 0):
        raise DomainError(f"v must be > 0, got {v!r}")
    if not 0.0 < gamma < 1.0:
        raise DomainError(f"gamma must lie in (0, 1), got {gamma!r}")


def sigma_ci_at_positions(q, v, gamma, A, B):
    """a = √(q/B), b = √(q/A) for caller-chosen positions with content 1 − γ."""
    _check_interval_args(q, v, gamma)
    return SigmaInterval(a=math.sqrt(q / B), b=math.sqrt(q / A), A=A, B=B, gamma=gamma, v=v, q=q)


def _positions(v, gamma, t):
    """
    A at probability t and B at probability t + 1 − γ, for t in (0, γ).

    The upper probability is formed as 1 − (γ − t) so that t = γ/2 gives
    the bit-identical probability used for the equal-tail interval.
    """
    chi = ChiSquare(v)
    return chisq_quantile(chi, t), chisq_quantile(chi, 1.0 - (gamma - t))


def sigma_ci_equal_tail(q, v, gamma):
    _check_interval_args(q, v, gamma)
    A, B = _positions(v, gamma, 0.5 * gamma)
    return sigma_ci_at_positions(q, v, gamma, A, B)


# ────────────────────────────────────────────────────────────
# Transformation to power
# ────────────────────────────────────────────────────────────

def transform_interval(lo, hi, f, increasing):
    """Image of the open interval (lo, hi) under a strictly monotone f."""
    if increasing:
        image = (f(lo), f(hi))
    else:
        image = (f(hi), f(lo))
    if image[0] > image[1]:
        raise DomainError(
            f"transformed endpoints are out of order {image}; f is not "
            f"{'increasing' if increasing else 'decreasing'} on ({lo!r}, {hi!r})"
        )
    return image


def power_ci(interval, design, noncentrality_map):
    """
    (ω(b), ω(a)): the power interval induced by a σ interval.

    For the two-sided t-test (u = 1, v = n − 1) this is the interval
    {1 − G_{1,n−1,δ(b)}(c), 1 − G_{1,n−1,δ(a)}(c)}.
    """
    lo, hi = transform_interval(
        interval.a,
        interval.b,
        lambda sigma: power_at_sigma(design, noncentrality_map, sigma),
        increasing=False,
    )
    return PowerInterval(lo=lo, hi=hi, gamma=interval.gamma, alpha=design.alpha)


# ────────────────────────────────────────────────────────────
# Minimum-length positions
# ────────────────────────────────────────────────────────────

def _golden_section(f, lo, hi, tol, max_iter):
    """Minimise f on (lo, hi) without evaluating the endpoints."""
    x1 = hi - _PHI * (hi - lo)
    x2 = lo + _PHI * (hi - lo)
    f1 = f(x1)
    f2 = f(x2)
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        if f2 > f1:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _PHI * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _PHI * (hi - lo)
            f2 = f(x2)
    else:
        if hi - lo > tol:
            raise OptimizerError(
                f"golden-section search stalled at bracket width {hi - lo!r} after {max_iter} iterations"
            )
    if math.isnan(f1) or math.isnan(f2):
        raise OptimizerError("golden-section search produced NaN lengths")
    return (x1, f1) if f1 <= f2 else (x2, f2)


def minlen_positions(q, v, gamma, design, noncentrality_map, scan_points=None):
    """
    Positions (A, B) minimising the power-interval length

        L(t) = ω(a) − ω(b),  A = F_v⁻¹(t),  B = F_v⁻¹(t + 1 − γ),  t ∈ (0, γ)

    L(t) is not known to be unimodal, so a coarse scan of `scan_points`
    values seeds a golden-section search on the bracket around the best
    scan point.  The equal-tail point t = γ/2 is always a candidate, so the
    returned length never exceeds the equal-tail length.
    """
    _check_interval_args(q, v, gamma)
    if noncentrality_map.lambda_effect == 0.0:
        raise DegenerateMapError("minimum-length positions are undefined when lambda_effect = 0")
    scan_points = scan_points or cfg.MINLEN_SCAN_POINTS

    def intervals_at(t):
        A, B = _positions(v, gamma, t)
        sigma_iv = sigma_ci_at_positions(q, v, gamma, A, B)
        return sigma_iv, power_ci(sigma_iv, design, noncentrality_map)

    def length(t):
        return intervals_at(t)[1].length

    grid = [gamma * i / (scan_points + 1) for i in range(scan_points + 2)]
    scan = [(length(t), i) for i, t in enumerate(grid) if 0 < i < scan_points + 1]
    best = min(scan)[1]
    t_best, l_best = _golden_section(
        length, grid[best - 1], grid[best + 1], cfg.GOLDEN_TOL, cfg.GOLDEN_MAX_ITER
    )

    t_equal = 0.5 * gamma
    sigma_equal, power_equal = intervals_at(t_equal)
    if power_equal.length <= l_best:
        t_best = t_equal
        sigma_iv, power_iv = sigma_equal, power_equal
    else:
        sigma_iv, power_iv = intervals_at(t_best)

    log.debug("minlen: t=%.10g L=%.10g (equal-tail L=%.10g)", t_best, power_iv.length, power_equal.length)
    return MinLengthResult(
        A=sigma_iv.A,
        B=sigma_iv.B,
        t=t_best,
        sigma_interval=sigma_iv,
        power_interval=power_iv,
        length=power_iv.length,
        equal_tail_length=power_equal.length,
    )


# ────────────────────────────────────────────────────────────
# Two-sided t-test from data
# ────────────────────────────────────────────────────────────

def summarize_sample(values):
    y = np.asarray(values, dtype=float)
    if y.ndim != 1 or y.size < 2:
        raise DomainError(f"need at least 2 observations, got {y.size}")
    if not np.all(np.isfinite(y)):
        raise DomainError("observations must be finite")
    mean = float(np.mean(y))
    q = float(np.sum((y - mean) ** 2))
    if q <= 0.0:
        raise DegenerateSampleError("all observations are equal; the residual sum of squares is 0")
    return SampleSummary(n=int(y.size), mean=mean, q=q, s_mle=math.sqrt(q / y.size))


def t_test_power_ci(spec, summary, gamma, rule="equal_tail"):
    """
    Interval for the two-sided t-test power from a sample summary.

    Returns (SigmaInterval, PowerInterval, power MLE).  The min_length rule
    uses the fixed alternative's λ = √n|μ − μ₀| and its interval carries
    no coverage guarantee.
    """
    if summary.n != spec.n:
        raise DomainError(f"sample size {summary.n} does not match spec.n = {spec.n}")
    design = spec.design
    nc_map = spec.noncentrality_map
    if rule == "equal_tail":
        sigma_iv = sigma_ci_equal_tail(summary.q, design.v, gamma)
        power_iv = power_ci(sigma_iv, design, nc_map)
    elif rule == "min_length":
        result = minlen_positions(summary.q, design.v, gamma, design, nc_map)
        sigma_iv, power_iv = result.sigma_interval, result.power_interval
    else:
        raise DomainError(f"unknown interval rule {rule!r}")
    return sigma_iv, power_iv, power_mle(spec, summary.s_mle)
