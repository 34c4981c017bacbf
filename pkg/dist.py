"""
dist.py — Central and noncentral chi-square and F distributions.

Noncentrality convention
------------------------
Noncentral types store δ, the *distance* by which the mean of a spherical
normal vector is translated from the origin.  The conventional
sum-of-squares noncentrality is λ = δ².  The conversion happens in exactly
one place, the two Poisson-mixture evaluators (nc_chisq_cdf and ncf_cdf),
where the mixing weights are Poisson(λ / 2).

Evaluators
----------
  chisq_cdf / chisq_sf / chisq_quantile      central chi-square
  f_cdf_central / f_quantile_central         central F
  nc_chisq_cdf                               Poisson mixture (primary)
  nc_chisq_cdf_ruben                         Bessel integral (cross-check)
  nc_chisq_cdf_ddelta                        closed-form ∂F/∂δ
  ncf_cdf                                    Poisson mixture (primary)
  ncf_cdf_by_expectation                     E_V[F_{u,δ}(x u V / v)] (cross-check)

δ = 0 is always routed to the central evaluators.  Distribution values are
immutable; every function here is pure.
"""

import logging
import math
from dataclasses import dataclass

import config as cfg
from specfun import (
    ConvergenceError,
    DomainError,
    log_bessel_i,
    log_gamma,
    reg_inc_beta,
    reg_inc_gamma_p,
    reg_inc_gamma_q,
)

log = logging.getLogger(__name__)

__all__ = [
    "ChiSquare",
    "NoncentralChiSquare",
    "NoncentralF",
    "ConvergenceError",
    "DomainError",
    "chisq_cdf",
    "chisq_sf",
    "chisq_pdf",
    "chisq_quantile",
    "f_cdf_central",
    "f_quantile_central",
    "nc_chisq_cdf",
    "nc_chisq_cdf_ruben",
    "nc_chisq_cdf_ddelta",
    "ncf_cdf",
    "ncf_cdf_by_expectation",
]


def _require_positive(name, value):
    if not (math.isfinite(value) and value > 0):
        raise DomainError(f"{name} must be a positive finite number, got {value!r}")


def _require_nonnegative(name, value):
    if not (math.isfinite(value) and value >= 0):
        raise DomainError(f"{name} must be a nonnegative finite number, got {value!r}")


def _require_probability(p):
    if not 0.0 < p < 1.0:
        raise DomainError(f"probability must lie in (0, 1), got {p!r}")


# ────────────────────────────────────────────────────────────
# Distribution types
# ────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class ChiSquare:
    """Central chi-square with `df` degrees of freedom."""

    df: float

    def __post_init__(self):
        _require_positive("ChiSquare.df", self.df)


@dataclass(frozen=True)
class NoncentralChiSquare:
    """
    Law of |Z + δe|² for Z standard normal in `df` dimensions.

    `delta` is the distance δ, not λ = δ².
    """

    df: float
    delta: float

    def __post_init__(self):
        _require_positive("NoncentralChiSquare.df", self.df)
        _require_nonnegative("NoncentralChiSquare.delta", self.delta)


@dataclass(frozen=True)
class NoncentralF:
    """Law of (U/df1)/(V/df2), U ~ NoncentralChiSquare(df1, delta), V ~ ChiSquare(df2)."""

    df1: float
    df2: float
    delta: float

    def __post_init__(self):
        _require_positive("NoncentralF.df1", self.df1)
        _require_positive("NoncentralF.df2", self.df2)
        _require_nonnegative("NoncentralF.delta", self.delta)


# ────────────────────────────────────────────────────────────
# Numerical helpers
# ────────────────────────────────────────────────────────────

def _expand_bracket(cdf, p, start):
    """Double `start` until cdf(hi) >= p."""
    hi = start
    for _ in range(cfg.QUANTILE_MAX_EXPAND):
        if cdf(hi) >= p:
            return hi
        log.debug("expanding quantile bracket past %g for p=%g", hi, p)
        hi *= 2.0
    raise ConvergenceError(f"could not bracket quantile for p={p!r} (last upper bound {hi!r})")


def _invert_cdf(cdf, p, lo, hi, max_iter=None):
    """
    Solve cdf(x) = p on a bracket [lo, hi] with cdf(lo) <= p <= cdf(hi).

    Illinois false position, falling back to bisection whenever two
    consecutive steps fail to halve the bracket.  Converges on the
    probability scale; returns early if the bracket collapses to machine
    precision.
    """
    max_iter = max_iter or cfg.QUANTILE_MAX_ITER
    tol = min(cfg.QUANTILE_PROB_TOL, 1e-8 * min(p, 1.0 - p))
    g_lo = cdf(lo) - p
    g_hi = cdf(hi) - p
    if abs(g_hi) <= tol:
        return hi
    side = 0
    width_before = hi - lo
    for iteration in range(max_iter):
        if iteration % 2 == 0:
            bisect = (hi - lo) > 0.5 * width_before
            width_before = hi - lo
        else:
            bisect = False

        x = 0.5 * (lo + hi)
        if not bisect and g_hi != g_lo:
            candidate = hi - g_hi * (hi - lo) / (g_hi - g_lo)
            if lo < candidate < hi:
                x = candidate

        g = cdf(x) - p
        if abs(g) <= tol:
            return x
        if g < 0:
            lo, g_lo = x, g
            if side == -1:
                g_hi *= 0.5
            side = -1
        else:
            hi, g_hi = x, g
            if side == 1:
                g_lo *= 0.5
            side = 1
        if hi - lo <= 4.0 * 2.220446049250313e-16 * hi:
            return 0.5 * (lo + hi)
    raise ConvergenceError(
        f"quantile root finder did not converge in {max_iter} iterations for p={p!r} "
        f"(bracket [{lo!r}, {hi!r}])"
    )


def _poisson_mixture(mean, term, tol=None, max_terms=None):
    """
    Σ_k Poisson(k; mean) · term(k) for a term(k) in [0, 1] nonincreasing in k.

    Summation starts at the modal index ⌊mean⌋ and walks outward.  A
    direction stops once its last term and the analytic bound on its
    remaining Poisson mass are both below `tol`.
    """
    tol = tol or cfg.SERIES_TOL
    max_terms = max_terms or cfg.SERIES_MAX_TERMS

    mode = math.floor(mean)
    w_mode = math.exp(-mean + mode * math.log(mean) - log_gamma(mode + 1.0))
    parts = [w_mode * term(mode)]

    # upward: w_{k+1} = w_k · mean / (k + 1), geometric ratio < 1 past the mode
    w, k = w_mode, mode
    while True:
        k += 1
        w *= mean / k
        t = w * term(k)
        parts.append(t)
        ratio = mean / (k + 1)
        tail = w * ratio / (1.0 - ratio)
        if t < tol and tail < tol:
            break
        if len(parts) > max_terms:
            raise ConvergenceError(
                f"Poisson mixture exceeded {max_terms} terms upward (mean={mean!r})"
            )

    # downward: w_{k-1} = w_k · k / mean
    w, k = w_mode, mode
    while k > 0:
        w *= k / mean
        k -= 1
        t = w * term(k)
        parts.append(t)
        if k == 0:
            break
        ratio = k / mean
        tail = w * ratio / (1.0 - ratio)
        if t < tol and tail < tol:
            break
        if len(parts) > max_terms:
            raise ConvergenceError(
                f"Poisson mixture exceeded {max_terms} terms downward (mean={mean!r})"
            )

    return min(1.0, max(0.0, math.fsum(parts)))


def _simpson(f, a, b, tol=None, initial=None, max_level=None):
    """
    Composite Simpson on [a, b], halving the mesh until two successive
    estimates differ by less than `tol`.  Previously evaluated nodes are
    reused at every level.
    """
    tol = tol or cfg.SIMPSON_TOL
    n = initial or 2
    n += n % 2
    max_intervals = 2 ** (max_level or cfg.SIMPSON_MAX_LEVEL)

    h = (b - a) / n
    ends = f(a) + f(b)
    odd = math.fsum(f(a + (2 * i - 1) * h) for i in range(1, n // 2 + 1))
    even = math.fsum(f(a + 2 * i * h) for i in range(1, n // 2))
    estimate = h / 3.0 * (ends + 4.0 * odd + 2.0 * even)

    while n < max_intervals:
        n *= 2
        h *= 0.5
        even += odd
        odd = math.fsum(f(a + (2 * i - 1) * h) for i in range(1, n // 2 + 1))
        refined = h / 3.0 * (ends + 4.0 * odd + 2.0 * even)
        if n >= cfg.SIMPSON_MIN_INTERVALS and abs(refined - estimate) < tol:
            return refined
        estimate = refined

    raise ConvergenceError(
        f"Simpson quadrature on [{a!r}, {b!r}] did not reach tol={tol!r} "
        f"within {max_intervals} subintervals"
    )


# ────────────────────────────────────────────────────────────
# Central chi-square
# ────────────────────────────────────────────────────────────

def chisq_cdf(d, x):
    """P(V <= x) = P(df/2, x/2)."""
    _require_nonnegative("x", x)
    return reg_inc_gamma_p(0.5 * d.df, 0.5 * x)


def chisq_sf(d, x):
    """P(V > x), computed without cancellation in the upper tail."""
    _require_nonnegative("x", x)
    return reg_inc_gamma_q(0.5 * d.df, 0.5 * x)


def chisq_pdf(d, x):
    _require_nonnegative("x", x)
    k = 0.5 * d.df
    if x == 0.0:
        if d.df < 2:
            return math.inf
        return 0.5 if d.df == 2 else 0.0
    return math.exp((k - 1.0) * math.log(x) - 0.5 * x - k * math.log(2.0) - log_gamma(k))


def chisq_quantile(d, p):
    """x with chisq_cdf(d, x) = p, to QUANTILE_PROB_TOL on the probability scale."""
    _require_probability(p)
    cdf = lambda x: chisq_cdf(d, x)
    start = d.df + 10.0 * math.sqrt(2.0 * d.df) + 10.0
    hi = _expand_bracket(cdf, p, start)
    return _invert_cdf(cdf, p, 0.0, hi)


# ────────────────────────────────────────────────────────────
# Central F
# ────────────────────────────────────────────────────────────

def f_cdf_central(df1, df2, x):
    """G_{df1,df2,0}(x) = I_y(df1/2, df2/2), y = df1·x / (df1·x + df2)."""
    _require_positive("df1", df1)
    _require_positive("df2", df2)
    _require_nonnegative("x", x)
    if x == 0.0:
        return 0.0
    y = df1 * x / (df1 * x + df2)
    return reg_inc_beta(0.5 * df1, 0.5 * df2, y)


def f_quantile_central(df1, df2, p):
    _require_probability(p)
    cdf = lambda x: f_cdf_central(df1, df2, x)
    hi = _expand_bracket(cdf, p, 1.0)
    return _invert_cdf(cdf, p, 0.0, hi)


# ────────────────────────────────────────────────────────────
# Noncentral chi-square
# ────────────────────────────────────────────────────────────

def nc_chisq_cdf(d, x):
    """
    Poisson mixture Σ_k e^{−λ/2}(λ/2)^k / k! · P(df/2 + k, x/2), λ = δ².
    """
    _require_nonnegative("x", x)
    if d.delta == 0.0:
        return chisq_cdf(ChiSquare(d.df), x)
    if x == 0.0:
        return 0.0
    lam = d.delta * d.delta
    half_df = 0.5 * d.df
    half_x = 0.5 * x
    return _poisson_mixture(0.5 * lam, lambda k: reg_inc_gamma_p(half_df + k, half_x))


def _ruben_integrand(df, delta):
    """x ↦ δ^{1−u/2} e^{−δ²/2} x^{u/2} e^{−x²/2} I_{u/2−1}(δx), evaluated in log space."""
    order = 0.5 * df - 1.0
    log_front = (1.0 - 0.5 * df) * math.log(delta) - 0.5 * delta * delta
    # limit at the origin: nonzero only for df == 1 (x^{u-1} factor)
    at_zero = math.sqrt(2.0 / math.pi) * math.exp(-0.5 * delta * delta) if df == 1 else 0.0

    def integrand(x):
        if x == 0.0:
            return at_zero
        return math.exp(
            log_front + 0.5 * df * math.log(x) - 0.5 * x * x + log_bessel_i(order, delta * x)
        )

    return integrand


def nc_chisq_cdf_ruben(d, r):
    """
    F_{u,δ}(r²) as the Bessel integral over radii 0..r:

        δ^{1−u/2} e^{−δ²/2} ∫_0^r x^{u/2} e^{−x²/2} I_{u/2−1}(δx) dx

    Independent of the Poisson mixture; used to cross-check nc_chisq_cdf.
    Requires df >= 1 so the Bessel order stays >= −1/2.
    """
    if d.delta == 0.0:
        raise DomainError("nc_chisq_cdf_ruben requires delta > 0; use chisq_cdf for delta = 0")
    _require_positive("r", r)
    if d.df < 1.0:
        raise DomainError(f"nc_chisq_cdf_ruben requires df >= 1, got {d.df!r}")
    value = _simpson(_ruben_integrand(d.df, d.delta), 0.0, r)
    return min(1.0, max(0.0, value))


def nc_chisq_cdf_ddelta(d, r):
    """∂F_{u,δ}(r²)/∂δ = −r^{u/2} δ^{1−u/2} e^{−(r²+δ²)/2} I_{u/2}(rδ); always negative."""
    if not d.delta > 0:
        raise DomainError(f"nc_chisq_cdf_ddelta requires delta > 0, got {d.delta!r}")
    _require_positive("r", r)
    u = d.df
    log_mag = (
        0.5 * u * math.log(r)
        + (1.0 - 0.5 * u) * math.log(d.delta)
        - 0.5 * (r * r + d.delta * d.delta)
        + log_bessel_i(0.5 * u, r * d.delta)
    )
    return -math.exp(log_mag)


# ────────────────────────────────────────────────────────────
# Noncentral F
# ────────────────────────────────────────────────────────────

def ncf_cdf(d, x):
    """
    G_{u,v,δ}(x) = Σ_k e^{−λ/2}(λ/2)^k / k! · I_y(u/2 + k, v/2), λ = δ²,
    y = u·x / (u·x + v).
    """
    _require_nonnegative("x", x)
    if d.delta == 0.0:
        return f_cdf_central(d.df1, d.df2, x)
    if x == 0.0:
        return 0.0
    lam = d.delta * d.delta
    y = d.df1 * x / (d.df1 * x + d.df2)
    a = 0.5 * d.df1
    b = 0.5 * d.df2
    return _poisson_mixture(0.5 * lam, lambda k: reg_inc_beta(a + k, b, y))


def _chisq_upper_limit(df, tail_mass):
    """Smallest doubling point beyond which V carries less than `tail_mass`."""
    d = ChiSquare(df)
    hi = df + 10.0 * math.sqrt(2.0 * df) + 20.0
    for _ in range(cfg.QUANTILE_MAX_EXPAND):
        if chisq_sf(d, hi) <= tail_mass:
            return hi
        hi *= 2.0
    raise ConvergenceError(f"could not truncate chi-square({df!r}) tail below {tail_mass!r}")


def ncf_cdf_by_expectation(d, x, nodes=None):
    """
    G_{u,v,δ}(x) = E[F_{u,δ}(x·u·V / v)], V ~ chi-square(v).

    Integrated in y = √V, where the weight 2y·f_V(y²) ∝ y^{v−1} e^{−y²/2}
    stays bounded at the origin for v >= 1.  The range is truncated where
    the upper tail of V drops below CHISQ_TAIL_MASS.
    """
    nodes = nodes or cfg.EXPECTATION_DEFAULT_NODES
    if nodes < 16:
        raise DomainError(f"ncf_cdf_by_expectation requires nodes >= 16, got {nodes!r}")
    _require_nonnegative("x", x)
    if d.df2 < 1.0:
        raise DomainError(f"ncf_cdf_by_expectation requires df2 >= 1, got {d.df2!r}")
    if x == 0.0:
        return 0.0

    u, v = d.df1, d.df2
    numerator = NoncentralChiSquare(u, d.delta)
    scale = x * u / v
    log_norm = math.log(2.0) - 0.5 * v * math.log(2.0) - log_gamma(0.5 * v)

    def integrand(y):
        if y == 0.0:
            return 0.0  # F_{u,delta}(0) = 0
        weight = math.exp(log_norm + (v - 1.0) * math.log(y) - 0.5 * y * y)
        return weight * nc_chisq_cdf(numerator, scale * y * y)

    y_hi = math.sqrt(_chisq_upper_limit(v, cfg.CHISQ_TAIL_MASS))
    value = _simpson(integrand, 0.0, y_hi, tol=cfg.EXPECTATION_QUAD_TOL, initial=nodes)
    return min(1.0, max(0.0, value))
