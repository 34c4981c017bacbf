"""
specfun.py — Special functions behind every distribution in the toolkit.

Pure-Python evaluators (only the standard ``math`` module) for:

  - ln Γ(x)                        Stirling series after an upward shift
  - P(s, x), Q(s, x)               regularized incomplete gamma
  - I_x(a, b)                      regularized incomplete beta
  - ln I_ν(z)                      modified Bessel function, first kind

Every loop is capped by ``Accuracy.max_iter`` and raises ConvergenceError
when the cap is hit; nothing is silently truncated.

Bessel convention at z = 0:
  order == 0       →  ln I_0(0) = 0
  order  > 0       →  -inf        (I_ν(0) = 0)
  -1/2 <= order < 0 →  +inf        (I_ν(z) → +∞ as z → 0⁺)

All functions are pure; they are safe to call from any number of threads.
"""

import math
from dataclasses import dataclass

import config as cfg


# ────────────────────────────────────────────────────────────
# Errors
# ────────────────────────────────────────────────────────────

class DomainError(ValueError):
    """An argument lies outside the domain of the requested function."""


class ConvergenceError(ArithmeticError):
    """A series, continued fraction, root finder or quadrature hit its cap."""


# ────────────────────────────────────────────────────────────
# Accuracy
# ────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class Accuracy:
    """
    Stopping policy for the iterative evaluators.

    abs_tol is used as the relative increment at which a series or a
    continued fraction is considered converged; max_iter caps the loop.
    """

    abs_tol: float = cfg.SPECFUN_TOL
    max_iter: int = cfg.SPECFUN_MAX_ITER

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.abs_tol >= 1e-15):
            raise DomainError(f"Accuracy.abs_tol must be >= 1e-15, got {self.abs_tol!r}")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise DomainError(f"Accuracy.max_iter must be a positive integer, got {self.max_iter!r}")


DEFAULT_ACCURACY = Accuracy()

_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)

# B_2k / (2k (2k-1)) for k = 1..8
_STIRLING_COEFFS = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
)


def _check_finite(name, value):
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}")


# ────────────────────────────────────────────────────────────
# Gamma family
# ────────────────────────────────────────────────────────────

def log_gamma(x):
    """
    ln Γ(x) for x > 0.

    Arguments below LOG_GAMMA_SHIFT are recurred upward with
    ln Γ(x) = ln Γ(x + k) − Σ ln(x + j), then the Stirling series is
    summed with eight Bernoulli corrections.
    """
    _check_finite("x", x)
    if x <= 0:
        raise DomainError(f"log_gamma requires x > 0, got {x!r}")

    shift_logs = []
    while x < cfg.LOG_GAMMA_SHIFT:
        shift_logs.append(math.log(x))
        x += 1.0

    inv = 1.0 / x
    inv2 = inv * inv
    correction = 0.0
    power = inv
    for coeff in _STIRLING_COEFFS:
        correction += coeff * power
        power *= inv2

    value = (x - 0.5) * math.log(x) - x + _HALF_LOG_2PI + correction
    if shift_logs:
        value -= math.fsum(shift_logs)
    return value


def log_beta(a, b):
    """ln B(a, b) = ln Γ(a) + ln Γ(b) − ln Γ(a + b)."""
    if a <= 0 or b <= 0:
        raise DomainError(f"log_beta requires a, b > 0, got a={a!r}, b={b!r}")
    return log_gamma(a) + log_gamma(b) - log_gamma(a + b)


def _gamma_prefactor(s, x):
    """x^s e^{-x} / Γ(s), in log space."""
    return s * math.log(x) - x - log_gamma(s)


def _gamma_series(s, x, accuracy):
    """Series for P(s, x); converges quickly for x < s + 1."""
    ap = s
    term = 1.0 / s
    total = term
    for _ in range(accuracy.max_iter):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * accuracy.abs_tol:
            return total * math.exp(_gamma_prefactor(s, x))
    raise ConvergenceError(
        f"incomplete gamma series did not converge: s={s!r}, x={x!r}, "
        f"max_iter={accuracy.max_iter}"
    )


def _gamma_continued_fraction(s, x, accuracy):
    """Modified Lentz evaluation of Q(s, x); converges for x >= s + 1."""
    fpmin = cfg.SPECFUN_FPMIN
    b = x + 1.0 - s
    c = 1.0 / fpmin
    d = 1.0 / b
    h = d
    for i in range(1, accuracy.max_iter + 1):
        an = -i * (i - s)
        b += 2.0
        d = an * d + b
        if abs(d) < fpmin:
            d = fpmin
        c = b + an / c
        if abs(c) < fpmin:
            c = fpmin
        d = 1.0 / d
        step = d * c
        h *= step
        if abs(step - 1.0) < accuracy.abs_tol:
            return math.exp(_gamma_prefactor(s, x)) * h
    raise ConvergenceError(
        f"incomplete gamma continued fraction did not converge: s={s!r}, x={x!r}, "
        f"max_iter={accuracy.max_iter}"
    )


def _check_gamma_args(s, x):
    _check_finite("s", s)
    _check_finite("x", x)
    if s <= 0:
        raise DomainError(f"incomplete gamma requires s > 0, got {s!r}")
    if x < 0:
        raise DomainError(f"incomplete gamma requires x >= 0, got {x!r}")


def reg_inc_gamma_p(s, x, accuracy=DEFAULT_ACCURACY):
    """
    Regularized lower incomplete gamma P(s, x) = γ(s, x) / Γ(s).

    Series branch for x < s + 1, continued fraction (as 1 − Q) otherwise.
    """
    _check_gamma_args(s, x)
    if x == 0:
        return 0.0
    if x < s + 1.0:
        value = _gamma_series(s, x, accuracy)
    else:
        value = 1.0 - _gamma_continued_fraction(s, x, accuracy)
    return min(1.0, max(0.0, value))


def reg_inc_gamma_q(s, x, accuracy=DEFAULT_ACCURACY):
    """Regularized upper incomplete gamma Q(s, x) = 1 − P(s, x)."""
    _check_gamma_args(s, x)
    if x == 0:
        return 1.0
    if x < s + 1.0:
        value = 1.0 - _gamma_series(s, x, accuracy)
    else:
        value = _gamma_continued_fraction(s, x, accuracy)
    return min(1.0, max(0.0, value))


# ────────────────────────────────────────────────────────────
# Incomplete beta
# ────────────────────────────────────────────────────────────

def _beta_continued_fraction(a, b, x, accuracy):
    fpmin = cfg.SPECFUN_FPMIN
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < fpmin:
        d = fpmin
    d = 1.0 / d
    h = d
    for m in range(1, accuracy.max_iter + 1):
        m2 = 2 * m
        # even step
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < fpmin:
            d = fpmin
        c = 1.0 + aa / c
        if abs(c) < fpmin:
            c = fpmin
        d = 1.0 / d
        h *= d * c
        # odd step
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < fpmin:
            d = fpmin
        c = 1.0 + aa / c
        if abs(c) < fpmin:
            c = fpmin
        d = 1.0 / d
        step = d * c
        h *= step
        if abs(step - 1.0) < accuracy.abs_tol:
            return h
    raise ConvergenceError(
        f"incomplete beta continued fraction did not converge: a={a!r}, b={b!r}, "
        f"x={x!r}, max_iter={accuracy.max_iter}"
    )


def reg_inc_beta(a, b, x, accuracy=DEFAULT_ACCURACY):
    """
    Regularized incomplete beta I_x(a, b).

    The continued fraction is evaluated directly below the switch point
    x = (a + 1) / (a + b + 2) and through I_x(a, b) = 1 − I_{1−x}(b, a)
    above it, where the fraction converges fastest.
    """
    _check_finite("a", a)
    _check_finite("b", b)
    _check_finite("x", x)
    if a <= 0 or b <= 0:
        raise DomainError(f"reg_inc_beta requires a, b > 0, got a={a!r}, b={b!r}")
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"reg_inc_beta requires 0 <= x <= 1, got {x!r}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0

    log_front = a * math.log(x) + b * math.log1p(-x) - log_beta(a, b)
    if x < (a + 1.0) / (a + b + 2.0):
        value = math.exp(log_front) * _beta_continued_fraction(a, b, x, accuracy) / a
    else:
        value = 1.0 - math.exp(log_front) * _beta_continued_fraction(b, a, 1.0 - x, accuracy) / b
    return min(1.0, max(0.0, value))


# ────────────────────────────────────────────────────────────
# Modified Bessel function of the first kind
# ────────────────────────────────────────────────────────────

def _log_bessel_series(order, z, accuracy):
    """
    Ascending series Σ (z/2)^{2k+ν} / (k! Γ(k+ν+1)), summed in log space.

    Terms rise to a peak near k ≈ z/2 and are dropped once they fall
    BESSEL_LOG_CUTOFF nats below it, so large z never overflows.
    """
    log_half = math.log(0.5 * z)
    log_ratio = 2.0 * log_half
    log_terms = [0.0]
    log_term = 0.0
    log_peak = 0.0
    k = 0
    while True:
        k += 1
        if k > accuracy.max_iter:
            raise ConvergenceError(
                f"Bessel series did not converge: order={order!r}, z={z!r}, "
                f"max_iter={accuracy.max_iter}"
            )
        log_term += log_ratio - math.log(k) - math.log(k + order)
        log_terms.append(log_term)
        if log_term > log_peak:
            log_peak = log_term
        elif log_term < log_peak - cfg.BESSEL_LOG_CUTOFF:
            break

    total = math.fsum(math.exp(t - log_peak) for t in log_terms)
    return order * log_half - log_gamma(order + 1.0) + log_peak + math.log(total)


def _log_bessel_asymptotic(order, z, accuracy):
    """Large-z expansion e^z / √(2πz) · Σ (−1)^k a_k(ν) / z^k."""
    mu = 4.0 * order * order
    term = 1.0
    total = 1.0
    for k in range(1, accuracy.max_iter + 1):
        odd = 2 * k - 1
        nxt = -term * (mu - odd * odd) / (8.0 * k * z)
        if abs(nxt) >= abs(term):
            # Asymptotic series: stop at the smallest term.
            break
        term = nxt
        total += term
        if abs(term) < accuracy.abs_tol * abs(total):
            break
    else:
        raise ConvergenceError(
            f"Bessel asymptotic series did not settle: order={order!r}, z={z!r}"
        )
    return z - 0.5 * math.log(2.0 * math.pi * z) + math.log(total)


def _log_cosh(z):
    return z + math.log1p(math.exp(-2.0 * z)) - math.log(2.0)


def log_bessel_i(order, z, accuracy=DEFAULT_ACCURACY):
    """
    ln I_ν(z) for ν >= −1/2 and z >= 0.

    ν = −1/2 uses the closed form I_{−1/2}(z) = √(2/(πz)) cosh z, which
    appears whenever a chi-square with one degree of freedom enters the
    Bessel-integral representation.
    """
    _check_finite("order", order)
    _check_finite("z", z)
    if order < -0.5:
        raise DomainError(f"log_bessel_i requires order >= -0.5, got {order!r}")
    if z < 0:
        raise DomainError(f"log_bessel_i requires z >= 0, got {z!r}")

    if z == 0.0:
        if order == 0.0:
            return 0.0
        return -math.inf if order > 0 else math.inf

    if order == -0.5:
        return 0.5 * math.log(2.0 / (math.pi * z)) + _log_cosh(z)

    if z <= cfg.BESSEL_SERIES_BASE + order * order:
        return _log_bessel_series(order, z, accuracy)
    return _log_bessel_asymptotic(order, z, accuracy)
