"""
power.py — Power of the α-level F-test at fixed alternatives.

The F-statistic of the usual normal-theory test of a mean vector has the
law of (U/u)/(V/v) with U noncentral chi-square(u, δ).  For a fixed
alternative the noncentrality is δ(σ) = λ/σ, where the effect constant λ
absorbs everything but the scale.  Power is

    ω = 1 − G_{u,v,δ(σ)}(c),   c = (1 − α) quantile of G_{u,v,0}

and is strictly decreasing in σ whenever λ > 0.

Two λ builders are provided: the interaction test of a balanced two-way
ANOVA, and the two-sided one-sample t-test (u = 1, v = n − 1,
λ = √n |μ − μ₀|).  The one-sided t-test is not covered.

S convention: the scale estimate S uses divisor n (maximum likelihood),
S² = Σ(Yᵢ − Ȳ)² / n, and the rejection rule is |Ȳ − μ₀| > S/√(n−1) · √c.
"""

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

import config as cfg
from dist import NoncentralF, f_quantile_central, ncf_cdf
from specfun import DomainError


# ────────────────────────────────────────────────────────────
# Designs and noncentrality maps
# ────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class TestDesign:
    """
    Degrees of freedom and level of an F-test.

    Usage:
        design = TestDesign(u=1, v=9, alpha=0.05)
        design.critical_value      # ≈ 5.1174
    """

    __test__ = False  # not a pytest class

    u: float
    v: float
    alpha: float

    def __post_init__(self):
        if not (math.isfinite(self.u) and self.u > 0):
            raise DomainError(f"TestDesign.u must be > 0, got {self.u!r}")
        if not (math.isfinite(self.v) and self.v > 0):
            raise DomainError(f"TestDesign.v must be > 0, got {self.v!r}")
        if not 0.0 < self.alpha < 1.0:
            raise DomainError(f"TestDesign.alpha must lie in (0, 1), got {self.alpha!r}")

    @cached_property
    def critical_value(self):
        """c, the 1 − α quantile of the central F(u, v)."""
        return f_quantile_central(self.u, self.v, 1.0 - self.alpha)

    @classmethod
    def from_anova(cls, spec, alpha):
        _, u, v = anova_noncentrality(spec)
        return cls(u=u, v=v, alpha=alpha)


@dataclass(frozen=True)
class NoncentralityMap:
    """σ ↦ δ(σ) = lambda_effect / σ."""

    lambda_effect: float

    def __post_init__(self):
        if not (math.isfinite(self.lambda_effect) and self.lambda_effect >= 0):
            raise DomainError(
                f"NoncentralityMap.lambda_effect must be >= 0, got {self.lambda_effect!r}"
            )

    def delta(self, sigma):
        if not (math.isfinite(sigma) and sigma > 0):
            raise DomainError(f"sigma must be > 0, got {sigma!r}")
        return self.lambda_effect / sigma


@dataclass(frozen=True)
class AnovaInteractionSpec:
    """
    Balanced two-way layout: I × J cells with K observations each, and the
    interaction effects (αβ)_ij as an I × J matrix.
    """

    I: int
    J: int
    K: int
    interaction_effects: tuple

    def __post_init__(self):
        for name in ("I", "J", "K"):
            value = getattr(self, name)
            if int(value) != value or value < 2:
                raise DomainError(f"AnovaInteractionSpec.{name} must be an integer >= 2, got {value!r}")
        effects = np.asarray(self.interaction_effects, dtype=float)
        if effects.shape != (self.I, self.J):
            raise DomainError(
                f"interaction_effects must be {self.I}x{self.J}, got shape {effects.shape}"
            )
        if not np.all(np.isfinite(effects)):
            raise DomainError("interaction_effects must be finite")
        # freeze as nested tuples so the spec stays hashable
        object.__setattr__(self, "interaction_effects", tuple(map(tuple, effects.tolist())))

    @property
    def matrix(self):
        return np.asarray(self.interaction_effects, dtype=float)


@dataclass(frozen=True)
class TwoSidedTSpec:
    """One-sample two-sided t-test of H0: μ = mu0 at level alpha, alternative mean mu."""

    n: int
    mu0: float
    mu: float
    alpha: float = cfg.DEFAULT_ALPHA

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise DomainError(f"TwoSidedTSpec.n must be an integer >= 2, got {self.n!r}")
        if not (math.isfinite(self.mu0) and math.isfinite(self.mu)):
            raise DomainError("TwoSidedTSpec.mu and mu0 must be finite")

    @cached_property
    def design(self):
        return TestDesign(u=1, v=self.n - 1, alpha=self.alpha)

    @cached_property
    def noncentrality_map(self):
        return NoncentralityMap(math.sqrt(self.n) * abs(self.mu - self.mu0))


# ────────────────────────────────────────────────────────────
# Power
# ────────────────────────────────────────────────────────────

def power_at_delta(design, delta):
    """
    ω = 1 − G_{u,v,δ}(c).

    At δ = 0 the test has size exactly α by the choice of c, and α is
    returned without evaluating the distribution. For δ > 0 the result is
    held at or above α, since c is only solved to QUANTILE_PROB_TOL.
    """
    if not (math.isfinite(delta) and delta >= 0):
        raise DomainError(f"delta must be >= 0, got {delta!r}")
    if delta == 0.0:
        return design.alpha
    return max(design.alpha, 1.0 - ncf_cdf(NoncentralF(design.u, design.v, delta), design.critical_value))


def power_at_sigma(design, noncentrality_map, sigma):
    return power_at_delta(design, noncentrality_map.delta(sigma))


def power_curve_sigma(design, noncentrality_map, sigmas):
    """Power at each σ in `sigmas`."""
    return [power_at_sigma(design, noncentrality_map, s) for s in sigmas]


def anova_noncentrality(spec, tol=1e-10):
    """
    Interaction-test λ and degrees of freedom:

        λ = √(K Σ (αβ)_ij²),  u = (I − 1)(J − 1),  v = (K − 1) I J

    Raises DomainError when the interaction side conditions (zero row and
    column sums) are violated by more than `tol`.
    """
    effects = spec.matrix
    row_sums = effects.sum(axis=1)
    col_sums = effects.sum(axis=0)
    worst = max(np.max(np.abs(row_sums)), np.max(np.abs(col_sums)))
    if worst > tol:
        raise DomainError(
            f"interaction effects violate the zero row/column sum conditions "
            f"(largest |sum| = {worst:.3g})"
        )
    lambda_effect = math.sqrt(spec.K * float(np.sum(effects * effects)))
    u = (spec.I - 1) * (spec.J - 1)
    v = (spec.K - 1) * spec.I * spec.J
    return NoncentralityMap(lambda_effect), u, v


def t_test_power(spec, sigma):
    """Two-sided t-test power 1 − G_{1,n−1,δ(σ)}(c), δ(σ) = √n|μ − μ₀|/σ."""
    return power_at_sigma(spec.design, spec.noncentrality_map, sigma)


def power_mle(spec, s):
    """MLE of the t-test power: the power function evaluated at σ = S (divisor n)."""
    return t_test_power(spec, s)
