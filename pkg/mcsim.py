"""
mcsim.py — Monte Carlo engines and coverage experiments.

Three simulations back the analytic evaluators:

  1. mc_ncf_cdf          simulates (U/u)/(V/v) straight from its normal
                         representation: an oracle for dist.ncf_cdf
  2. rejection_rate      applies the two-sided rule
                         |Ȳ − μ₀| > S/√(n−1)·√c  (S with divisor n)
                         to simulated samples: an oracle for t_test_power
  3. coverage_experiment builds σ and power intervals per replicate and
                         records both coverage indicators

Reproducibility
---------------
Replicates are cut into fixed-size blocks.  Block k draws from its own
PCG64 generator seeded by ``np.random.SeedSequence(seed, spawn_key=(k,))``,
so a block's stream depends only on (seed, k).  Blocks may run in worker
processes; results are reduced in block order, so the output is
bit-identical for any worker count.

Normal variates use the Marsaglia polar method on the generator's uniform
output: draw (u1, u2) uniform on (−1, 1)², keep pairs with
0 < s = u1² + u2² < 1, return u1·√(−2 ln s / s) and u2·√(−2 ln s / s).
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from functools import cached_property

import numpy as np

import config as cfg
from interval import (
    minlen_positions,
    power_ci,
    sigma_ci_at_positions,
    sigma_ci_equal_tail,
)
from power import TwoSidedTSpec, power_at_sigma
from specfun import ConvergenceError, DomainError

log = logging.getLogger(__name__)


class Rule(str, Enum):
    EQUAL_TAIL = "equal_tail"    # A, B at γ/2 and 1 − γ/2
    MIN_LENGTH = "min_length"    # A, B minimising the power-interval length


# ────────────────────────────────────────────────────────────
# Configuration and reports
# ────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class SimConfig:
    seed: int
    replicates: int
    n: int
    mu: float
    mu0: float
    sigma: float
    alpha: float = cfg.DEFAULT_ALPHA
    gamma: float = cfg.DEFAULT_GAMMA
    rule: Rule = Rule.EQUAL_TAIL

    def __post_init__(self):
        if int(self.seed) != self.seed or not 0 <= self.seed < 2 ** 64:
            raise DomainError(f"SimConfig.seed must be a 64-bit unsigned integer, got {self.seed!r}")
        if int(self.replicates) != self.replicates or self.replicates < 1:
            raise DomainError(f"SimConfig.replicates must be >= 1, got {self.replicates!r}")
        if int(self.n) != self.n or self.n < 2:
            raise DomainError(f"SimConfig.n must be an integer >= 2, got {self.n!r}")
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            raise DomainError(f"SimConfig.sigma must be > 0, got {self.sigma!r}")
        if not 0.0 < self.alpha < 1.0:
            raise DomainError(f"SimConfig.alpha must lie in (0, 1), got {self.alpha!r}")
        if not 0.0 < self.gamma < 1.0:
            raise DomainError(f"SimConfig.gamma must lie in (0, 1), got {self.gamma!r}")
        object.__setattr__(self, "rule", Rule(self.rule))

    @cached_property
    def spec(self):
        return TwoSidedTSpec(n=self.n, mu0=self.mu0, mu=self.mu, alpha=self.alpha)


@dataclass(frozen=True)
class CoverageReport:
    """Empirical coverage hits / replicates with its binomial standard error."""

    hits: int
    replicates: int
    coverage: float
    std_err: float
    nominal: float
    rule: Rule

    @classmethod
    def from_counts(cls, hits, replicates, nominal, rule):
        coverage = hits / replicates if replicates else 0.0
        return cls(
            hits=hits,
            replicates=replicates,
            coverage=coverage,
            std_err=binomial_std_err(coverage, replicates) if replicates else 0.0,
            nominal=nominal,
            rule=Rule(rule),
        )


@dataclass(frozen=True)
class CoverageResult:
    """
    Paired reports for the σ interval and the power interval.

    Replicates where the min-length search failed are excluded from both
    reports and counted in optimizer_failures.  indicator_mismatches counts
    replicates where the σ and power indicators disagree; it is 0 whenever
    the power map is strictly monotone (μ ≠ μ₀).
    """

    sigma: CoverageReport
    power: CoverageReport
    optimizer_failures: int
    indicator_mismatches: int

    @property
    def failure_fraction(self):
        total = self.sigma.replicates + self.optimizer_failures
        return self.optimizer_failures / total if total else 0.0


def binomial_std_err(p, n):
    return math.sqrt(p * (1.0 - p) / n)


# ────────────────────────────────────────────────────────────
# Random streams
# ────────────────────────────────────────────────────────────

class NormalStream:
    """
    Polar-method normal variates over a numpy Generator.

    Usage:
        stream = NormalStream.for_block(seed, block_index)
        z = stream.sample()            # one N(0, 1) variate
        zs = stream.block(1000)        # ndarray of N(0, 1) variates
    """

    def __init__(self, generator):
        self._gen = generator
        self._spare = None

    @classmethod
    def for_block(cls, seed, block_index):
        seq = np.random.SeedSequence(int(seed), spawn_key=(int(block_index),))
        return cls(np.random.Generator(np.random.PCG64(seq)))

    def sample(self):
        if self._spare is not None:
            z, self._spare = self._spare, None
            return z
        while True:
            u1 = 2.0 * self._gen.random() - 1.0
            u2 = 2.0 * self._gen.random() - 1.0
            s = u1 * u1 + u2 * u2
            if 0.0 < s < 1.0:
                break
        f = math.sqrt(-2.0 * math.log(s) / s)
        self._spare = u2 * f
        return u1 * f

    def block(self, size):
        out = np.empty(size, dtype=np.float64)
        filled = 0
        while filled < size:
            need = size - filled
            # acceptance rate is π/4; oversample so one round usually suffices
            pairs = int(need * 0.64) + 16
            u = 2.0 * self._gen.random((pairs, 2)) - 1.0
            s = np.sum(u * u, axis=1)
            ok = (s > 0.0) & (s < 1.0)
            u, s = u[ok], s[ok]
            z = (u * np.sqrt(-2.0 * np.log(s) / s)[:, None]).ravel()
            take = min(z.size, need)
            out[filled:filled + take] = z[:take]
            filled += take
        return out


def normal_sample(stream, mu, sigma):
    return mu + sigma * stream.sample()


def normal_block(stream, mu, sigma, size):
    return mu + sigma * stream.block(size)


# ────────────────────────────────────────────────────────────
# Block scheduling
# ────────────────────────────────────────────────────────────

def _blocks(replicates, block_size):
    count = -(-replicates // block_size)
    return [
        (index, min(block_size, replicates - index * block_size))
        for index in range(count)
    ]


def _run_blocks(fn, tasks, workers):
    """Run fn over tasks, returning results in task order."""
    if workers <= 1 or len(tasks) <= 1:
        return [fn(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))


# ────────────────────────────────────────────────────────────
# Noncentral F oracle
# ────────────────────────────────────────────────────────────

def _ncf_block(task):
    u, v, delta, x, seed, index, count = task
    stream = NormalStream.for_block(seed, index)
    z = stream.block(count * (u + v)).reshape(count, u + v)
    z[:, 0] += delta
    big_u = np.sum(z[:, :u] ** 2, axis=1)
    big_v = np.sum(z[:, u:] ** 2, axis=1)
    return int(np.count_nonzero(big_u / u <= x * big_v / v))


def mc_ncf_cdf(u, v, delta, x, replicates, seed, workers=1):
    """
    Fraction of simulated ((Z₁+δ)² + Z₂² + … + Z_u²)/u <= x·V/v, V a sum of
    v squared normals.  Degrees of freedom must be integers.
    """
    for name, df in (("u", u), ("v", v)):
        if int(df) != df or df < 1:
            raise DomainError(f"mc_ncf_cdf simulates integer degrees of freedom only; {name}={df!r}")
    if replicates < cfg.ORACLE_MIN_REPLICATES:
        raise DomainError(
            f"mc_ncf_cdf requires replicates >= {cfg.ORACLE_MIN_REPLICATES}, got {replicates!r}"
        )
    if delta < 0 or x < 0:
        raise DomainError(f"delta and x must be >= 0, got delta={delta!r}, x={x!r}")
    u, v = int(u), int(v)
    tasks = [
        (u, v, float(delta), float(x), seed, index, count)
        for index, count in _blocks(replicates, cfg.ORACLE_BLOCK_SIZE)
    ]
    hits = sum(_run_blocks(_ncf_block, tasks, workers))
    return hits / replicates


# ────────────────────────────────────────────────────────────
# Rejection rule
# ────────────────────────────────────────────────────────────

def _rejection_block(task):
    sim, c, index, count = task
    stream = NormalStream.for_block(sim.seed, index)
    y = normal_block(stream, sim.mu, sim.sigma, count * sim.n).reshape(count, sim.n)
    ybar = y.mean(axis=1)
    s = np.sqrt(np.mean((y - ybar[:, None]) ** 2, axis=1))
    reject = np.abs(ybar - sim.mu0) > s / math.sqrt(sim.n - 1) * math.sqrt(c)
    return int(np.count_nonzero(reject))


def rejection_rate(sim, workers=1):
    """Rejection frequency of the two-sided rule over sim.replicates samples."""
    c = sim.spec.design.critical_value
    tasks = [(sim, c, index, count) for index, count in _blocks(sim.replicates, cfg.SIM_BLOCK_SIZE)]
    rejections = sum(_run_blocks(_rejection_block, tasks, workers))
    return rejections / sim.replicates


# ────────────────────────────────────────────────────────────
# Coverage
# ────────────────────────────────────────────────────────────

def _coverage_block(task):
    sim, positions, omega_true, index, count = task
    spec = sim.spec
    design = spec.design
    nc_map = spec.noncentrality_map
    v = design.v

    stream = NormalStream.for_block(sim.seed, index)
    y = normal_block(stream, sim.mu, sim.sigma, count * sim.n).reshape(count, sim.n)
    q_values = np.sum((y - y.mean(axis=1)[:, None]) ** 2, axis=1)

    sigma_hits = power_hits = valid = failures = mismatches = 0
    for offset, q in enumerate(q_values.tolist()):
        if sim.rule is Rule.EQUAL_TAIL:
            sigma_iv = sigma_ci_at_positions(q, v, sim.gamma, *positions)
            power_iv = power_ci(sigma_iv, design, nc_map)
        else:
            try:
                result = minlen_positions(q, v, sim.gamma, design, nc_map)
            except ConvergenceError as exc:
                failures += 1
                log.warning("block %d replicate %d: min-length search failed: %s", index, offset, exc)
                continue
            sigma_iv, power_iv = result.sigma_interval, result.power_interval

        sigma_hit = sigma_iv.covers(sim.sigma)
        power_hit = power_iv.covers(omega_true)
        valid += 1
        sigma_hits += sigma_hit
        power_hits += power_hit
        mismatches += sigma_hit != power_hit

    log.debug("block %d: %d/%d sigma hits", index, sigma_hits, valid)
    return sigma_hits, power_hits, valid, failures, mismatches


def coverage_experiment(sim, workers=1):
    """
    Coverage of the σ interval and of its power image at the true (σ, ω).

    Each replicate draws a sample of size n, forms q = Σ(Yᵢ − Ȳ)², builds
    the σ interval by sim.rule and maps it through power_ci.  The
    min-length rule uses the true alternative's λ = √n|μ − μ₀|.
    """
    spec = sim.spec
    if sim.rule is Rule.MIN_LENGTH and sim.mu == sim.mu0:
        raise DomainError("the min_length rule needs mu != mu0")

    design = spec.design
    omega_true = power_at_sigma(design, spec.noncentrality_map, sim.sigma)
    positions = None
    if sim.rule is Rule.EQUAL_TAIL:
        # positions do not depend on the data; the q used here is a placeholder
        ref = sigma_ci_equal_tail(1.0, design.v, sim.gamma)
        positions = (ref.A, ref.B)

    tasks = [
        (sim, positions, omega_true, index, count)
        for index, count in _blocks(sim.replicates, cfg.SIM_BLOCK_SIZE)
    ]
    log.info(
        "coverage: rule=%s replicates=%d blocks=%d workers=%d",
        sim.rule.value, sim.replicates, len(tasks), workers,
    )

    sigma_hits = power_hits = valid = failures = mismatches = 0
    for block in _run_blocks(_coverage_block, tasks, workers):
        sigma_hits += block[0]
        power_hits += block[1]
        valid += block[2]
        failures += block[3]
        mismatches += block[4]

    nominal = 1.0 - sim.gamma
    return CoverageResult(
        sigma=CoverageReport.from_counts(sigma_hits, valid, nominal, sim.rule),
        power=CoverageReport.from_counts(power_hits, valid, nominal, sim.rule),
        optimizer_failures=failures,
        indicator_mismatches=mismatches,
    )
