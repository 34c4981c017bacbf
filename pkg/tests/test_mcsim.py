"""
Monte Carlo engines: stream reproducibility, normal variates, the
noncentral F oracle and coverage of the interval constructions.
"""

import math

import numpy as np
import pytest

from dist import NoncentralF, f_cdf_central, ncf_cdf
from mcsim import (
    CoverageReport,
    NormalStream,
    Rule,
    SimConfig,
    binomial_std_err,
    coverage_experiment,
    mc_ncf_cdf,
    normal_block,
    normal_sample,
)
from specfun import DomainError

SEED = 20070101


def sim(**overrides):
    params = dict(seed=SEED, replicates=2000, n=10, mu=1.0, mu0=0.0, sigma=1.0, alpha=0.05, gamma=0.05)
    params.update(overrides)
    return SimConfig(**params)


class TestSimConfig:
    @pytest.mark.parametrize(
        "overrides",
        [
            {"replicates": 0},
            {"n": 1},
            {"sigma": 0.0},
            {"alpha": 1.0},
            {"gamma": 0.0},
            {"seed": -1},
            {"seed": 2 ** 64},
        ],
    )
    def test_rejects_invalid(self, overrides):
        with pytest.raises(DomainError):
            sim(**overrides)

    def test_rule_coerced(self):
        assert sim(rule="min_length").rule is Rule.MIN_LENGTH
        with pytest.raises(ValueError):
            sim(rule="shortest")

    def test_spec(self):
        spec = sim(n=7, mu=2.0, mu0=0.5).spec
        assert (spec.n, spec.mu, spec.mu0, spec.alpha) == (7, 2.0, 0.5, 0.05)


class TestNormalStream:
    def test_same_seed_same_stream(self):
        a = NormalStream.for_block(SEED, 3)
        b = NormalStream.for_block(SEED, 3)
        assert [a.sample() for _ in range(25)] == [b.sample() for _ in range(25)]
        assert np.array_equal(
            NormalStream.for_block(SEED, 3).block(5000), NormalStream.for_block(SEED, 3).block(5000)
        )

    def test_blocks_are_distinct(self):
        a = NormalStream.for_block(SEED, 0).block(100)
        b = NormalStream.for_block(SEED, 1).block(100)
        c = NormalStream.for_block(SEED + 1, 0).block(100)
        assert not np.array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_block_size(self):
        stream = NormalStream.for_block(SEED, 0)
        for size in (0, 1, 7, 1000):
            assert stream.block(size).shape == (size,)

    def test_moments_of_block(self):
        draws = 10 ** 6
        y = normal_block(NormalStream.for_block(SEED, 0), 2.0, 3.0, draws)
        assert abs(y.mean() - 2.0) <= 4.0 * 3.0 / math.sqrt(draws), f"mean {y.mean()!r}"
        assert abs(y.var() / 9.0 - 1.0) <= 0.05, f"variance {y.var()!r}"

    def test_moments_of_scalar_draws(self):
        draws = 10 ** 5
        stream = NormalStream.for_block(SEED, 9)
        y = np.array([normal_sample(stream, -1.0, 0.5) for _ in range(draws)])
        assert abs(y.mean() + 1.0) <= 4.0 * 0.5 / math.sqrt(draws), f"mean {y.mean()!r}"
        assert abs(y.var() / 0.25 - 1.0) <= 0.05, f"variance {y.var()!r}"


class TestNoncentralFOracle:
    def test_central_case(self):
        replicates = 200_000
        x = 2.5
        mc = mc_ncf_cdf(2, 9, 0.0, x, replicates, SEED)
        exact = f_cdf_central(2, 9, x)
        assert abs(mc - exact) <= 3.0 * binomial_std_err(exact, replicates), f"{mc!r} vs {exact!r}"

    def test_decreasing_in_delta(self):
        values = [mc_ncf_cdf(1, 9, d, 5.1174, 100_000, SEED) for d in (0.0, 1.0, 2.0, 3.0)]
        assert all(b < a for a, b in zip(values, values[1:])), f"{values}"

    def test_matches_series(self, c_1_9):
        replicates = 500_000
        mc = mc_ncf_cdf(1, 9, 2.0, c_1_9, replicates, SEED)
        exact = ncf_cdf(NoncentralF(1, 9, 2.0), c_1_9)
        assert abs(mc - exact) <= 3.0 * binomial_std_err(exact, replicates), f"{mc!r} vs {exact!r}"

    def test_rejects_fractional_df_and_few_replicates(self):
        with pytest.raises(DomainError):
            mc_ncf_cdf(1.5, 9, 1.0, 1.0, 10_000, SEED)
        with pytest.raises(DomainError):
            mc_ncf_cdf(1, 9, 1.0, 1.0, 9_999, SEED)


class TestCoverageReport:
    def test_std_err(self):
        assert abs(binomial_std_err(0.95, 10_000) - math.sqrt(0.95 * 0.05 / 10_000)) <= 1e-15

    def test_from_counts(self):
        report = CoverageReport.from_counts(9500, 10_000, 0.95, "equal_tail")
        assert report.coverage == 0.95
        assert report.rule is Rule.EQUAL_TAIL
        assert abs(report.std_err - binomial_std_err(0.95, 10_000)) <= 1e-15


class TestCoverage:
    @pytest.mark.slow
    def test_equal_tail_nominal(self):
        replicates = 10_000
        result = coverage_experiment(sim(replicates=replicates))
        bound = 3.0 * math.sqrt(0.95 * 0.05 / replicates)
        assert abs(result.power.coverage - 0.95) <= bound, f"power coverage {result.power.coverage!r}"
        assert result.sigma.hits == result.power.hits
        assert result.indicator_mismatches == 0
        assert result.optimizer_failures == 0
        assert result.sigma.replicates == replicates

    @pytest.mark.slow
    @pytest.mark.parametrize("gamma", [0.01, 0.05, 0.10])
    @pytest.mark.parametrize("n", [5, 10, 30])
    def test_equal_tail_grid(self, gamma, n):
        replicates = 10_000
        result = coverage_experiment(sim(replicates=replicates, n=n, gamma=gamma, mu=0.8))
        nominal = 1.0 - gamma
        bound = 3.0 * math.sqrt(nominal * gamma / replicates)
        for name, report in (("sigma", result.sigma), ("power", result.power)):
            assert abs(report.coverage - nominal) <= bound, (
                f"gamma={gamma}, n={n}: {name} coverage {report.coverage!r}"
            )
        assert result.indicator_mismatches == 0

    def test_indicators_agree_per_replicate(self):
        result = coverage_experiment(sim(replicates=500, n=6, mu=0.8, sigma=1.3))
        assert result.indicator_mismatches == 0
        assert result.sigma.hits == result.power.hits

    def test_deterministic(self):
        config = sim(replicates=1500, mu=0.0)
        assert coverage_experiment(config) == coverage_experiment(config)

    def test_independent_of_worker_count(self):
        config = sim(replicates=2500, mu=0.0)
        assert coverage_experiment(config, workers=1) == coverage_experiment(config, workers=2)

    @pytest.mark.slow
    def test_min_length_reports_without_nominal_claim(self):
        result = coverage_experiment(sim(replicates=20, rule=Rule.MIN_LENGTH))
        assert result.sigma.rule is Rule.MIN_LENGTH
        assert result.sigma.replicates + result.optimizer_failures == 20
        assert result.indicator_mismatches == 0

    def test_min_length_needs_an_alternative(self):
        with pytest.raises(DomainError):
            coverage_experiment(sim(replicates=10, mu=0.0, rule=Rule.MIN_LENGTH))
