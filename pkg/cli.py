"""
cli.py — Command-line surface.

Subcommands:

  power    power of an F-test at δ, or at σ with effect constant λ
  ci       σ interval and power interval for the two-sided t-test, from a
           data file or a precomputed residual sum of squares
  figure1  MLE power and equal-tail CI curves against (μ − μ₀)/S
  coverage Monte Carlo coverage of the σ and power intervals
  minlen   minimum-length quantile positions for given (q, v, γ, design, λ)

CSV output: a header line, comma separator, "\\n" line terminator, and
every number printed with CSV_DIGITS significant digits.  Every command
accepts --out to write to a file instead of stdout.

Exit codes: 0 success, 1 numeric or runtime failure, 2 usage error.
Diagnostics go to stderr as "[module] message".
"""

import argparse
import contextlib
import csv
import logging
import math
import sys

import numpy as np

import config as cfg
from interval import (
    DegenerateSampleError,
    SampleSummary,
    minlen_positions,
    power_ci,
    sigma_ci_equal_tail,
    summarize_sample,
    t_test_power_ci,
)
from mcsim import Rule, SimConfig, coverage_experiment
from power import NoncentralityMap, TestDesign, TwoSidedTSpec, power_at_delta, power_at_sigma, power_mle
from specfun import ConvergenceError, DomainError

log = logging.getLogger(__name__)


class UsageError(Exception):
    """Bad flags or unusable input files (exit code 2)."""


def fmt(value):
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(value)
    return f"{value:.{cfg.CSV_DIGITS}g}"


@contextlib.contextmanager
def _output(path):
    if path is None:
        yield sys.stdout
        return
    try:
        handle = open(path, "w", newline="")
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from exc
    with handle:
        yield handle


def _write_csv(path, header, rows):
    with _output(path) as out:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) if not isinstance(v, str) else v for v in row])


def read_observations(path):
    """One decimal number per line; blank lines are ignored."""
    try:
        with open(path) as handle:
            lines = handle.read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    values = []
    for lineno, line in enumerate(lines, start=1):
        text = line.strip()
        if not text:
            continue
        try:
            value = float(text)
        except ValueError:
            raise UsageError(f"{path}:{lineno}: not a number: {text!r}") from None
        if not math.isfinite(value):
            raise UsageError(f"{path}:{lineno}: not a finite number: {text!r}")
        values.append(value)
    if not values:
        raise UsageError(f"{path}: no observations")
    return values


# ────────────────────────────────────────────────────────────
# Commands
# ────────────────────────────────────────────────────────────

def cmd_power(args):
    with_sigma = args.sigma is not None or args.lambda_effect is not None
    if (args.delta is None) == (not with_sigma) or (
        with_sigma and (args.sigma is None or args.lambda_effect is None)
    ):
        raise UsageError("give exactly one of --delta or --sigma with --lambda")
    design = TestDesign(u=args.u, v=args.v, alpha=args.alpha)
    if args.delta is not None:
        value = power_at_delta(design, args.delta)
    else:
        value = power_at_sigma(design, NoncentralityMap(args.lambda_effect), args.sigma)
    with _output(args.out) as out:
        out.write(fmt(value) + "\n")
    return 0


def cmd_ci(args):
    if (args.data is None) == (args.q is None):
        raise UsageError("give exactly one of --data or --q")
    if args.data is not None:
        summary = summarize_sample(read_observations(args.data))
        if args.n is not None and args.n != summary.n:
            raise UsageError(f"--n {args.n} does not match the {summary.n} observations in {args.data}")
    else:
        if args.n is None:
            raise UsageError("--q needs --n")
        if args.q < 0:
            raise UsageError(f"--q must be >= 0, got {args.q}")
        if args.q == 0:
            raise DegenerateSampleError("residual sum of squares is 0")
        summary = SampleSummary(n=args.n, mean=math.nan, q=args.q, s_mle=math.sqrt(args.q / args.n))

    spec = TwoSidedTSpec(n=summary.n, mu0=args.mu0, mu=args.mu, alpha=args.alpha)
    if args.rule == Rule.MIN_LENGTH.value:
        log.warning("min-length intervals are not shown to have nominal coverage")
    sigma_iv, power_iv, mle = t_test_power_ci(spec, summary, args.gamma, args.rule)
    _write_csv(
        args.out,
        ["a", "b", "power_lo", "power_hi", "power_mle"],
        [[sigma_iv.a, sigma_iv.b, power_iv.lo, power_iv.hi, mle]],
    )
    return 0


def figure1_rows(n, alpha, gamma, effects):
    """
    (effect, power_mle, ci_lo, ci_hi) against e = (μ − μ₀)/S with S = 1.

    With S fixed at 1 the residual sum of squares is q = n, so the σ
    interval is the same on every row and only λ = √n|e| changes.
    """
    sigma_iv = sigma_ci_equal_tail(float(n), n - 1, gamma)
    rows = []
    for e in effects:
        spec = TwoSidedTSpec(n=n, mu0=0.0, mu=float(e), alpha=alpha)
        power_iv = power_ci(sigma_iv, spec.design, spec.noncentrality_map)
        rows.append((float(e), power_mle(spec, 1.0), power_iv.lo, power_iv.hi))
    return rows


def cmd_figure1(args):
    if args.grid_steps < 2:
        raise UsageError(f"--grid-steps must be >= 2, got {args.grid_steps}")
    if not args.grid_min < args.grid_max:
        raise UsageError("--grid-min must be below --grid-max")
    effects = np.linspace(args.grid_min, args.grid_max, args.grid_steps)
    rows = figure1_rows(args.n, args.alpha, args.gamma, effects)
    _write_csv(args.out, ["effect", "power_mle", "ci_lo", "ci_hi"], rows)
    return 0


def cmd_coverage(args):
    sim = SimConfig(
        seed=args.seed,
        replicates=args.replicates,
        n=args.n,
        mu=args.mu,
        mu0=args.mu0,
        sigma=args.sigma,
        alpha=args.alpha,
        gamma=args.gamma,
        rule=Rule(args.rule),
    )
    result = coverage_experiment(sim, workers=args.workers)
    if sim.rule is Rule.MIN_LENGTH:
        log.warning("min-length coverage is reported without a nominal guarantee")
    if result.indicator_mismatches:
        log.warning(
            "%d replicates had different sigma and power indicators", result.indicator_mismatches
        )
    rows = [
        [name, report.rule.value, report.hits, report.replicates, report.coverage,
         report.std_err, report.nominal, result.optimizer_failures]
        for name, report in (("sigma", result.sigma), ("power", result.power))
    ]
    _write_csv(
        args.out,
        ["interval", "rule", "hits", "replicates", "coverage", "std_err", "nominal", "optimizer_failures"],
        rows,
    )
    if result.failure_fraction > cfg.OPTIMIZER_FAILURE_LIMIT:
        log.error(
            "optimizer failed on %.2f%% of replicates (limit %.2f%%)",
            100 * result.failure_fraction, 100 * cfg.OPTIMIZER_FAILURE_LIMIT,
        )
        return 1
    return 0


def cmd_minlen(args):
    if not args.lambda_effect > 0:
        raise UsageError(f"--lambda must be > 0, got {args.lambda_effect}")
    design = TestDesign(u=args.u, v=args.v, alpha=args.alpha)
    result = minlen_positions(args.q, args.v, args.gamma, design, NoncentralityMap(args.lambda_effect))
    log.warning("min-length intervals are not shown to have nominal coverage")
    sigma_iv, power_iv = result.sigma_interval, result.power_interval
    _write_csv(
        args.out,
        ["A", "B", "a", "b", "power_lo", "power_hi", "L", "L_equal_tail"],
        [[result.A, result.B, sigma_iv.a, sigma_iv.b, power_iv.lo, power_iv.hi,
          result.length, result.equal_tail_length]],
    )
    return 0


# ────────────────────────────────────────────────────────────
# Parser
# ────────────────────────────────────────────────────────────

def build_parser():
    parser = argparse.ArgumentParser(
        prog="main.py",
        description="Power of F-tests and exact-coverage confidence intervals for power.",
    )
    parser.add_argument("--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, handler, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(handler=handler)
        p.add_argument("--out", default=None, help="write output to this file instead of stdout")
        return p

    p = add("power", cmd_power, "power of the alpha-level F-test")
    p.add_argument("--u", type=float, required=True, help="numerator degrees of freedom")
    p.add_argument("--v", type=float, required=True, help="denominator degrees of freedom")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--delta", type=float, default=None, help="noncentrality (distance scale)")
    p.add_argument("--sigma", type=float, default=None)
    p.add_argument("--lambda", dest="lambda_effect", type=float, default=None,
                   help="effect constant: delta = lambda / sigma")

    p = add("ci", cmd_ci, "confidence interval for two-sided t-test power")
    p.add_argument("--n", type=int, default=None, help="sample size (required with --q)")
    p.add_argument("--alpha", type=float, default=cfg.DEFAULT_ALPHA)
    p.add_argument("--gamma", type=float, default=cfg.DEFAULT_GAMMA)
    p.add_argument("--mu", type=float, required=True, help="alternative mean")
    p.add_argument("--mu0", type=float, required=True, help="null mean")
    p.add_argument("--data", default=None, help="file with one observation per line")
    p.add_argument("--q", type=float, default=None, help="residual sum of squares")
    p.add_argument("--rule", choices=[r.value for r in Rule], default=Rule.EQUAL_TAIL.value)

    p = add("figure1", cmd_figure1, "MLE and CI curves against (mu - mu0)/S")
    p.add_argument("--n", type=int, default=cfg.DEFAULT_N)
    p.add_argument("--alpha", type=float, default=cfg.DEFAULT_ALPHA)
    p.add_argument("--gamma", type=float, default=cfg.DEFAULT_GAMMA)
    p.add_argument("--grid-min", type=float, default=cfg.FIGURE_GRID_MIN)
    p.add_argument("--grid-max", type=float, default=cfg.FIGURE_GRID_MAX)
    p.add_argument("--grid-steps", type=int, default=cfg.FIGURE_GRID_STEPS)

    p = add("coverage", cmd_coverage, "Monte Carlo coverage of sigma and power intervals")
    p.add_argument("--rule", choices=[r.value for r in Rule], default=Rule.EQUAL_TAIL.value)
    p.add_argument("--n", type=int, default=cfg.DEFAULT_N)
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--mu0", type=float, default=0.0)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--alpha", type=float, default=cfg.DEFAULT_ALPHA)
    p.add_argument("--gamma", type=float, default=cfg.DEFAULT_GAMMA)
    p.add_argument("--replicates", type=int, default=cfg.DEFAULT_REPLICATES)
    p.add_argument("--seed", type=int, default=cfg.DEFAULT_SEED)
    p.add_argument("--workers", type=int, default=cfg.DEFAULT_WORKERS)

    p = add("minlen", cmd_minlen, "minimum-length quantile positions")
    p.add_argument("--q", type=float, required=True, help="residual sum of squares")
    p.add_argument("--v", type=float, required=True)
    p.add_argument("--gamma", type=float, default=cfg.DEFAULT_GAMMA)
    p.add_argument("--u", type=float, required=True)
    p.add_argument("--alpha", type=float, default=cfg.DEFAULT_ALPHA)
    p.add_argument("--lambda", dest="lambda_effect", type=float, required=True)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(format=cfg.LOG_FORMAT, stream=sys.stderr)
    logging.getLogger().setLevel(logging.INFO if args.verbose else logging.WARNING)

    try:
        return args.handler(args)
    except UsageError as exc:
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (DegenerateSampleError, ConvergenceError) as exc:
        log.error("%s", exc)
        return 1
    except DomainError as exc:
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return 2
