"""
config.py — Central configuration for the F-test power interval toolkit.

Every tunable parameter lives here so numerical policy can be adjusted
without touching the evaluators.  Tolerances, iteration caps, Monte Carlo
block sizes and the command-line defaults are all exposed as simple
constants.
"""

# ─── Special functions ─────────────────────────────────────────────
SPECFUN_TOL = 1e-15               # Relative stopping tolerance for series / continued fractions
SPECFUN_MAX_ITER = 20000          # Iteration cap before ConvergenceError
SPECFUN_FPMIN = 1e-300            # Lentz guard against division by zero
LOG_GAMMA_SHIFT = 10.0            # Recur upward until x >= this, then Stirling
# Ascending Bessel series below BESSEL_SERIES_BASE + order^2, asymptotic above.
BESSEL_SERIES_BASE = 30.0
BESSEL_LOG_CUTOFF = 40.0          # Drop series terms this many nats below the peak

# ─── Distribution series ───────────────────────────────────────────
SERIES_TOL = 1e-13                # Poisson-mixture term and tail-mass cutoff
SERIES_MAX_TERMS = 100000         # Cap on mixture terms summed

# ─── Quantiles ─────────────────────────────────────────────────────
QUANTILE_PROB_TOL = 1e-10         # |CDF(x) - p| at convergence
QUANTILE_MAX_ITER = 200           # Bisection/secant hybrid cap
QUANTILE_MAX_EXPAND = 200         # Bracket doublings before giving up

# ─── Quadrature ────────────────────────────────────────────────────
SIMPSON_TOL = 1e-10               # Successive composite estimates must agree to this
SIMPSON_MIN_INTERVALS = 16        # Never accept convergence on a coarser mesh
SIMPSON_MAX_LEVEL = 20            # Cap: 2**20 subintervals
EXPECTATION_QUAD_TOL = 1e-9       # Tolerance for E[F_{u,delta}(x u V / v)]
EXPECTATION_DEFAULT_NODES = 64    # Starting subintervals for the expectation quadrature
CHISQ_TAIL_MASS = 1e-13           # Upper tail of V dropped by the truncated range

# ─── Minimum-length search ─────────────────────────────────────────
MINLEN_SCAN_POINTS = 64           # Coarse scan seeding the golden-section search
GOLDEN_TOL = 1e-8                 # Stop when the t-bracket is this narrow
GOLDEN_MAX_ITER = 200

# ─── Monte Carlo ───────────────────────────────────────────────────
SIM_BLOCK_SIZE = 1000             # Replicates per rng block (fixed: output depends on it)
ORACLE_BLOCK_SIZE = 100000        # Draws per block for mc_ncf_cdf
ORACLE_MIN_REPLICATES = 10000
DEFAULT_SEED = 20070101
DEFAULT_WORKERS = 1
OPTIMIZER_FAILURE_LIMIT = 0.01    # cmd_coverage exits 1 above this failure fraction

# ─── Command-line defaults ─────────────────────────────────────────
CSV_DIGITS = 10                   # Significant digits in every CSV field
DEFAULT_N = 10
DEFAULT_ALPHA = 0.05
DEFAULT_GAMMA = 0.05
FIGURE_GRID_MIN = -2.0            # Effect (mu - mu0) / S
FIGURE_GRID_MAX = 2.0
FIGURE_GRID_STEPS = 81
DEFAULT_REPLICATES = 10000
LOG_FORMAT = "[%(name)s] %(message)s"
