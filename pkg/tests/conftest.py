"""Shared fixtures.  The modules live flat at the repository root."""

import os
import sys

import pytest

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

from dist import f_quantile_central  # noqa: E402
from power import TestDesign, TwoSidedTSpec  # noqa: E402

SEED = 20070101


@pytest.fixture(scope="session")
def c_1_9():
    """0.95 quantile of the central F(1, 9), ≈ 5.1174."""
    return f_quantile_central(1, 9, 0.95)


@pytest.fixture
def design_1_9():
    return TestDesign(u=1, v=9, alpha=0.05)


@pytest.fixture
def t_spec_n10():
    """n = 10, α = 0.05, (μ − μ₀)/σ = 1 at σ = 1."""
    return TwoSidedTSpec(n=10, mu0=0.0, mu=1.0, alpha=0.05)
