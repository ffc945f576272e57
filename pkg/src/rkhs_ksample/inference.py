"""Asymptotic-normal decision rule for the scaled statistic ``n * t_hat``."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidAlpha
from .statistic import StatisticBreakdown

METHOD = "asymptotic-normal-one-sided"
# Phi is only accurate to ~1e-12, so p-values this close to alpha count as the boundary
BOUNDARY_TOL = 1e-12


def std_normal_cdf(z: float) -> float:
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


def std_normal_sf(z: float) -> float:
    """Upper tail ``1 - Phi(z)``, computed without cancellation."""
    return 0.5 * math.erfc(z / math.sqrt(2.0))


@dataclass(frozen=True)
class TestReport:
    __test__ = False  # not a pytest class

    breakdown: StatisticBreakdown
    p_value: float
    alpha: float
    reject: bool
    method: str = METHOD


def check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise InvalidAlpha(f"alpha must lie in (0, 1), got {alpha!r}")
    return alpha


def decide(breakdown: StatisticBreakdown, alpha: float = 0.05) -> TestReport:
    """Reject for large ``n * t_hat``; ``p == alpha`` counts as a rejection."""
    alpha = check_alpha(alpha)
    p = std_normal_sf(breakdown.n_t_hat)
    return TestReport(breakdown=breakdown, p_value=p, alpha=alpha, reject=p <= alpha + BOUNDARY_TOL)
