"""Centralized allocation: a planner picks the public total and every private spend."""
from __future__ import annotations

import math
from dataclasses import dataclass

from ._search import bisect_decreasing
from .errors import DomainError, InconsistencyError
from .model import Market, p_star, public_marginal, total_reduced_utility


@dataclass(frozen=True)
class CentralSolution:
    Q_star: float
    p: tuple[float, ...]
    gamma_C: float
    total_utility: float
    is_interior: bool

    @property
    def P(self) -> float:
        return math.fsum(self.p)


def foc_residual(market: Market, Q: float) -> float:
    """Derivative of total utility in ``Q`` with private spend re-optimized.

    ``sum_n (sqrt((1+Q)^2 + 2 b_n^2 psi_n) - (1+Q)) / b_n^2 - 1``; strictly
    decreasing in ``Q``.
    """
    return math.fsum(public_marginal(cp, Q) for cp in market) - 1.0


def has_positive_optimum(market: Market) -> bool:
    """Whether the optimal public total is strictly positive.

    Equivalent to ``sum_n sqrt(1 + 2 b_n^2 psi_n) / b_n^2 > 1 + sum_n 1/b_n^2``,
    i.e. a positive marginal return at ``Q = 0``.
    """
    return foc_residual(market, 0.0) > 0


def solve_centralized(market: Market, tol: float = 1e-10) -> CentralSolution:
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol}")
    for i, cp in enumerate(market):
        if not (math.isfinite(cp.psi) and math.isfinite(cp.b)):
            raise DomainError(f"cps[{i}] has non-finite parameters")

    interior = has_positive_optimum(market)
    if interior:
        hi = float(market.psi.sum())
        # the no-private-spend optimum sum(psi) - 1 bounds the root from above
        while foc_residual(market, hi) > 0:
            hi *= 2.0
        Q = bisect_decreasing(lambda x: foc_residual(market, x), 0.0, hi, tol=tol)
    else:
        Q = 0.0
    p = tuple(p_star(cp, Q) for cp in market)
    return CentralSolution(
        Q_star=Q,
        p=p,
        gamma_C=gamma_centralized(market, Q),
        total_utility=total_reduced_utility(market, Q),
        is_interior=interior,
    )


def gamma_centralized(market: Market, Q_star: float) -> float:
    """Public-private trade-off at the centralized optimum, ``2Q / (sum psi - (1+Q))``.

    Relies on the first-order condition, under which total private spend
    collapses to ``(sum psi - (1+Q)) / 2``.
    """
    if Q_star == 0:
        return 0.0
    denom = float(market.psi.sum()) - (1.0 + Q_star)
    if not denom > 0:
        raise InconsistencyError(
            f"sum(psi) - (1+Q) = {denom} is not positive; Q={Q_star} is not an interior optimum"
        )
    return 2.0 * Q_star / denom


def solve_benchmark(market: Market) -> float:
    """Optimal public total when CPs cannot invest privately: ``max(0, sum psi - 1)``."""
    return max(0.0, float(market.psi.sum()) - 1.0)


def benchmark_utility(market: Market) -> float:
    Q = solve_benchmark(market)
    return float(market.psi.sum()) * math.log1p(Q) - Q
