"""Nash bargaining over the public total and its split.

If bargaining fails nobody invests publicly, so each CP falls back to its
private-only optimum (the disagreement utility).  For a fixed public total
``Q`` the gross surplus ``S_n(Q)`` of every CP is known, and maximizing
``prod(S_n(Q) - q_n)`` over splits of ``Q`` is a water-filling problem:
every paying CP keeps the same net surplus ``c``.  The outer problem over
``Q`` is concave in the log-product and is solved by golden-section search.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from ._search import bisect_decreasing, equal_level, golden_max
from .centralized import has_positive_optimum, solve_centralized
from .errors import DomainError
from .model import CpParams, Market, Special, gross_value, p_star, public_marginal
from .nash import price_of_anarchy

NONZERO = "nonzero"
DEGENERATE = "degenerate"


@dataclass(frozen=True)
class BargainSolution:
    status: str
    Q_star: float
    q: tuple[float, ...]
    p: tuple[float, ...]
    utilities: tuple[float, ...]
    disagreement: tuple[float, ...]
    beta: float | Special
    gamma_B: float
    alpha: float | Special
    interior: bool

    @property
    def total_utility(self) -> float:
        return math.fsum(self.utilities)


def disagreement_utility(cp: CpParams) -> float:
    """Best utility with no public investment at all."""
    R = math.sqrt(1.0 + 2.0 * cp.b * cp.b * cp.psi)
    return cp.psi * math.log((R + 1.0) / 2.0) - ((R - 1.0) / (2.0 * cp.b)) ** 2


def surplus(cp: CpParams, Q: float) -> float:
    """Gain over disagreement at public total ``Q``, before paying the own share."""
    # same-expression difference so that S(0) is exactly zero
    return gross_value(cp, Q) - gross_value(cp, 0.0)


def water_fill(surpluses: Sequence[float], total: float) -> tuple[float, ...] | None:
    """Split ``total`` as ``q_n = max(0, S_n - c)`` with a common level ``c > 0``.

    Returns ``None`` when no positive level exists, i.e. ``sum(S) <= total``.
    """
    S = [float(s) for s in surpluses]
    if total < 0:
        raise DomainError(f"total must be non-negative, got {total}")
    if math.fsum(S) <= total:
        return None
    if total == 0:
        return tuple(0.0 for _ in S)
    q, _ = equal_level(S, total)
    return q


def inner_allocation(market: Market, Q: float) -> tuple[tuple[float, ...], float] | None:
    """Best split of a fixed total ``Q`` and the resulting log Nash product.

    ``None`` when the total cannot be split with every CP strictly better
    off than under disagreement.
    """
    S = [surplus(cp, Q) for cp in market]
    q = water_fill(S, Q)
    if q is None:
        return None
    gains = [s - x for s, x in zip(S, q)]
    if min(gains) <= 0:
        return None
    return q, math.fsum(math.log(g) for g in gains)


def _log_product(market: Market, Q: float) -> float:
    found = inner_allocation(market, Q)
    return -math.inf if found is None else found[1]


def _outer_slope(market: Market, Q: float) -> float:
    """Derivative of the optimal log-product in ``Q``.

    With active set ``A`` (CPs that pay) sharing the level ``c`` and the rest
    keeping ``S_n``: ``(sum_A S_n' - 1) / c + sum_{not A} S_n' / S_n``.
    """
    S = [surplus(cp, Q) for cp in market]
    dS = [public_marginal(cp, Q) for cp in market]
    q = water_fill(S, Q)
    if q is None:
        return -math.inf
    active = [n for n, x in enumerate(q) if x > 0]
    if not active:
        # Q == 0: every CP is at the boundary, nothing is paid yet
        return math.inf
    c = (math.fsum(S[n] for n in active) - Q) / len(active)
    slope = (math.fsum(dS[n] for n in active) - 1.0) / c
    slope += math.fsum(dS[n] / S[n] for n in range(len(S)) if n not in active)
    return slope


def _feasible_limit(market: Market, Q_lo: float, tol: float) -> float:
    """Largest ``Q`` with ``sum_n S_n(Q) > Q``; the total gain is concave and positive at ``Q_lo``."""

    def gain(Q: float) -> float:
        return math.fsum(surplus(cp, Q) for cp in market) - Q

    hi = max(2.0 * Q_lo, 1.0)
    while gain(hi) > 0:
        hi *= 2.0
    return bisect_decreasing(gain, Q_lo, hi, tol=tol)


def _polish(market: Market, lo: float, hi: float, Q_max: float, tol: float) -> float:
    """Refine a golden-section bracket by bisection on the slope sign.

    The log-product is continuously differentiable and concave, so its
    slope is a decreasing function; the bracket is widened until the
    slope changes sign across it.
    """

    def slope(x: float) -> float:
        return _outer_slope(market, x)

    width = max(hi - lo, tol)
    while lo > 0 and slope(lo) <= 0:
        lo = max(0.0, lo - width)
        width *= 2.0
    width = max(hi - lo, tol)
    while hi < Q_max and slope(hi) >= 0:
        hi = min(Q_max, hi + width)
        width *= 2.0
    return bisect_decreasing(slope, lo, hi, tol=tol)


def solve_bargaining(market: Market, tol: float = 1e-10) -> BargainSolution:
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol}")
    U_D = tuple(disagreement_utility(cp) for cp in market)
    N = len(market)

    if not has_positive_optimum(market):
        Q = 0.0
        p = tuple(p_star(cp, Q) for cp in market)
        return BargainSolution(
            status=DEGENERATE,
            Q_star=Q,
            q=(0.0,) * N,
            p=p,
            utilities=U_D,
            disagreement=U_D,
            beta=Special.UNDEFINED,
            gamma_B=0.0,
            alpha=0.0,
            interior=False,
        )

    Q_C = solve_centralized(market, tol=tol).Q_star
    Q_max = _feasible_limit(market, Q_C, tol)
    # below ~1e-6 relative width the log-product differences drown in rounding
    lo, hi = golden_max(lambda x: _log_product(market, x), 0.0, Q_max, tol=max(tol, 1e-6 * Q_max))
    Q = _polish(market, lo, hi, Q_max, tol)

    q, _ = inner_allocation(market, Q)
    p = tuple(p_star(cp, Q) for cp in market)
    utilities = tuple(gross_value(cp, Q) - x for cp, x in zip(market, q))
    beta = Q / Q_C
    eta = price_of_anarchy(market)
    alpha: float | Special = eta if isinstance(eta, Special) else eta * beta
    return BargainSolution(
        status=NONZERO,
        Q_star=Q,
        q=q,
        p=p,
        utilities=utilities,
        disagreement=U_D,
        beta=beta,
        gamma_B=Q / math.fsum(p),
        alpha=alpha,
        interior=all(x > 0 for x in q),
    )

