"""Non-cooperative game: every CP picks its own public and private spend."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from ._search import golden_max
from .centralized import solve_centralized
from .errors import DomainError, ShapeError
from .model import Market, Special, gross_value, p_star, reduced_utility

TIE_RTOL = 1e-12


@dataclass(frozen=True)
class NashSolution:
    Q_star: float
    M: tuple[int, ...]
    q: tuple[float, ...]
    p: tuple[float, ...]
    utilities: tuple[float, ...]
    total_utility: float
    gamma_N: float


def contribution_index(market: Market) -> list[float]:
    """``psi_n - b_n^2 / 2`` per CP: one plus the public total CP ``n`` would fund alone."""
    return [cp.psi - cp.b * cp.b / 2.0 for cp in market]


def solve_nash(market: Market) -> NashSolution:
    """Closed-form pure equilibrium.

    Only the CPs with the largest ``psi - b^2/2`` contribute, and together
    they fund ``max(psi - b^2/2) - 1`` (nothing when that is not positive).
    Equilibrium conditions do not fix the split among tied top CPs; it is
    split equally here and :func:`verify_nash` accepts any split.
    """
    index = contribution_index(market)
    top = max(index)
    if top <= 1.0:
        Q = 0.0
        M: tuple[int, ...] = ()
    else:
        Q = top - 1.0
        slack = TIE_RTOL * max(1.0, abs(top))
        M = tuple(n for n, v in enumerate(index) if top - v <= slack)
    share = Q / len(M) if M else 0.0
    q = tuple(share if n in M else 0.0 for n in range(len(market)))
    # contributors sit where their own marginal return is 1, which fixes p at b^2/4
    p = tuple(cp.b * cp.b / 4.0 if n in M else p_star(cp, Q) for n, cp in enumerate(market))
    utilities = tuple(gross_value(cp, Q) - qn for cp, qn in zip(market, q))
    return NashSolution(
        Q_star=Q,
        M=M,
        q=q,
        p=p,
        utilities=utilities,
        total_utility=math.fsum(utilities),
        gamma_N=Q / math.fsum(p),
    )


def verify_nash(market: Market, q: Sequence[float], tol: float = 1e-7) -> tuple[bool, float]:
    """Check that no CP gains more than ``tol`` by changing its own public spend.

    Each CP's best response is found numerically by golden-section search
    over ``[0, Q_-n + sum(psi)]``.  Returns ``(is_equilibrium, worst_gain)``.
    """
    if len(q) != len(market):
        raise ShapeError(f"q has {len(q)} entries for a market of {len(market)} CPs")
    for i, x in enumerate(q):
        if not math.isfinite(x) or x < 0:
            raise DomainError(f"q[{i}] must be finite and non-negative, got {x}")
    total = math.fsum(q)
    psi_sum = float(market.psi.sum())
    worst = -math.inf
    for n, cp in enumerate(market):
        others = max(0.0, total - q[n])

        def own(x: float) -> float:
            return reduced_utility(cp, x, others + x)

        lo, hi = golden_max(own, 0.0, others + psi_sum, tol=1e-11)
        best = max(own(0.0), own(0.5 * (lo + hi)))
        worst = max(worst, best - own(q[n]))
    return worst <= tol, worst


def price_of_anarchy(market: Market) -> float | Special:
    """Centralized over equilibrium public total."""
    Q_N = solve_nash(market).Q_star
    Q_C = solve_centralized(market).Q_star
    if Q_N == 0:
        return Special.UNBOUNDED if Q_C > 0 else Special.UNDEFINED
    return Q_C / Q_N


def utility_ratio_Gamma(market: Market) -> float | Special:
    """Centralized over equilibrium total utility."""
    U_N = solve_nash(market).total_utility
    if U_N == 0:
        return Special.UNDEFINED
    return solve_centralized(market).total_utility / U_N
