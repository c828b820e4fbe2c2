"""Strategic cooperative game: can every CP be kept paying into the public pool?

The grand coalition (every CP pays something) is stable when no CP would
rather live with the outcome of some smaller investing set ``I``.  The
investing set ``I`` funds the public total a planner restricted to ``I``
would choose, and splits it among its members with the same equal-slack
rule used for the grand coalition (recursively).

Coalitions are ``frozenset`` objects of 0-based CP indices.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from ._search import equal_level
from .centralized import solve_centralized
from .errors import DomainError, ShapeError, SizeError
from .model import Market, gross_value, reduced_utility

FEASIBLE = "feasible"
INFEASIBLE = "infeasible"
MAX_UNPRUNED = 12

CoalitionSet = frozenset


@dataclass(frozen=True)
class CooperativeSolution:
    status: str
    q: tuple[float, ...] | None
    Q_star: float
    total_utility: float | None
    caps: tuple[float, ...]
    binding_constraints: tuple[tuple[int, frozenset], ...]

    @property
    def feasible(self) -> bool:
        return self.status == FEASIBLE


def satisfies_ordering(market: Market) -> bool:
    """``psi`` strictly decreasing and ``b`` non-decreasing along the CP order."""
    pairs = list(zip(market.cps, market.cps[1:]))
    return all(x.psi > y.psi and x.b <= y.b for x, y in pairs)


def deviation_sets(members: Sequence[int], prune: bool = False) -> list[frozenset]:
    """Proper subsets of ``members`` by increasing size, lexicographic within a size.

    With ``prune`` the singletons other than the lowest-index member are
    dropped: under the ordering assumption, a lone investor that is not the
    top CP always draws in a higher-revenue CP, so that outcome is never a
    credible deviation.
    """
    members = sorted(members)
    sets = []
    for k in range(len(members)):
        for combo in itertools.combinations(members, k):
            if prune and k == 1 and combo[0] != members[0]:
                continue
            sets.append(frozenset(combo))
    return sets


def _level_split(caps: Sequence[float], total: float, floor: float) -> tuple[float, ...]:
    """``q_n = max(floor, cap_n - s)`` with ``s`` chosen so the shares sum to ``total``."""
    q, _ = equal_level(caps, total, floor)
    return q


class _Coalitions:
    """Memoized coalition values, splits and deviation caps for one market."""

    def __init__(self, market: Market, tol: float = 1e-10, epsilon: float = 1e-6):
        self.market = market
        self.tol = tol
        self.epsilon = epsilon
        self.prune = satisfies_ordering(market)
        self._value: dict[frozenset, float] = {}
        self._split: dict[frozenset, dict[int, float]] = {}
        self._caps: dict[frozenset, tuple[dict[int, float], dict[int, frozenset]]] = {}
        self._gross: dict[tuple[int, float], float] = {}

    def value(self, I: frozenset) -> float:
        if I not in self._value:
            if not I:
                Q = 0.0
            elif len(I) == 1:
                (i,) = I
                cp = self.market[i]
                Q = max(0.0, cp.psi - cp.b * cp.b / 2.0 - 1.0)
            else:
                Q = solve_centralized(self.market.subset(sorted(I)), tol=self.tol).Q_star
            self._value[I] = Q
        return self._value[I]

    def gross(self, n: int, Q: float) -> float:
        key = (n, Q)
        if key not in self._gross:
            self._gross[key] = gross_value(self.market[n], Q)
        return self._gross[key]

    def split(self, I: frozenset) -> dict[int, float]:
        """Own contributions of the members of ``I`` when ``I`` invests on its own."""
        if I not in self._split:
            Q = self.value(I)
            members = sorted(I)
            if len(members) <= 1 or Q == 0:
                shares = {n: Q / len(members) for n in members}
            else:
                caps, _ = self.caps(I)
                floor = self.epsilon if len(members) * self.epsilon <= Q else 0.0
                q = _level_split([caps[n] for n in members], Q, floor)
                shares = dict(zip(members, q))
            self._split[I] = shares
        return self._split[I]

    def deviation(self, n: int, I: frozenset) -> float:
        return self.gross(n, self.value(I)) - self.split(I).get(n, 0.0)

    def caps(self, I: frozenset) -> tuple[dict[int, float], dict[int, frozenset]]:
        """Largest own share each member of ``I`` can pay and still beat every deviation."""
        if I not in self._caps:
            Q = self.value(I)
            caps, worst = {}, {}
            subsets = deviation_sets(I, self.prune)
            for n in sorted(I):
                best, arg = -math.inf, frozenset()
                for J in subsets:
                    d = self.deviation(n, J)
                    if d > best:
                        best, arg = d, J
                caps[n] = self.gross(n, Q) - best
                worst[n] = arg
            self._caps[I] = (caps, worst)
        return self._caps[I]


def _as_set(market: Market, I: Iterable[int]) -> frozenset:
    I = frozenset(int(i) for i in I)
    bad = [i for i in I if not 0 <= i < len(market)]
    if bad:
        raise DomainError(f"coalition members {sorted(bad)} are not CP indices of a {len(market)}-CP market")
    return I


def _check_size(market: Market, prune: bool) -> None:
    if len(market) > MAX_UNPRUNED and not prune:
        raise SizeError(
            f"{len(market)} CPs give 2^{len(market)} deviation sets; "
            f"at most {MAX_UNPRUNED} are enumerated without the ordering assumption"
        )


def coalition_value(market: Market, I: Iterable[int], tol: float = 1e-10) -> float:
    """Public total the members of ``I`` would fund if only they invested."""
    return _Coalitions(market, tol=tol).value(_as_set(market, I))


def deviation_utility(market: Market, n: int, I: Iterable[int], epsilon: float = 1e-6) -> float:
    """Utility of CP ``n`` (with optimal private spend) when the investing set is ``I``."""
    return _Coalitions(market, epsilon=epsilon).deviation(n, _as_set(market, I))


def stability_margins(
    market: Market, q: Sequence[float], epsilon: float = 1e-6
) -> list[tuple[int, frozenset, float]]:
    """``U_n(grand coalition paying q) - U_n(deviation I)`` for every CP and deviation set."""
    if len(q) != len(market):
        raise ShapeError(f"q has {len(q)} entries for a market of {len(market)} CPs")
    if any(not x > 0 for x in q):
        raise DomainError("every CP must make a strictly positive public investment")
    co = _Coalitions(market, epsilon=epsilon)
    _check_size(market, co.prune)
    Q = math.fsum(q)
    subsets = deviation_sets(range(len(market)), co.prune)
    out = []
    for n, cp in enumerate(market):
        grand = reduced_utility(cp, q[n], Q)
        for I in subsets:
            out.append((n, I, grand - co.deviation(n, I)))
    return out


def solve_cooperative(market: Market, epsilon: float = 1e-6, tol: float = 1e-10) -> CooperativeSolution:
    """Maximize total utility subject to grand-coalition stability.

    Total utility depends on the split only through the public total, so
    the centralized total is optimal whenever some split is stable.  CP
    ``n``'s stability constraints amount to ``q_n < cap_n``; a split exists
    iff every cap exceeds ``epsilon`` and the caps add up to more than the
    total.  The returned split leaves every CP the same slack ``cap_n - q_n``.
    """
    if not epsilon > 0:
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    co = _Coalitions(market, tol=tol, epsilon=epsilon)
    _check_size(market, co.prune)
    everyone = frozenset(range(len(market)))
    Q = solve_centralized(market, tol=tol).Q_star
    caps_map, worst = co.caps(everyone)
    caps = tuple(caps_map[n] for n in range(len(market)))
    binding = tuple((n, worst[n]) for n in range(len(market)))

    feasible = (
        Q > 0
        and len(market) * epsilon <= Q
        and all(c > epsilon for c in caps)
        and math.fsum(caps) > Q
    )
    if not feasible:
        return CooperativeSolution(INFEASIBLE, None, Q, None, caps, binding)
    q = _level_split(caps, Q, epsilon)
    total = math.fsum(reduced_utility(cp, x, Q) for cp, x in zip(market, q))
    return CooperativeSolution(FEASIBLE, q, Q, total, caps, binding)


def investment_incentive(market: Market, m: int, I: Iterable[int], h: float = 1e-7) -> float:
    """Forward-difference slope of CP ``m``'s utility in its own public spend.

    Evaluated at ``q_m = 0`` on top of the public total funded by ``I``.
    """
    Q = coalition_value(market, I)
    cp = market[m]
    return (reduced_utility(cp, h, Q + h) - reduced_utility(cp, 0.0, Q)) / h
