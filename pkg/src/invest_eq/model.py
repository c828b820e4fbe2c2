"""Game primitives for the public/private investment game.

A content provider (CP) ``n`` earns ``r_n`` per unit of traffic.  Public
investment ``Q`` (pooled at a neutral ISP) and its own private investment
``p_n`` raise its traffic by ``a_n * log(1 + Q + b_n * sqrt(p_n))``, so its
utility is

    U_n = r_n a_n log(1 + Q + b_n sqrt(p_n)) - (p_n + q_n).

Only the product ``psi = r * a`` ever enters the equations.  Every solver
in the package uses the closed-form private best response :func:`p_star`
and the reduced utility :func:`reduced_utility` built on it.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .errors import ContractError, DomainError, ShapeError


class Special(enum.Enum):
    """Non-numeric values of ratios such as the price of anarchy."""

    UNBOUNDED = "unbounded"
    UNDEFINED = "undefined"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class CpParams:
    """Primitives of one content provider.

    ``r`` and ``a`` must be non-negative and ``b >= 1``.  A zero product
    ``r * a`` is accepted here so single-CP formulas can be exercised at
    the trivial point; :class:`Market` requires ``psi > 0``.
    """

    r: float
    a: float
    b: float = 1.0

    def __post_init__(self):
        for name in ("r", "a", "b"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise DomainError(f"{name} must be finite, got {value!r}")
        if self.r < 0 or self.a < 0:
            raise DomainError(f"r and a must be non-negative, got r={self.r}, a={self.a}")
        if self.b < 1:
            raise DomainError(f"b must be >= 1, got {self.b}")

    @property
    def psi(self) -> float:
        return self.r * self.a

    @classmethod
    def from_psi(cls, psi: float, b: float = 1.0) -> "CpParams":
        return cls(r=float(psi), a=1.0, b=float(b))


@dataclass(frozen=True)
class Market:
    """Ordered collection of CPs.  Index order matters for coalition pruning."""

    cps: tuple[CpParams, ...]

    def __post_init__(self):
        object.__setattr__(self, "cps", tuple(self.cps))
        if len(self.cps) < 1:
            raise DomainError("a market needs at least one CP")
        for i, cp in enumerate(self.cps):
            if not cp.psi > 0:
                raise DomainError(f"cps[{i}]: r*a must be positive, got {cp.psi}")

    @classmethod
    def from_psi(cls, psi: Iterable[float], b: Iterable[float] | None = None) -> "Market":
        psi = [float(x) for x in psi]
        b = [1.0] * len(psi) if b is None else [float(x) for x in b]
        if len(b) != len(psi):
            raise ShapeError(f"psi has {len(psi)} entries but b has {len(b)}")
        return cls(tuple(CpParams.from_psi(x, y) for x, y in zip(psi, b)))

    def __len__(self) -> int:
        return len(self.cps)

    def __iter__(self) -> Iterator[CpParams]:
        return iter(self.cps)

    def __getitem__(self, i: int) -> CpParams:
        return self.cps[i]

    @property
    def psi(self) -> np.ndarray:
        return np.array([cp.psi for cp in self.cps])

    @property
    def b(self) -> np.ndarray:
        return np.array([cp.b for cp in self.cps])

    def subset(self, indices: Iterable[int]) -> "Market":
        return Market(tuple(self.cps[i] for i in indices))


@dataclass(frozen=True)
class Allocation:
    """Public investments ``q`` and private investments ``p``, one entry per CP."""

    q: tuple[float, ...]
    p: tuple[float, ...]

    def __post_init__(self):
        q = tuple(float(x) for x in self.q)
        p = tuple(float(x) for x in self.p)
        if len(q) != len(p):
            raise ShapeError(f"q has {len(q)} entries but p has {len(p)}")
        for name, values in (("q", q), ("p", p)):
            for i, x in enumerate(values):
                if not math.isfinite(x) or x < 0:
                    raise DomainError(f"{name}[{i}] must be finite and non-negative, got {x}")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)


@dataclass(frozen=True)
class Outcome:
    Q: float
    P: float
    gamma: float | Special
    utilities: tuple[float, ...]
    total_utility: float


def _check_nonneg(**values: float) -> None:
    for name, x in values.items():
        if not math.isfinite(x) or x < 0:
            raise DomainError(f"{name} must be finite and non-negative, got {x}")


def private_gain(cp: CpParams, p: float) -> float:
    """Equivalent public investment of private spend ``p``: ``b * sqrt(p)``."""
    _check_nonneg(p=p)
    return cp.b * math.sqrt(p)


def consumption_gain(cp: CpParams, Q: float, p: float) -> float:
    """Traffic increase ``a * log(1 + Q + b sqrt(p))``."""
    _check_nonneg(Q=Q, p=p)
    return cp.a * math.log1p(Q + private_gain(cp, p))


def utility(cp: CpParams, q: float, Q: float, p: float) -> float:
    """Surplus of a CP that pays ``q`` into a pool totalling ``Q`` and spends ``p`` privately."""
    _check_nonneg(q=q, Q=Q, p=p)
    if Q < q:
        raise ContractError(f"total public investment Q={Q} is below own contribution q={q}")
    return cp.r * consumption_gain(cp, Q, p) - (p + q)


def _radical(cp: CpParams, Q: float) -> float:
    x = 1.0 + Q
    return math.sqrt(x * x + 2.0 * cp.b * cp.b * cp.psi)


def p_star(cp: CpParams, Q: float) -> float:
    """Private investment maximizing the CP's utility for a fixed public total ``Q``.

    Equals ``((sqrt((1+Q)^2 + 2 b^2 psi) - (1+Q)) / (2b))^2``; evaluated in the
    rationalized form ``(b psi / (R + 1 + Q))^2`` to avoid cancellation for
    small ``psi``.
    """
    _check_nonneg(Q=Q)
    root = cp.b * cp.psi / (_radical(cp, Q) + 1.0 + Q)
    return root * root


def f_of_Q(cp: CpParams, Q: float) -> float:
    """``log((R + 1 + Q) / 2)``: log of ``1 + Q + b sqrt(p_star(Q))``."""
    _check_nonneg(Q=Q)
    return math.log((_radical(cp, Q) + 1.0 + Q) / 2.0)


def gross_value(cp: CpParams, Q: float) -> float:
    """``psi f(Q) - p_star(Q)``: utility at total ``Q`` before paying the own share."""
    return cp.psi * f_of_Q(cp, Q) - p_star(cp, Q)


def public_marginal(cp: CpParams, Q: float) -> float:
    """Derivative of :func:`gross_value` in ``Q``, ``(R - (1+Q)) / b^2``.

    Computed as ``2 psi / (R + 1 + Q)``, which is the same quantity without
    the subtraction.
    """
    _check_nonneg(Q=Q)
    return 2.0 * cp.psi / (_radical(cp, Q) + 1.0 + Q)


def reduced_utility(cp: CpParams, q: float, Q: float) -> float:
    """Utility with private investment already at its optimum for ``Q``."""
    _check_nonneg(q=q, Q=Q)
    if Q < q:
        raise ContractError(f"total public investment Q={Q} is below own contribution q={q}")
    return gross_value(cp, Q) - q


def evaluate(market: Market, alloc: Allocation) -> Outcome:
    if len(alloc.q) != len(market):
        raise ShapeError(f"allocation has {len(alloc.q)} entries for a market of {len(market)} CPs")
    Q = math.fsum(alloc.q)
    P = math.fsum(alloc.p)
    utilities = tuple(utility(cp, q, Q, p) for cp, q, p in zip(market, alloc.q, alloc.p))
    return Outcome(
        Q=Q,
        P=P,
        gamma=ratio(Q, P),
        utilities=utilities,
        total_utility=math.fsum(utilities),
    )


def ratio(num: float, den: float) -> float | Special:
    """``num / den`` with :attr:`Special.UNDEFINED` for a zero denominator."""
    if den == 0:
        return Special.UNDEFINED
    return num / den


def total_private(market: Market, Q: float) -> float:
    return math.fsum(p_star(cp, Q) for cp in market)


def total_reduced_utility(market: Market, Q: float) -> float:
    """Sum of CP utilities at public total ``Q`` with every CP at its private optimum."""
    return math.fsum(gross_value(cp, Q) for cp in market) - Q
