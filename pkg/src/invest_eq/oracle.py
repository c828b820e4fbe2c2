"""Brute-force reference solutions.

Nothing here uses the closed-form private best response or any first-order
condition: every routine evaluates the raw utility on a grid and keeps the
best point, refining once on a ten times finer grid around it.  These are
slow by design and exist to cross-check the solvers.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SizeError
from .model import CpParams, Market

_CHUNK = 1 << 21


@dataclass(frozen=True)
class GridSpec:
    lo: float
    hi: float
    steps: int

    def __post_init__(self):
        if not self.lo < self.hi:
            raise DomainError(f"grid needs lo < hi, got [{self.lo}, {self.hi}]")
        if self.steps < 2:
            raise DomainError(f"grid needs at least 2 points, got {self.steps}")

    @property
    def step(self) -> float:
        return (self.hi - self.lo) / (self.steps - 1)

    def points(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.steps)


def default_p_grid(cp: CpParams, steps: int = 10001) -> GridSpec:
    return GridSpec(0.0, cp.psi + 1.0, steps)


def default_q_grid(market: Market, steps: int = 2001) -> GridSpec:
    return GridSpec(0.0, float(market.psi.sum()), steps)


def _raw_utility(cp: CpParams, Q: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Utility before the public payment, ``psi log(1 + Q + b sqrt(p)) - p``."""
    return cp.psi * np.log1p(Q + cp.b * np.sqrt(p)) - p


def best_private(cp: CpParams, Q, grid: GridSpec | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Grid-optimal private spend and the value reached, for each public total in ``Q``."""
    grid = grid or default_p_grid(cp)
    Q = np.atleast_1d(np.asarray(Q, dtype=float))
    p = grid.points()
    rows = max(1, _CHUNK // p.size)
    best_p = np.empty_like(Q)
    for start in range(0, Q.size, rows):
        block = Q[start:start + rows, None]
        k = np.argmax(_raw_utility(cp, block, p[None, :]), axis=1)
        best_p[start:start + rows] = p[k]
    # one pass on a 10x finer grid spanning the neighbouring coarse cells
    offsets = np.linspace(-grid.step, grid.step, 21)
    fine = np.clip(best_p[:, None] + offsets[None, :], grid.lo, grid.hi)
    values = _raw_utility(cp, Q[:, None], fine)
    k = np.argmax(values, axis=1)
    idx = np.arange(Q.size)
    return fine[idx, k], values[idx, k]


def grid_argmax_p(cp: CpParams, Q: float, grid: GridSpec | None = None) -> float:
    if Q < 0:
        raise DomainError(f"Q must be non-negative, got {Q}")
    p, _ = best_private(cp, Q, grid)
    return float(p[0])


def _total_value(market: Market, Q: np.ndarray, p_steps: int) -> np.ndarray:
    total = -Q.copy()
    for cp in market:
        _, v = best_private(cp, Q, default_p_grid(cp, p_steps))
        total += v
    return total


def grid_centralized(
    market: Market, gridQ: GridSpec | None = None, p_steps: int = 10001
) -> tuple[float, float]:
    """Grid maximizer of total utility over the public total.  Returns ``(Q, total utility)``."""
    if len(market) > 3:
        raise SizeError(f"grid_centralized handles at most 3 CPs, got {len(market)}")
    gridQ = gridQ or default_q_grid(market)
    Q = gridQ.points()
    k = int(np.argmax(_total_value(market, Q, p_steps)))
    fine = np.clip(Q[k] + np.linspace(-gridQ.step, gridQ.step, 21), gridQ.lo, gridQ.hi)
    values = _total_value(market, fine, p_steps)
    k = int(np.argmax(values))
    return float(fine[k]), float(values[k])


def grid_best_response(
    market: Market, n: int, Q_minus: float, grid: GridSpec | None = None, p_steps: int = 10001
) -> float:
    """Grid maximizer of CP ``n``'s utility over its own public spend."""
    if Q_minus < 0:
        raise DomainError(f"Q_minus must be non-negative, got {Q_minus}")
    cp = market[n]
    grid = grid or default_q_grid(market)
    p_grid = default_p_grid(cp, p_steps)

    def own(q: np.ndarray) -> np.ndarray:
        _, v = best_private(cp, Q_minus + q, p_grid)
        return v - q

    q = grid.points()
    k = int(np.argmax(own(q)))
    fine = np.clip(q[k] + np.linspace(-grid.step, grid.step, 21), grid.lo, grid.hi)
    return float(fine[int(np.argmax(own(fine)))])


def grid_bargaining(
    market: Market, grid: GridSpec | None = None, p_steps: int = 10001, final_step: float = 1e-3
) -> tuple[tuple[float, float], float]:
    """Exhaustive 2-D search for the split maximizing the Nash product.

    Starts on ``grid`` for each CP's public spend and zooms in around the
    best point until the step is at most ``final_step``.  Splits that leave
    either CP below its disagreement utility are excluded; if nothing beats
    disagreement the result is ``((0, 0), 0)``.
    """
    if len(market) != 2:
        raise SizeError(f"grid_bargaining handles exactly 2 CPs, got {len(market)}")
    grid = grid or GridSpec(0.0, float(market.psi.sum()), 201)
    cps = market.cps
    p_grids = [default_p_grid(cp, p_steps) for cp in cps]
    disagreement = [float(best_private(cp, 0.0, g)[1][0]) for cp, g in zip(cps, p_grids)]

    def product(q1: np.ndarray, q2: np.ndarray) -> np.ndarray:
        Q = q1[:, None] + q2[None, :]
        uniq, inv = np.unique(Q, return_inverse=True)
        gains = []
        for cp, g, d, own in zip(cps, p_grids, disagreement, (q1[:, None], q2[None, :])):
            _, v = best_private(cp, uniq, g)
            gains.append(v[inv].reshape(Q.shape) - own - d)
        out = gains[0] * gains[1]
        out[(gains[0] < 0) | (gains[1] < 0)] = -np.inf
        return out

    lo = np.array([grid.lo, grid.lo])
    hi = np.array([grid.hi, grid.hi])
    steps = grid.steps
    best, value = np.zeros(2), 0.0
    while True:
        axes = [np.linspace(lo[i], hi[i], steps) for i in range(2)]
        vals = product(*axes)
        i, j = np.unravel_index(int(np.argmax(vals)), vals.shape)
        if vals[i, j] > 0:
            best, value = np.array([axes[0][i], axes[1][j]]), float(vals[i, j])
        step = (hi - lo) / (steps - 1)
        if step.max() <= final_step:
            break
        centre = np.array([axes[0][i], axes[1][j]])
        lo = np.maximum(centre - 2 * step, 0.0)
        hi = centre + 2 * step
        steps = 41
    if value <= 0:
        return (0.0, 0.0), 0.0
    return (float(best[0]), float(best[1])), value
