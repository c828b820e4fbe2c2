"""One-dimensional searches and the equal-level split shared by the solvers."""
from __future__ import annotations

import math
from typing import Callable, Sequence

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def bisect_decreasing(
    fn: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-10,
    max_iter: int = 200,
) -> float:
    """Root of a decreasing function with ``fn(lo) >= 0 >= fn(hi)``.

    Stops once ``|fn(mid)| < tol`` and the bracket is narrower than ``tol``,
    or after ``max_iter`` halvings.
    """
    mid = 0.5 * (lo + hi)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        value = fn(mid)
        if value == 0.0:
            return mid
        if value > 0:
            lo = mid
        else:
            hi = mid
        if abs(value) < tol and hi - lo < tol:
            break
        if hi - lo <= 4 * math.ulp(max(abs(lo), abs(hi))):
            break
    return 0.5 * (lo + hi)


def golden_max(
    fn: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-10,
    max_iter: int = 300,
) -> tuple[float, float]:
    """Golden-section search for the maximum of a unimodal ``fn`` on ``(lo, hi)``.

    Only interior points are evaluated.  Returns the final bracket.
    """
    a, b = lo, hi
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = fn(d)
    return a, b


def equal_level(values: Sequence[float], total: float, floor: float = 0.0) -> tuple[tuple[float, ...], float]:
    """Shares ``max(floor, v_n - s)`` summing to ``total``, and the level ``s``.

    Exact: with the ``k`` largest values above the floor, ``s`` solves a
    linear equation, and the right ``k`` is the first whose ``s`` is not
    below the next breakpoint.  Needs ``total >= len(values) * floor``.
    """
    n = len(values)
    order = sorted(range(n), key=lambda i: -values[i])
    ranked = [values[i] for i in order]
    bounds = [v - floor for v in ranked] + [-math.inf]
    for k in range(1, n + 1):
        s = (math.fsum(ranked[:k]) - total + (n - k) * floor) / k
        if s >= bounds[k]:
            break
    shares = [floor] * n
    for i in order[:k]:
        shares[i] = max(floor, values[i] - s)
    return tuple(shares), s
