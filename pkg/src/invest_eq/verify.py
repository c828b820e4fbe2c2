"""Oracle-vs-solver verification run behind ``invest-eq verify``.

Solvers are looked up through their modules at call time, so a test can
swap one out and watch the run fail.
"""
from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from typing import TextIO

import numpy as np

from . import bargaining, centralized, model, nash, oracle
from .model import Market

Q_TOL = 1e-3
BARGAIN_TOL = 2e-3
RESPONSE_TOL = 2e-3
P_STEPS = 2001

FIXED_MARKETS: tuple[tuple[tuple[float, ...], tuple[float, ...]], ...] = (
    ((4.0,), (1.0,)),
    ((2.0, 2.0), (1.0, 1.0)),
    ((0.1, 0.1), (1.0, 1.0)),
    ((2.0, 1.5), (1.0, 1.0)),
    ((5.0, 0.8), (1.0, 1.0)),
    ((1.2, 1.2), (1.0, 1.0)),
    ((2.0, 2.0), (2.0, 2.0)),
    ((0.3, 0.3), (2.0, 2.0)),
    ((3.0, 1.0), (1.0, 2.5)),
)
FIXED_PRIVATE = ((4.0, 1.0, 2.5), (2.0, 1.0, 0.0), (2.0, 2.0, 0.0), (0.5, 3.0, 1.0), (9.0, 1.5, 7.0))


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"


def _label(market: Market) -> str:
    psi = ",".join(f"{x:.6g}" for x in market.psi)
    b = ",".join(f"{x:.6g}" for x in market.b)
    return f"psi=[{psi}] b=[{b}]"


def _guard(name: str, fn) -> list[Check]:
    # a crashing solver is a failed check, not an aborted run
    try:
        return fn()
    except Exception as exc:
        return [Check(name, False, f"raised {type(exc).__name__}: {exc}")]


def check_private(psi: float, b: float, Q: float) -> list[Check]:
    cp = model.CpParams.from_psi(psi, b)
    got = model.p_star(cp, Q)
    ref = oracle.grid_argmax_p(cp, Q)
    err = abs(got - ref)
    name = f"p_star psi={psi:.6g} b={b:.6g} Q={Q:.6g}"
    return [Check(name, err < Q_TOL, f"solver={got:.6f} grid={ref:.6f}")]


def check_centralized(market: Market) -> list[Check]:
    sol = centralized.solve_centralized(market)
    checks = []
    if len(market) <= 3:
        ref, _ = oracle.grid_centralized(market, p_steps=P_STEPS)
        err = abs(sol.Q_star - ref)
        checks.append(Check(f"centralized {_label(market)}", err < Q_TOL,
                            f"solver={sol.Q_star:.6f} grid={ref:.6f}"))
    return checks


def check_nash(market: Market) -> list[Check]:
    sol = nash.solve_nash(market)
    label = _label(market)
    ok, gain = nash.verify_nash(market, sol.q)
    checks = [Check(f"nash equilibrium {label}", ok, f"worst deviation gain={gain:.3g}")]
    exact = all(sol.p[n] == market[n].b ** 2 / 4.0 for n in sol.M)
    checks.append(Check(f"nash contributor private spend {label}", exact, f"M={[n + 1 for n in sol.M]}"))
    worst = 0.0
    for n in range(len(market)):
        others = math.fsum(sol.q) - sol.q[n]
        ref = oracle.grid_best_response(market, n, others, p_steps=P_STEPS)
        worst = max(worst, abs(ref - sol.q[n]))
    checks.append(Check(f"nash best responses {label}", worst < RESPONSE_TOL,
                        f"max |q - grid|={worst:.3g}"))
    return checks


def check_bargaining(market: Market) -> list[Check]:
    sol = bargaining.solve_bargaining(market)
    label = _label(market)
    if sol.status == bargaining.DEGENERATE:
        ok = not centralized.has_positive_optimum(market) and sol.Q_star == 0
        return [Check(f"bargaining {label}", ok, "degenerate")]
    checks = []
    above = all(u >= d for u, d in zip(sol.utilities, sol.disagreement))
    checks.append(Check(f"bargaining individual rationality {label}", above,
                        f"min gain={min(u - d for u, d in zip(sol.utilities, sol.disagreement)):.3g}"))
    if len(market) == 2:
        (q1, q2), _ = oracle.grid_bargaining(market, p_steps=P_STEPS)
        err = abs(sol.Q_star - (q1 + q2))
        checks.append(Check(f"bargaining {label}", err < BARGAIN_TOL,
                            f"solver={sol.Q_star:.6f} grid={q1 + q2:.6f}"))
    return checks


def check_market(market: Market) -> list[Check]:
    checks = []
    for name, fn in (("centralized", check_centralized), ("nash", check_nash), ("bargaining", check_bargaining)):
        checks += _guard(f"{name} {_label(market)}", lambda fn=fn: fn(market))
    return checks


def random_markets(seed: int, count: int) -> list[Market]:
    rng = np.random.default_rng(seed)
    psi = rng.uniform(0.05, 6.0, size=(count, 2))
    b = rng.uniform(1.0, 3.0, size=(count, 2))
    return [Market.from_psi(psi[i], b[i]) for i in range(count)]


def run_checks(seed: int = 42, n_random: int = 50) -> list[Check]:
    checks = []
    for psi, b, Q in FIXED_PRIVATE:
        checks += _guard(f"p_star psi={psi} b={b} Q={Q}", lambda: check_private(psi, b, Q))
    for psi, b in FIXED_MARKETS:
        checks += check_market(Market.from_psi(psi, b))
    for market in random_markets(seed, n_random):
        checks += check_market(market)
    return checks


def run_verification(seed: int = 42, n_random: int = 50, out: TextIO | None = None) -> bool:
    """Print one PASS/FAIL line per check and a summary; ``True`` iff all pass."""
    out = out or sys.stdout
    checks = run_checks(seed, n_random)
    for c in checks:
        print(c.line(), file=out)
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} checks passed (seed={seed}, random={n_random})", file=out)
    return failed == 0
