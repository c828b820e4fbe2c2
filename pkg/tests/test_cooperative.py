import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from invest_eq.centralized import has_positive_optimum, solve_centralized
from invest_eq.cooperative import (
    FEASIBLE,
    INFEASIBLE,
    coalition_value,
    deviation_sets,
    deviation_utility,
    investment_incentive,
    satisfies_ordering,
    solve_cooperative,
    stability_margins,
)
from invest_eq.errors import DomainError, ShapeError, SizeError
from invest_eq.model import Market

from conftest import markets

SEVENS = Market.from_psi([7, 7])


@st.composite
def ordered_markets(draw, min_size=2, max_size=4):
    """Markets with psi strictly decreasing, b non-decreasing and every lone CP investing."""
    n = draw(st.integers(min_size, max_size))
    b = sorted(draw(st.lists(st.floats(1.0, 1.6), min_size=n, max_size=n)))
    psi = sorted(draw(st.lists(st.floats(2.5, 10.0), min_size=n, max_size=n, unique=True)), reverse=True)
    m = Market.from_psi(psi, b)
    assume(satisfies_ordering(m))
    assume(all(x - y * y / 2 > 1 + 1e-6 for x, y in zip(psi, b)))
    return m


class TestCoalitionValue:
    def test_examples(self):
        assert coalition_value(SEVENS, []) == 0
        assert coalition_value(SEVENS, [0]) == 5.5
        assert coalition_value(SEVENS, [0, 1]) == pytest.approx(12.75, abs=1e-9)

    def test_bad_member(self):
        with pytest.raises(DomainError):
            coalition_value(SEVENS, [2])

    @given(markets(min_size=2, max_size=4), st.data())
    def test_monotone(self, m, data):
        N = len(m)
        J = data.draw(st.sets(st.integers(0, N - 1)))
        I = data.draw(st.sets(st.sampled_from(sorted(J)))) if J else set()
        assert coalition_value(m, I) <= coalition_value(m, J) + 1e-9

    @given(markets(max_size=1))
    def test_singleton_matches_solver(self, m):
        assert coalition_value(m, [0]) == pytest.approx(solve_centralized(m).Q_star, abs=1e-9)


class TestDeviation:
    def test_free_rider(self):
        assert deviation_utility(SEVENS, 1, [0]) == pytest.approx(7 * math.log(7) - 0.25, rel=1e-12)

    def test_lone_investor(self):
        assert deviation_utility(SEVENS, 0, [0]) == pytest.approx(7 * math.log(7) - 5.75, rel=1e-12)

    def test_nobody_invests(self):
        m = Market.from_psi([4, 4])
        assert deviation_utility(m, 0, []) == pytest.approx(4 * math.log(2) - 1, rel=1e-12)

    def test_sets_order(self):
        assert deviation_sets([0, 1, 2]) == [
            frozenset(), frozenset({0}), frozenset({1}), frozenset({2}),
            frozenset({0, 1}), frozenset({0, 2}), frozenset({1, 2}),
        ]
        assert deviation_sets([0, 1, 2], prune=True) == [
            frozenset(), frozenset({0}), frozenset({0, 1}), frozenset({0, 2}), frozenset({1, 2}),
        ]


class TestMargins:
    def test_symmetric_unstable(self):
        margins = stability_margins(SEVENS, [6.375, 6.375])
        m = {(n, I): v for n, I, v in margins}
        # grand utility 7 ln 14 - 6.4375 against free riding 7 ln 7 - 0.25
        assert m[(1, frozenset({0}))] == pytest.approx(7 * math.log(2) - 6.1875, rel=1e-12)
        assert m[(1, frozenset({0}))] < 0

    def test_single_cp(self):
        m = Market.from_psi([4])
        [(n, I, v)] = stability_margins(m, [solve_centralized(m).Q_star])
        assert I == frozenset() and v > 0

    @given(markets(), st.integers(0, 2**32 - 1))
    def test_against_nobody_positive_at_optimum(self, m, seed):
        assume(has_positive_optimum(m))
        Q = solve_centralized(m).Q_star
        assume(Q > 1e-6)
        w = np.random.default_rng(seed).dirichlet(np.ones(len(m)))
        q = list(w * Q)
        assume(min(q) > 0)
        total = [v for n, I, v in stability_margins(m, q) if not I]
        # the optimum beats Q = 0 in total, not necessarily for every CP
        assert math.fsum(total) > 0

    def test_input_checks(self):
        with pytest.raises(ShapeError):
            stability_margins(SEVENS, [1.0])
        with pytest.raises(DomainError):
            stability_margins(SEVENS, [1.0, 0.0])


class TestSolve:
    def test_symmetric_infeasible(self):
        sol = solve_cooperative(SEVENS)
        assert sol.status == INFEASIBLE and not sol.feasible
        assert sol.q is None
        assert sol.Q_star == pytest.approx(12.75, abs=1e-9)
        # cap = 7 ln 14 - 1/16 - (7 ln 7 - 1/4)
        assert sol.caps == pytest.approx((7 * math.log(2) + 0.1875,) * 2, rel=1e-9)
        assert sum(sol.caps) < sol.Q_star
        assert sol.binding_constraints == ((0, frozenset({1})), (1, frozenset({0})))

    def test_single_cp(self):
        sol = solve_cooperative(Market.from_psi([4]))
        assert sol.status == FEASIBLE
        assert sol.q == pytest.approx((2.5,), abs=1e-9)

    def test_corner_infeasible(self):
        assert solve_cooperative(Market.from_psi([0.1, 0.1])).status == INFEASIBLE

    def test_bad_epsilon(self):
        with pytest.raises(DomainError):
            solve_cooperative(SEVENS, epsilon=0)

    def test_size_limit(self):
        m = Market.from_psi([3.0] * 13)
        with pytest.raises(SizeError):
            solve_cooperative(m)
        with pytest.raises(SizeError):
            stability_margins(m, [0.1] * 13)

    def test_delta_scan_reaches_feasibility(self):
        statuses = []
        for delta in np.arange(0, 1.51, 0.05):
            m = Market.from_psi([7, 7 * 2.0 ** -delta])
            sol = solve_cooperative(m)
            statuses.append(sol.status)
            if sol.feasible:
                assert sol.q[1] < sol.q[0]
        assert statuses[0] == INFEASIBLE
        assert FEASIBLE in statuses

    @given(markets(max_size=3))
    def test_feasible_solutions(self, m):
        eps = 1e-6
        sol = solve_cooperative(m, epsilon=eps)
        if not sol.feasible:
            return
        central = solve_centralized(m)
        assert sol.total_utility == pytest.approx(central.total_utility, abs=1e-8)
        assert math.fsum(sol.q) == pytest.approx(central.Q_star, abs=1e-8)
        assert min(sol.q) >= eps
        assert all(v > 0 for _, _, v in stability_margins(m, sol.q, epsilon=eps))

    @given(ordered_markets())
    def test_singleton_incentive(self, m):
        for i in range(1, len(m)):
            for k in range(i):
                assert investment_incentive(m, k, [i]) > 0
