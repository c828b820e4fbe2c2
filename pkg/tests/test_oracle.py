import numpy as np
import pytest

from invest_eq.bargaining import solve_bargaining
from invest_eq.errors import DomainError, SizeError
from invest_eq.model import CpParams, Market, p_star
from invest_eq.oracle import (
    GridSpec,
    grid_argmax_p,
    grid_bargaining,
    grid_best_response,
    grid_centralized,
)


class TestGridSpec:
    def test_points(self):
        g = GridSpec(0.0, 1.0, 11)
        assert g.step == pytest.approx(0.1)
        assert g.points()[[0, -1]].tolist() == [0.0, 1.0]

    @pytest.mark.parametrize("args", [(1.0, 1.0, 5), (2.0, 1.0, 5), (0.0, 1.0, 1)])
    def test_invalid(self, args):
        with pytest.raises(DomainError):
            GridSpec(*args)


class TestArgmaxP:
    def test_examples(self):
        cp = CpParams.from_psi(4, 1)
        grid = GridSpec(0.0, 10.0, 10001)
        assert grid_argmax_p(cp, 0.0, grid) == pytest.approx(1.0, abs=1e-3)
        assert grid_argmax_p(cp, 2.5, grid) == pytest.approx(0.25, abs=1e-3)
        assert grid_argmax_p(CpParams(0.0, 1.0), 0.0) == 0.0

    def test_negative_Q(self):
        with pytest.raises(DomainError):
            grid_argmax_p(CpParams.from_psi(1), -1.0)

    def test_agrees_with_closed_form(self, rng):
        for _ in range(20):
            cp = CpParams.from_psi(rng.uniform(0.01, 10), rng.uniform(1, 3))
            Q = rng.uniform(0, 10)
            assert grid_argmax_p(cp, Q) == pytest.approx(p_star(cp, Q), abs=1e-3)


class TestCentralized:
    @pytest.mark.parametrize("psi,b,Q", [([4], [1], 2.5), ([2, 2], [1, 1], 2.75), ([0.1, 0.1], [1, 1], 0.0)])
    def test_examples(self, psi, b, Q):
        got, _ = grid_centralized(Market.from_psi(psi, b))
        assert got == pytest.approx(Q, abs=1e-3)

    def test_size_limit(self):
        with pytest.raises(SizeError):
            grid_centralized(Market.from_psi([1, 1, 1, 1]))


class TestBestResponse:
    def test_examples(self):
        assert grid_best_response(Market.from_psi([2]), 0, 0.0) == pytest.approx(0.5, abs=1e-3)
        assert grid_best_response(Market.from_psi([1.2]), 0, 0.0) == 0.0
        assert grid_best_response(Market.from_psi([2]), 0, 0.5) == pytest.approx(0.0, abs=1e-3)

    def test_negative_others(self):
        with pytest.raises(DomainError):
            grid_best_response(Market.from_psi([2]), 0, -1.0)


class TestBargaining:
    def test_symmetric(self):
        (q1, q2), value = grid_bargaining(Market.from_psi([2, 2]))
        assert q1 == pytest.approx(1.375, abs=2e-3)
        assert q2 == pytest.approx(1.375, abs=2e-3)
        assert value > 0

    def test_below_threshold(self):
        assert grid_bargaining(Market.from_psi([0.3, 0.3], [2, 2])) == ((0.0, 0.0), 0.0)

    def test_asymmetric(self):
        m = Market.from_psi([5, 0.8])
        (q1, q2), _ = grid_bargaining(m)
        assert q2 == pytest.approx(0.0, abs=2e-3)
        assert q1 + q2 == pytest.approx(solve_bargaining(m).Q_star, abs=2e-3)

    def test_size(self):
        with pytest.raises(SizeError):
            grid_bargaining(Market.from_psi([2, 2, 2]))
