import math

import numpy as np
import pytest

from exceptions import ValidationException
from models.enums import Asset, Label
from models.market import MarketState
from services import lmsr


def state_at(q_yes, q_no, b=1.0):
    return MarketState(q_yes=q_yes, q_no=q_no, liquidity_b=b)


class TestPricing:
    """价格函数测试"""

    def test_symmetric_market(self):
        state = lmsr.new_market(1.0, 0.5)
        assert (state.q_yes, state.q_no) == (0.0, 0.0)
        assert lmsr.price_yes(state) == 0.5

    def test_price_at_unit_quantity(self):
        """q = (1,0), b = 1 -> e/(e+1)"""
        assert lmsr.price_yes(state_at(1.0, 0.0)) == pytest.approx(
            math.e / (math.e + 1), abs=1e-12
        )
        assert lmsr.price_yes(state_at(1.0, 0.0)) == pytest.approx(0.731058, abs=1e-6)

    def test_initial_price_inverts(self):
        state = lmsr.new_market(1.0, math.e / (math.e + 1))
        assert state.q_yes == pytest.approx(1.0, abs=1e-9)
        assert state.q_no == 0.0
        assert lmsr.new_market(1.0, 0.7311).q_yes == pytest.approx(1.0, abs=1e-3)

    def test_saturated_state_stays_inside_unit_interval(self):
        """q = (1000, 0) 不溢出，价格严格小于 1"""
        price = lmsr.price_yes(state_at(1000.0, 0.0))
        assert math.isfinite(price)
        assert 0.0 < price < 1.0
        assert price == 1.0 - lmsr.PRICE_EPSILON
        assert 0.0 < lmsr.price_yes(state_at(0.0, 1000.0)) < 1.0

    def test_liquidity_dampens_price_moves(self):
        moves = []
        for b in (1.0, 5.0):
            state = lmsr.new_market(b, 0.5)
            lmsr.execute_buy(state, "AG_1", Asset.YES, 1.0, 1)
            moves.append(lmsr.price_yes(state) - 0.5)
        assert moves[1] < moves[0]

    def test_invalid_markets(self):
        for price in (0.0, 1.0, -0.2, 1.5):
            with pytest.raises(ValidationException):
                lmsr.new_market(1.0, price)
        with pytest.raises(ValidationException):
            lmsr.new_market(0.0, 0.5)

    def test_randomized_price_normalization(self):
        """10^5 个随机状态：price_yes + price_no = 1，且严格在 (0,1) 内"""
        rng = np.random.default_rng(2024)
        qs = rng.uniform(-50, 50, size=(100_000, 2))
        bs = rng.uniform(0.1, 10, size=100_000)
        for (q_yes, q_no), b in zip(qs, bs):
            state = state_at(float(q_yes), float(q_no), float(b))
            p_yes = lmsr.price_yes(state)
            assert 0.0 < p_yes < 1.0
            assert abs(p_yes + lmsr.price_no(state) - 1.0) <= 1e-12


class TestCost:
    """成本函数测试"""

    def test_unit_buy_from_symmetric_state(self):
        """ln((e+1)/2) ≈ 0.620115"""
        cost = lmsr.cost_to_buy(state_at(0.0, 0.0), Asset.YES, 1.0)
        assert cost == pytest.approx(math.log((math.e + 1) / 2), rel=1e-12)
        assert cost == pytest.approx(0.620115, abs=1e-6)

    def test_split_buy_equals_single_buy(self):
        first = lmsr.cost_to_buy(state_at(0.0, 0.0), Asset.YES, 1.0)
        second = lmsr.cost_to_buy(state_at(1.0, 0.0), Asset.YES, 1.0)
        both = lmsr.cost_to_buy(state_at(0.0, 0.0), Asset.YES, 2.0)
        assert first + second == pytest.approx(both, abs=1e-12)

    def test_tiny_buy_costs_marginal_price(self):
        epsilon = 1e-9
        cost = lmsr.cost_to_buy(state_at(0.0, 0.0), Asset.YES, epsilon)
        assert cost == pytest.approx(epsilon * 0.5, rel=1e-8)

    def test_non_positive_shares(self):
        for shares in (0.0, -1.0):
            with pytest.raises(ValidationException):
                lmsr.cost_to_buy(state_at(0.0, 0.0), Asset.YES, shares)

    def test_randomized_cost_properties(self):
        """路径无关、成本 ∈ (0, shares)、边际价格 = 成本导数"""
        rng = np.random.default_rng(7)
        for _ in range(10_000):
            q_yes, q_no = rng.uniform(-50, 50, size=2)
            b = float(rng.uniform(0.1, 10))
            asset = Asset.YES if rng.random() < 0.5 else Asset.NO
            first, second = rng.uniform(0.01, 5, size=2)
            state = state_at(float(q_yes), float(q_no), b)

            c1 = lmsr.cost_to_buy(state, asset, float(first))
            if asset is Asset.YES:
                moved = state_at(state.q_yes + float(first), state.q_no, b)
            else:
                moved = state_at(state.q_yes, state.q_no + float(first), b)
            c2 = lmsr.cost_to_buy(moved, asset, float(second))
            total = lmsr.cost_to_buy(state, asset, float(first + second))
            assert abs(c1 + c2 - total) <= 1e-9

            # 价格饱和时成本在浮点下退化为 0 或 shares
            p_own = lmsr.own_price(lmsr.price_yes(state), asset)
            if 1e-6 < p_own < 1 - 1e-6:
                assert 0.0 < c1 < first
            else:
                assert 0.0 <= c1 <= first

        for _ in range(10_000):
            q_yes, q_no = rng.uniform(-50, 50, size=2)
            b = float(rng.uniform(0.1, 10))
            h = 1e-5
            up = lmsr.cost(state_at(float(q_yes) + h, float(q_no), b))
            down = lmsr.cost(state_at(float(q_yes) - h, float(q_no), b))
            price = lmsr.price_yes(state_at(float(q_yes), float(q_no), b))
            assert abs((up - down) / (2 * h) - price) <= 1e-6

    def test_affordable_shares_spend_the_cash(self):
        rng = np.random.default_rng(3)
        for _ in range(1_000):
            state = state_at(*[float(v) for v in rng.uniform(-5, 5, size=2)])
            asset = Asset.YES if rng.random() < 0.5 else Asset.NO
            cash = float(rng.uniform(0.01, 5))
            shares = lmsr.max_affordable_shares(state, asset, cash)
            cost = lmsr.cost_to_buy(state, asset, shares)
            assert cost <= cash * (1 + 1e-12)
            assert cost == pytest.approx(cash, rel=1e-9)

    def test_no_cash_buys_nothing(self):
        assert lmsr.affordable_shares(0.5, 0.0, 1.0) == 0.0


class TestExecuteBuy:
    """成交测试"""

    def test_trade_record(self):
        state = lmsr.new_market(1.0, 0.5)
        record = lmsr.execute_buy(state, "AG_1", Asset.YES, 1.0, 1)
        assert record.cost == pytest.approx(0.620115, abs=1e-6)
        assert record.price_before == 0.5
        assert record.price_after == pytest.approx(0.731058, abs=1e-6)
        assert (state.q_yes, state.q_no) == (1.0, 0.0)

    def test_opposite_buy_restores_price_and_revenue_is_one(self):
        """C(1,1) − C(0,0) = 1"""
        state = lmsr.new_market(1.0, 0.5)
        lmsr.execute_buy(state, "AG_1", Asset.YES, 1.0, 1)
        record = lmsr.execute_buy(state, "AG_2", Asset.NO, 1.0, 1)
        assert record.price_after == pytest.approx(0.5, abs=1e-15)
        assert state.revenue == pytest.approx(1.0, abs=1e-12)

    def test_payout(self):
        state = lmsr.new_market(1.0, 0.5)
        lmsr.execute_buy(state, "AG_1", Asset.YES, 2.0, 1)
        lmsr.execute_buy(state, "AG_2", Asset.NO, 0.5, 1)
        assert lmsr.payout(state, Label.REPLICABLE) == 2.0
        assert lmsr.payout(state, Label.NOT_REPLICABLE) == 0.5

    def test_randomized_conservation_and_bounded_loss(self):
        """收入 = C(q_close) − C(q_open)，做市商损失 ≤ b·ln 2"""
        rng = np.random.default_rng(11)
        for _ in range(1_000):
            b = float(rng.uniform(0.1, 10))
            state = lmsr.new_market(b, 0.5)
            opening = lmsr.cost(state)
            costs = 0.0
            for step in range(int(rng.integers(1, 20))):
                asset = Asset.YES if rng.random() < 0.5 else Asset.NO
                shares = float(rng.uniform(0.01, 3))
                if lmsr.price_after_buy(state, asset, shares) == lmsr.price_yes(state):
                    continue
                costs += lmsr.execute_buy(state, "AG_1", asset, shares, step).cost
            assert abs(state.revenue - (lmsr.cost(state) - opening)) <= 1e-9
            assert abs(state.revenue - costs) <= 1e-9
            for label in Label:
                assert lmsr.payout(state, label) - state.revenue <= b * math.log(2) + 1e-9
