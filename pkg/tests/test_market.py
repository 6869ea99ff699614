import math

import numpy as np
import pytest

from models.enums import Asset
from models.market import MarketConfig
from services.market import run_market
from tests.conftest import make_agent, make_genome

POINT = (0.5, 0.5)


def believer(agent_id, asset, target_belief, radius=0.3):
    """球心在 POINT 上、belief 恰为 target_belief 的 agent"""
    steepness = math.log(target_belief / (1 - target_belief)) / radius**2
    return make_agent(
        make_genome(POINT, radius=radius, asset=asset, steepness=steepness, agent_id=agent_id)
    )


class TestRunMarket:
    """交易协议测试"""

    def test_no_participant_is_unscored(self, market_config):
        """所有 agent 的区域都不含该点：无交易，收盘价 0.5"""
        agents = [
            make_agent(make_genome((0.1, 0.1), radius=0.05, agent_id="AG_1")),
            make_agent(make_genome((0.9, 0.9), radius=0.05, asset=Asset.NO, agent_id="AG_2")),
        ]
        result = run_market(agents, POINT, market_config, np.random.default_rng(0), "C1")
        assert result.ledger == []
        assert result.scored is False
        assert result.close_price_yes == 0.5
        assert result.open_price_yes == 0.5
        assert result.rounds_run == 1
        assert result.holdings == {}

    def test_lone_specialist_stops_at_its_belief(self, market_config):
        """belief 0.9：三次单位买入后价格 e³/(e³+1) ≈ 0.9526，第四轮无交易"""
        agent = believer("AG_1", Asset.YES, 0.9)
        result = run_market([agent], POINT, market_config, np.random.default_rng(0), "C1")

        assert len(result.ledger) == 3
        assert all(t.shares == 1.0 for t in result.ledger)
        assert [t.round for t in result.ledger] == [1, 2, 3]
        assert result.close_price_yes == pytest.approx(math.exp(3) / (math.exp(3) + 1))
        assert result.close_price_yes == pytest.approx(0.9526, abs=1e-4)
        assert result.rounds_run == 4
        assert result.scored is True

        holding = result.holdings["AG_1"]
        assert holding.shares == 3.0
        assert holding.spend == pytest.approx(math.log((math.exp(3) + 1) / 2))
        assert agent.cash + agent.spend == pytest.approx(5.0, abs=1e-9)

    def test_tug_of_war_runs_to_max_rounds(self):
        """对立的两个弱信念 agent 每轮各买一股，价格回到 0.5"""
        config = MarketConfig(max_rounds=3)
        agents = [
            believer("AG_1", Asset.YES, 0.5 + 1e-3, radius=0.1),
            believer("AG_2", Asset.NO, 0.5 + 1e-3, radius=0.1),
        ]
        result = run_market(agents, POINT, config, np.random.default_rng(1), "C1")
        assert result.rounds_run == 3
        assert len(result.ledger) == 6
        assert result.close_price_yes == pytest.approx(0.5, abs=1e-12)

    def test_sampled_participants(self):
        config = MarketConfig(agents_per_market=2)
        agents = [believer(f"AG_{i}", Asset.YES, 0.8) for i in range(1, 6)]
        result = run_market(agents, POINT, config, np.random.default_rng(4), "C1")
        assert len(result.participants) == 2
        assert {t.agent_id for t in result.ledger} <= set(result.participants)

    def test_deterministic(self, market_config):
        def run():
            agents = [
                believer("AG_1", Asset.YES, 0.8),
                believer("AG_2", Asset.NO, 0.7),
                believer("AG_3", Asset.YES, 0.6),
            ]
            return run_market(agents, POINT, market_config, np.random.default_rng(9), "C1")

        first, second = run(), run()
        assert first == second
        assert first.model_dump_json() == second.model_dump_json()

    def test_randomized_properties(self, market_config):
        """10^3 个随机市场：守恒、预算、单一资产、有界损失"""
        rng = np.random.default_rng(123)
        for trial in range(1_000):
            agents = [
                make_agent(
                    make_genome(
                        rng.uniform(0, 1, size=2),
                        radius=float(rng.uniform(0.05, 0.8)),
                        asset=Asset.YES if rng.random() < 0.5 else Asset.NO,
                        steepness=float(10 ** rng.uniform(-1, 3)),
                        agent_id=f"AG_{i + 1}",
                    )
                )
                for i in range(int(rng.integers(1, 6)))
            ]
            point = tuple(rng.uniform(0, 1, size=2))
            result = run_market(agents, point, market_config, rng, f"C{trial}")

            assert result.scored == bool(result.ledger)
            if not result.ledger:
                assert result.close_price_yes == result.open_price_yes
            assert result.revenue == pytest.approx(
                sum(t.cost for t in result.ledger), abs=1e-9
            )
            for agent in agents:
                assert agent.cash >= 0.0
                assert agent.cash + agent.spend == pytest.approx(5.0, abs=1e-9)
                assets = {t.asset for t in result.ledger if t.agent_id == agent.id}
                assert assets <= {agent.genome.asset_class}

            yes_shares = sum(t.shares for t in result.ledger if t.asset is Asset.YES)
            no_shares = sum(t.shares for t in result.ledger if t.asset is Asset.NO)
            assert max(yes_shares, no_shares) - result.revenue <= math.log(2) + 1e-9
