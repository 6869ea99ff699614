"""
按轮次的交易协议

每轮以随机顺序询问每个 agent，买入立即成交并改变后续 agent 看到的价格；
某一轮无人交易时收盘。
"""

import logging
from typing import Dict, List, Optional, Sequence

import numpy as np

from models.agents import AgentState
from models.market import Holding, MarketConfig, MarketResult, TradeRecord
from services.agents import decide
from services.lmsr import execute_buy, new_market, price_after_buy, price_yes

logger = logging.getLogger(__name__)


def _select_agents(
    agents: List[AgentState], config: MarketConfig, rng_stream: np.random.Generator
) -> List[AgentState]:
    """agents_per_market 小于种群规模时抽样参与者（保持原顺序）"""
    k = config.agents_per_market
    if k is None or k >= len(agents):
        return list(agents)
    picked = rng_stream.choice(len(agents), size=k, replace=False)
    return [agents[i] for i in sorted(picked)]


def _holdings(agents: List[AgentState], ledger: List[TradeRecord]) -> Dict[str, Holding]:
    traded = {record.agent_id for record in ledger}
    return {
        agent.id: Holding(
            asset=agent.genome.asset_class,
            shares=agent.shares_held,
            spend=agent.spend,
        )
        for agent in agents
        if agent.id in traded
    }


def run_market(
    agents: List[AgentState],
    point: Sequence[float],
    config: MarketConfig,
    rng_stream: np.random.Generator,
    claim_id: Optional[str] = None,
) -> MarketResult:
    """
    对一个特征点运行市场

    Args:
        agents: 已按初始资金初始化的 agent（会被就地更新）
        point: 归一化特征点
        config: 市场参数
        rng_stream: 本市场私有随机流
        claim_id: 用于日志与结果

    Returns:
        收盘结果；无人交易时 scored=False，收盘价等于开盘价
    """
    state = new_market(config.liquidity_b, config.initial_price)
    open_price = price_yes(state)
    participants = _select_agents(agents, config, rng_stream)
    ledger: List[TradeRecord] = []
    rounds_run = 0

    for round_index in range(1, config.max_rounds + 1):
        rounds_run = round_index
        trades_this_round = 0
        for position in rng_stream.permutation(len(participants)):
            agent = participants[position]
            current = price_yes(state)
            shares = decide(agent, point, current, config)
            if shares is None:
                continue
            asset = agent.genome.asset_class
            # 数值饱和时价格已无法移动
            if price_after_buy(state, asset, shares) == current:
                continue

            record = execute_buy(state, agent.id, asset, shares, round_index)
            agent.cash = max(agent.cash - record.cost, 0.0)
            agent.shares_held += record.shares
            agent.spend += record.cost
            ledger.append(record)
            trades_this_round += 1
            logger.debug(
                f"[{claim_id}] round {round_index}: {agent.id} bought "
                f"{record.shares:.4f} {asset.value} for {record.cost:.4f} "
                f"({record.price_before:.4f} -> {record.price_after:.4f})"
            )
        if trades_this_round == 0:
            break

    close_price = price_yes(state) if ledger else open_price
    return MarketResult(
        claim_id=claim_id,
        open_price_yes=open_price,
        close_price_yes=close_price,
        ledger=ledger,
        scored=bool(ledger),
        rounds_run=rounds_run,
        revenue=state.revenue,
        holdings=_holdings(participants, ledger),
        participants=[agent.id for agent in participants],
    )
