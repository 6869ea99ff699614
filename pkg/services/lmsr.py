"""
LMSR 做市商（二元资产）

成本函数 C(q) = b·ln(e^{q_yes/b} + e^{q_no/b})，价格为 softmax(q/b)。
购买成本全部在对数空间计算，避免极端状态下溢出或精度损失。
"""

import logging

import numpy as np
from scipy.special import expit, log_expit, logit

from exceptions import ValidationException
from models.enums import Asset, Label
from models.market import MarketState, TradeRecord

logger = logging.getLogger(__name__)

# 价格限制在 (0,1) 内部：[2^-53, 1 - 2^-53]
PRICE_EPSILON = float(np.finfo(float).epsneg)


def _clamp_price(value: float) -> float:
    return float(min(max(value, PRICE_EPSILON), 1.0 - PRICE_EPSILON))


def _log_expm1(y: float) -> float:
    """ln(e^y − 1)，y > 0"""
    return float(y + np.log(-np.expm1(-y)))


def _own_logit(state: MarketState, asset: Asset) -> float:
    """(q_own − q_other) / b"""
    diff = state.q_yes - state.q_no
    if asset is Asset.NO:
        diff = -diff
    return diff / state.liquidity_b


def new_market(liquidity_b: float, initial_price_yes: float) -> MarketState:
    """
    创建市场，使 Yes 初始价格等于 initial_price_yes

    q_yes = b·ln(p/(1−p))，q_no = 0
    """
    if not liquidity_b > 0:
        raise ValidationException(f"liquidity_b must be positive, got {liquidity_b}")
    if not 0.0 < initial_price_yes < 1.0:
        raise ValidationException(
            f"initial price must lie in (0,1), got {initial_price_yes}"
        )
    q_yes = float(liquidity_b * logit(initial_price_yes))
    return MarketState(
        q_yes=q_yes, q_no=0.0, liquidity_b=liquidity_b, q0_yes=q_yes, q0_no=0.0
    )


def price_yes(state: MarketState) -> float:
    """will replicate 资产价格"""
    return _clamp_price(expit(_own_logit(state, Asset.YES)))


def price_no(state: MarketState) -> float:
    """will not replicate 资产价格"""
    return 1.0 - price_yes(state)


def own_price(price_yes_value: float, asset: Asset) -> float:
    """以 agent 自身资产计价的价格"""
    return price_yes_value if asset is Asset.YES else 1.0 - price_yes_value


def cost(state: MarketState) -> float:
    """LMSR 势函数 C(q)"""
    b = state.liquidity_b
    return float(b * np.logaddexp(state.q_yes / b, state.q_no / b))


def _cost_from_log_price(log_price: float, shares: float, liquidity_b: float) -> float:
    # C(q + Δ·e_own) − C(q) = b·ln(1 + p_own·(e^{Δ/b} − 1))
    return float(
        liquidity_b
        * np.logaddexp(0.0, log_price + _log_expm1(shares / liquidity_b))
    )


def purchase_cost(own_price_value: float, shares: float, liquidity_b: float) -> float:
    """只依赖自身资产价格的购买成本"""
    if not shares > 0:
        raise ValidationException(f"shares must be positive, got {shares}")
    return _cost_from_log_price(float(np.log(own_price_value)), shares, liquidity_b)


def cost_to_buy(state: MarketState, asset: Asset, shares: float) -> float:
    """买入 shares 股 asset 的成本"""
    if not shares > 0:
        raise ValidationException(f"shares must be positive, got {shares}")
    log_price = float(log_expit(_own_logit(state, asset)))
    return _cost_from_log_price(log_price, shares, state.liquidity_b)


def affordable_shares(own_price_value: float, cash: float, liquidity_b: float) -> float:
    """
    cash 恰好能买到的股数（成本函数的闭式反函数）

    Δ = b·ln(1 + (e^{cash/b} − 1) / p_own)
    """
    if not cash > 0:
        return 0.0
    log_price = float(np.log(own_price_value))
    shares = float(
        liquidity_b * np.logaddexp(0.0, _log_expm1(cash / liquidity_b) - log_price)
    )
    # 舍入误差可能让成本略超出 cash
    while shares > 0 and _cost_from_log_price(log_price, shares, liquidity_b) > cash:
        shares *= 1.0 - 1e-12
    return shares


def max_affordable_shares(state: MarketState, asset: Asset, cash: float) -> float:
    """当前状态下 cash 能买到的最大股数"""
    return affordable_shares(
        own_price(price_yes(state), asset), cash, state.liquidity_b
    )


def price_after_buy(state: MarketState, asset: Asset, shares: float) -> float:
    """假设成交后的 Yes 价格（不修改状态）"""
    delta = shares if asset is Asset.YES else -shares
    return _clamp_price(expit((state.q_yes - state.q_no + delta) / state.liquidity_b))


def execute_buy(
    state: MarketState, agent_id: str, asset: Asset, shares: float, round: int
) -> TradeRecord:
    """
    执行一笔买入，更新流通股数与收入

    资金是否充足由调用方检查。
    """
    trade_cost = cost_to_buy(state, asset, shares)
    before = price_yes(state)
    if asset is Asset.YES:
        state.q_yes += shares
    else:
        state.q_no += shares
    state.revenue += trade_cost
    after = price_yes(state)
    return TradeRecord(
        agent_id=agent_id,
        round=round,
        asset=asset,
        shares=shares,
        cost=trade_cost,
        price_before=before,
        price_after=after,
    )


def payout(state: MarketState, label: Label) -> float:
    """结算时做市商需兑付的总额（开盘后售出的获胜资产股数）"""
    if label.winning_asset is Asset.YES:
        return state.q_yes - state.q0_yes
    return state.q_no - state.q0_no
