"""
交易 agent：特征空间中凸半代数集（球）的 sigmoid 变换决定参与与购买

g(x) = r² − ‖x − c‖²，belief = σ(k·g(x))。
"""

import logging
from typing import List, Optional, Sequence

import numpy as np
from scipy.spatial import cKDTree
from scipy.special import expit, logit

from exceptions import SchemaMismatchException, ValidationException
from models.agents import AgentState, Genome, RADIUS_MIN, radius_max
from models.claims import LabeledPoint
from models.enums import Asset, Label
from models.market import MarketConfig
from services.code_generator import AgentIdGenerator
from services.lmsr import PRICE_EPSILON, affordable_shares, own_price, purchase_cost

logger = logging.getLogger(__name__)

DEFAULT_STEEPNESS = 50.0
DEFAULT_ANCHOR_JITTER = 0.02
# 只有一个训练点时的半径
FALLBACK_RADIUS = 0.1


def _as_point(genome: Genome, point: Sequence[float]) -> np.ndarray:
    x = np.asarray(point, dtype=float)
    if x.shape != (genome.dimension,):
        raise SchemaMismatchException(genome.dimension, x.size, "feature point")
    return x


def squared_deviations(genome: Genome, point: Sequence[float]) -> np.ndarray:
    """逐坐标 (x_i − c_i)²"""
    x = _as_point(genome, point)
    return (x - np.asarray(genome.center)) ** 2


def membership(genome: Genome, point: Sequence[float]) -> float:
    """g(x) = r² − ‖x − c‖²；内部为正，边界为零，外部为负"""
    return float(genome.radius**2 - squared_deviations(genome, point).sum())


def belief(genome: Genome, point: Sequence[float]) -> float:
    """σ(k·g(x))：agent 认为结果与其资产一致的概率"""
    value = float(expit(genome.steepness * membership(genome, point)))
    return min(max(value, PRICE_EPSILON), 1.0 - PRICE_EPSILON)


def purchase_threshold(genome: Genome, own_price_value: float) -> float:
    """
    购买区域的平方半径

    自身资产价格为 p 时，购买区域为 ‖x − c‖² < r² − σ⁻¹(p)/k（p > 0.5），
    p ≤ 0.5 时参与门槛先起作用，区域即整个球。
    """
    squared_radius = genome.radius**2
    if own_price_value <= 0.5:
        return squared_radius
    return float(squared_radius - logit(own_price_value) / genome.steepness)


def decide(
    agent: AgentState,
    point: Sequence[float],
    market_price_yes: float,
    config: MarketConfig,
) -> Optional[float]:
    """
    购买决策

    同时满足以下条件时买入一个单位（资金不足则买最大可负担的数量，不少于 min_trade）：
    1. g(x) ≥ 0（参与门槛）
    2. belief > 自身资产价格 + margin
    3. 资金足以支付成本

    Returns:
        买入股数；弃权返回 None
    """
    genome = agent.genome
    if membership(genome, point) < 0:
        return None

    p_own = own_price(market_price_yes, genome.asset_class)
    if not belief(genome, point) > p_own + config.margin:
        return None

    if purchase_cost(p_own, config.trade_size, config.liquidity_b) <= agent.cash:
        return config.trade_size

    shares = affordable_shares(p_own, agent.cash, config.liquidity_b)
    if shares >= config.min_trade:
        return shares
    return None


def median_nearest_neighbor_distance(points: np.ndarray) -> Optional[float]:
    """训练点之间最近邻距离的中位数；少于两个点时返回 None"""
    if len(points) < 2:
        return None
    distances, _ = cKDTree(points).query(points, k=2)
    return float(np.median(distances[:, 1]))


def init_population(
    train_points: List[LabeledPoint],
    count: int,
    rng_stream: np.random.Generator,
    steepness: float = DEFAULT_STEEPNESS,
    anchor_jitter: float = DEFAULT_ANCHOR_JITTER,
    id_generator: Optional[AgentIdGenerator] = None,
) -> List[Genome]:
    """
    以训练点为锚点初始化种群

    Args:
        train_points: 带标签的归一化训练点
        count: agent 数
        rng_stream: 随机流
        steepness: 初始 sigmoid 增益
        anchor_jitter: 锚点高斯扰动标准差
        id_generator: 编号生成器，默认从 AG_1 开始

    Returns:
        基因组列表
    """
    if count < 1:
        raise ValidationException(f"population count must be at least 1, got {count}")
    if not train_points:
        raise ValidationException("cannot initialize agents without training points")
    if any(p.label is None for p in train_points):
        raise ValidationException("training points must be labeled")

    id_generator = id_generator or AgentIdGenerator()
    points = np.asarray([p.point for p in train_points], dtype=float)
    dimension = points.shape[1]

    radius = median_nearest_neighbor_distance(points)
    if radius is None:
        radius = FALLBACK_RADIUS
    radius = float(np.clip(radius, RADIUS_MIN, radius_max(dimension)))

    anchors = rng_stream.choice(len(points), size=count, replace=count > len(points))
    genomes = []
    for index in anchors:
        jitter = rng_stream.normal(0.0, anchor_jitter, dimension)
        center = np.clip(points[index] + jitter, 0.0, 1.0)
        label = train_points[index].label
        genomes.append(
            Genome(
                id=id_generator.generate_code(),
                asset_class=Asset.YES if label is Label.REPLICABLE else Asset.NO,
                center=tuple(float(c) for c in center),
                radius=radius,
                steepness=steepness,
            )
        )

    logger.debug(
        f"Initialized {count} agents: radius={radius:.4f}, steepness={steepness}"
    )
    return genomes
