"""
种群进化训练

个体适应度 = 本代所有训练市场上的总利润（删除不盈利的 agent）；
系统目标 = 收盘价的训练 RMSE（保存 RMSE 最小的种群快照）。
"""

import logging
import math
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed

from exceptions import ValidationException
from models.agents import (
    AgentState,
    Genome,
    RADIUS_MIN,
    STEEPNESS_MAX,
    STEEPNESS_MIN,
    radius_max,
)
from models.claims import LabeledPoint, NormalizationParams
from models.enums import Label, SelectionScheme
from models.evolution import EvolutionConfig, GenerationStats, TrainedModel
from models.market import MarketConfig, MarketResult
from services.agents import init_population
from services.code_generator import AgentIdGenerator
from services.market import run_market
from utils.base import derive_rng

logger = logging.getLogger(__name__)


def _run_training_market(
    population: List[Genome],
    claim: LabeledPoint,
    market_config: MarketConfig,
    master_seed: int,
    generation_index: int,
) -> MarketResult:
    """单个训练市场：资金与持仓每个市场重置"""
    agents = [AgentState.fresh(g, market_config.initial_cash) for g in population]
    rng = derive_rng(master_seed, "market", generation_index, claim.claim_id)
    return run_market(agents, claim.point, market_config, rng, claim_id=claim.claim_id)


def claim_profits(result: MarketResult, label: Label) -> Dict[str, float]:
    """收盘结算：获胜资产每股兑付 1，利润 = 兑付 − 花费"""
    profits = {}
    for agent_id, holding in result.holdings.items():
        paid = holding.shares if holding.asset is label.winning_asset else 0.0
        profits[agent_id] = paid - holding.spend
    return profits


class EvolutionService:
    """进化训练服务"""

    def __init__(self, config: EvolutionConfig):
        self.config = config
        self.market_config = config.market_config()

    # ------------------------------------------------------------------ 评估

    def run_markets(
        self,
        population: List[Genome],
        claims: Sequence[LabeledPoint],
        generation_index: int,
    ) -> List[MarketResult]:
        """并行运行每个训练 claim 的市场，结果按 claim id 排序"""
        ordered = sorted(claims, key=lambda c: c.claim_id)
        return Parallel(n_jobs=self.config.jobs)(
            delayed(_run_training_market)(
                population,
                claim,
                self.market_config,
                self.config.master_seed,
                generation_index,
            )
            for claim in ordered
        )

    def evaluate_generation(
        self,
        population: List[Genome],
        train_claims: Sequence[LabeledPoint],
        generation_index: int,
    ) -> GenerationStats:
        """
        评估一代：每个训练 claim 运行一个市场，汇总利润、RMSE 与覆盖率

        未评分的 claim 以初始价格参与 RMSE。
        """
        if not population:
            raise ValidationException("population is empty")
        if not train_claims:
            raise ValidationException("no training claims to evaluate on")
        labels = {claim.claim_id: claim.label for claim in train_claims}
        if any(label is None for label in labels.values()):
            raise ValidationException("training claims must be labeled")

        results = self.run_markets(population, train_claims, generation_index)

        profits = {genome.id: 0.0 for genome in population}
        squared_errors = []
        scored = 0
        trades = 0
        for result in results:
            label = labels[result.claim_id]
            for agent_id, profit in claim_profits(result, label).items():
                profits[agent_id] += profit
            squared_errors.append((result.close_price_yes - label.outcome) ** 2)
            scored += int(result.scored)
            trades += len(result.ledger)

        return GenerationStats(
            generation=generation_index,
            profits=profits,
            rmse=float(math.sqrt(np.mean(squared_errors))),
            coverage=scored / len(results),
            survivor_count=sum(1 for p in profits.values() if p > 0),
            trades=trades,
        )

    # ------------------------------------------------------------------ 繁殖

    def _pick_parent(
        self,
        survivors: List[Genome],
        weights: np.ndarray,
        rng_stream: np.random.Generator,
    ) -> Genome:
        if self.config.selection is SelectionScheme.TOURNAMENT:
            entrants = rng_stream.integers(
                len(survivors), size=self.config.tournament_size
            )
            return survivors[max(entrants, key=lambda i: (weights[i], -i))]
        index = rng_stream.choice(len(survivors), p=weights / weights.sum())
        return survivors[index]

    @staticmethod
    def crossover(
        parent_a: Genome,
        parent_b: Genome,
        rng_stream: np.random.Generator,
        child_id: str,
        alpha: Optional[float] = None,
    ) -> Genome:
        """
        均匀交叉：球心按 α·c₁ + (1−α)·c₂ 混合，其余参数各自随机继承一方
        """
        if alpha is None:
            alpha = float(rng_stream.uniform())
        center = alpha * np.asarray(parent_a.center) + (1.0 - alpha) * np.asarray(
            parent_b.center
        )
        parents = (parent_a, parent_b)
        return Genome(
            id=child_id,
            asset_class=parents[rng_stream.integers(2)].asset_class,
            center=tuple(float(c) for c in np.clip(center, 0.0, 1.0)),
            radius=parents[rng_stream.integers(2)].radius,
            steepness=parents[rng_stream.integers(2)].steepness,
        )

    def mutate(self, genome: Genome, rng_stream: np.random.Generator) -> Genome:
        """高斯变异球心，对数正态变异半径与增益，按概率翻转资产类别"""
        config = self.config
        dimension = genome.dimension
        center = np.clip(
            np.asarray(genome.center)
            + rng_stream.normal(0.0, config.mutation_sigma_center, dimension),
            0.0,
            1.0,
        )
        radius = genome.radius * math.exp(
            rng_stream.normal(0.0, config.mutation_log_sigma)
        )
        steepness = genome.steepness * math.exp(
            rng_stream.normal(0.0, config.mutation_log_sigma)
        )
        asset = genome.asset_class
        if rng_stream.random() < config.asset_flip_probability:
            asset = asset.opposite

        return Genome(
            id=genome.id,
            asset_class=asset,
            center=tuple(float(c) for c in center),
            radius=float(np.clip(radius, RADIUS_MIN, radius_max(dimension))),
            steepness=float(np.clip(steepness, STEEPNESS_MIN, STEEPNESS_MAX)),
        )

    def select_and_reproduce(
        self,
        population: List[Genome],
        stats: GenerationStats,
        rng_stream: np.random.Generator,
        train_claims: Sequence[LabeledPoint],
    ) -> List[Genome]:
        """
        保留利润为正的 agent，其余位置由后代补足

        没有幸存者时以新的训练锚点重新初始化整个种群。
        """
        size = self.config.population_size
        id_generator = AgentIdGenerator.from_existing(g.id for g in population)
        survivors = [g for g in population if stats.profits.get(g.id, 0.0) > 0]

        if not survivors:
            logger.info(
                f"Generation {stats.generation}: no profitable agents, reinitializing"
            )
            return init_population(
                list(train_claims),
                size,
                rng_stream,
                steepness=self.config.initial_steepness,
                anchor_jitter=self.config.anchor_jitter,
                id_generator=id_generator,
            )

        weights = np.array([stats.profits[g.id] for g in survivors], dtype=float)
        offspring = []
        while len(survivors) + len(offspring) < size:
            parent_a = self._pick_parent(survivors, weights, rng_stream)
            parent_b = self._pick_parent(survivors, weights, rng_stream)
            child = self.crossover(
                parent_a, parent_b, rng_stream, id_generator.generate_code()
            )
            offspring.append(self.mutate(child, rng_stream))

        return survivors + offspring

    # ------------------------------------------------------------------ 训练

    def train(
        self,
        train_claims: Sequence[LabeledPoint],
        normalizer: NormalizationParams,
        on_generation: Optional[Callable[[GenerationStats], None]] = None,
    ) -> Tuple[TrainedModel, List[GenerationStats]]:
        """
        训练种群

        共评估 generations + 1 次、繁殖 generations 次；
        返回 RMSE 最小的那一代种群快照及每代统计。
        """
        config = self.config
        labels = {claim.label for claim in train_claims}
        if len(train_claims) < 2:
            raise ValidationException("training needs at least 2 labeled claims")
        if None in labels:
            raise ValidationException("training claims must be labeled")
        if labels != {Label.REPLICABLE, Label.NOT_REPLICABLE}:
            raise ValidationException(
                "training set contains a single class; both Replicable and "
                "NotReplicable claims are required"
            )

        population = init_population(
            list(train_claims),
            config.population_size,
            derive_rng(config.master_seed, "init"),
            steepness=config.initial_steepness,
            anchor_jitter=config.anchor_jitter,
        )

        best_rmse = math.inf
        best_generation = 0
        best_population = population
        history: List[GenerationStats] = []

        for generation in range(config.generations + 1):
            stats = self.evaluate_generation(population, train_claims, generation)
            if stats.rmse < best_rmse:
                best_rmse = stats.rmse
                best_generation = generation
                best_population = population
            stats = stats.model_copy(update={"best_rmse": best_rmse})
            history.append(stats)
            logger.info(
                f"Generation {generation}: rmse={stats.rmse:.4f} "
                f"coverage={stats.coverage:.3f} survivors={stats.survivor_count} "
                f"best={best_rmse:.4f}"
            )
            if on_generation is not None:
                on_generation(stats)

            if generation < config.generations:
                population = self.select_and_reproduce(
                    population,
                    stats,
                    derive_rng(config.master_seed, "reproduce", generation),
                    train_claims,
                )

        model = TrainedModel(
            genomes=best_population,
            normalizer=normalizer,
            config=config,
            best_generation=best_generation,
            best_rmse=best_rmse,
            feature_names=list(normalizer.feature_names),
        )
        return model, history


def get_evolution_service(config: EvolutionConfig) -> EvolutionService:
    """获取进化训练服务实例"""
    return EvolutionService(config)
