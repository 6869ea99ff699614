import math

import numpy as np
import pytest

from exceptions import SchemaMismatchException, ValidationException
from models.agents import AgentState, Genome, RADIUS_MIN
from models.claims import LabeledPoint
from models.enums import Asset, Label
from models.market import MarketConfig
from services.agents import (
    FALLBACK_RADIUS,
    belief,
    decide,
    init_population,
    membership,
    purchase_threshold,
)
from services.code_generator import AgentIdGenerator
from tests.conftest import make_agent, make_genome


def oracle_decision(genome, point, price_yes, cash, config):
    """逐条件的独立实现：返回 (是否买入, 股数, 是否接近临界)"""
    g = genome.radius**2 - sum((x - c) ** 2 for x, c in zip(point, genome.center))
    if abs(g) < 1e-12:
        return None, True
    if g < 0:
        return None, False
    believed = 1.0 / (1.0 + math.exp(-genome.steepness * g))
    p_own = price_yes if genome.asset_class is Asset.YES else 1.0 - price_yes
    edge = believed - (p_own + config.margin)
    if abs(edge) < 1e-9:
        return None, True
    if edge < 0:
        return None, False
    b = config.liquidity_b
    unit_cost = b * math.log1p(p_own * math.expm1(config.trade_size / b))
    if abs(unit_cost - cash) < 1e-9:
        return None, True
    if unit_cost <= cash:
        return config.trade_size, False
    shares = b * math.log1p(math.expm1(cash / b) / p_own) if cash > 0 else 0.0
    if abs(shares - config.min_trade) < 1e-9:
        return None, True
    return (shares if shares >= config.min_trade else None), False


class TestMembership:
    """球隶属度测试"""

    def test_center(self):
        genome = make_genome((0.5, 0.5), radius=0.3)
        assert membership(genome, (0.5, 0.5)) == pytest.approx(0.09)

    def test_boundary(self):
        genome = make_genome((0.5, 0.5), radius=0.3)
        assert membership(genome, (0.8, 0.5)) == pytest.approx(0.0, abs=1e-12)

    def test_hand_example(self):
        """0.09 − 0.02 = 0.07"""
        genome = make_genome((0.5, 0.5), radius=0.3)
        assert membership(genome, (0.6, 0.6)) == pytest.approx(0.07, abs=1e-12)

    def test_dimension_mismatch(self):
        genome = make_genome((0.5, 0.5))
        with pytest.raises(SchemaMismatchException):
            membership(genome, (0.5, 0.5, 0.5))


class TestBelief:
    """sigmoid 信念测试"""

    def test_boundary_is_half(self):
        genome = make_genome((0.5, 0.5), radius=0.3)
        assert belief(genome, (0.8, 0.5)) == pytest.approx(0.5, abs=1e-9)

    def test_center_with_default_steepness(self):
        """σ(50 × 0.09) = σ(4.5) ≈ 0.98901"""
        genome = make_genome((0.5, 0.5), radius=0.3, steepness=50.0)
        assert belief(genome, (0.5, 0.5)) == pytest.approx(0.98901, abs=1e-5)

    def test_saturates_outside(self):
        genome = make_genome((0.5, 0.5), radius=0.1, steepness=1000.0)
        value = belief(genome, (0.9, 0.9))
        assert 0.0 < value < 1e-6

    def test_strictly_increasing_in_membership(self):
        genome = make_genome((0.5, 0.5), radius=0.3, steepness=10.0)
        points = [(0.5 + d, 0.5) for d in np.linspace(0.0, 0.5, 50)]
        values = [belief(genome, p) for p in points]
        assert all(a > b for a, b in zip(values, values[1:]))


class TestDecide:
    """购买决策测试"""

    def test_buys_unit_when_underpriced(self, market_config):
        agent = make_agent(make_genome((0.5, 0.5), radius=0.3))
        assert decide(agent, (0.5, 0.5), 0.5, market_config) == 1.0

    def test_abstains_without_edge(self, market_config):
        agent = make_agent(make_genome((0.5, 0.5), radius=0.3))
        assert decide(agent, (0.5, 0.5), 0.99, market_config) is None

    def test_abstains_outside_region_at_any_price(self, market_config):
        agent = make_agent(make_genome((0.5, 0.5), radius=0.1))
        for price in (0.001, 0.2, 0.5, 0.9):
            assert decide(agent, (0.9, 0.9), price, market_config) is None

    def test_no_agent_compares_against_no_price(self, market_config):
        """No-agent 以 1 − price_yes 作为自身价格"""
        agent = make_agent(make_genome((0.5, 0.5), radius=0.3, asset=Asset.NO))
        assert decide(agent, (0.5, 0.5), 0.01, market_config) is None
        assert decide(agent, (0.5, 0.5), 0.5, market_config) == 1.0

    def test_partial_purchase_when_cash_is_short(self, market_config):
        agent = make_agent(make_genome((0.5, 0.5), radius=0.3), cash=0.3)
        shares = decide(agent, (0.5, 0.5), 0.5, market_config)
        # ln(1 + (e^0.3 − 1)/0.5)
        assert shares == pytest.approx(math.log1p(math.expm1(0.3) / 0.5), rel=1e-9)
        assert 0.01 <= shares < 1.0

    def test_abstains_below_minimum_trade(self, market_config):
        agent = make_agent(make_genome((0.5, 0.5), radius=0.3), cash=0.001)
        assert decide(agent, (0.5, 0.5), 0.5, market_config) is None

    def test_margin(self):
        agent = make_agent(make_genome((0.5, 0.5), radius=0.3))
        assert decide(agent, (0.5, 0.5), 0.5, MarketConfig(margin=0.5)) is None

    def test_oracle_equivalence(self):
        """10^4 个随机 (genome, point, price) 与独立实现一致"""
        rng = np.random.default_rng(99)
        config = MarketConfig()
        checked = 0
        for _ in range(10_000):
            center = rng.uniform(0, 1, size=3)
            genome = Genome(
                id="AG_1",
                asset_class=Asset.YES if rng.random() < 0.5 else Asset.NO,
                center=tuple(center),
                radius=float(rng.uniform(0.05, 0.8)),
                steepness=float(10 ** rng.uniform(-1, 3)),
            )
            point = tuple(np.clip(center + rng.normal(0, 0.3, size=3), 0, 1))
            price = float(rng.uniform(0.001, 0.999))
            cash = float(rng.choice([rng.uniform(0, 0.05), rng.uniform(0, 5)]))
            expected, near_tie = oracle_decision(genome, point, price, cash, config)
            if near_tie:
                continue
            actual = decide(AgentState(id="AG_1", genome=genome, cash=cash), point, price, config)
            if expected is None:
                assert actual is None
            else:
                assert actual == pytest.approx(expected, rel=1e-9)
            checked += 1
        assert checked > 9_000

    def test_monotone_in_own_price(self, market_config):
        """某价格弃权，则更高的自身价格也弃权"""
        rng = np.random.default_rng(5)
        prices = np.linspace(0.01, 0.99, 60)
        for _ in range(200):
            genome = make_genome(
                rng.uniform(0, 1, size=2),
                radius=float(rng.uniform(0.05, 0.6)),
                steepness=float(10 ** rng.uniform(-1, 3)),
            )
            agent = make_agent(genome, cash=float(rng.uniform(0, 5)))
            point = tuple(rng.uniform(0, 1, size=2))
            abstained = False
            for price in prices:
                decision = decide(agent, point, float(price), market_config)
                if abstained:
                    assert decision is None
                abstained = abstained or decision is None

    def test_purchase_region_is_shrunken_ball(self):
        """p > 0.5 时 belief > p ⇔ ‖x − c‖² < r² − logit(p)/k"""
        rng = np.random.default_rng(8)
        for _ in range(2_000):
            genome = make_genome(
                rng.uniform(0, 1, size=2),
                radius=float(rng.uniform(0.05, 0.6)),
                steepness=float(10 ** rng.uniform(0, 3)),
            )
            point = tuple(rng.uniform(0, 1, size=2))
            price = float(rng.uniform(0.5001, 0.999))
            distance_sq = sum((x - c) ** 2 for x, c in zip(point, genome.center))
            threshold = purchase_threshold(genome, price)
            if abs(distance_sq - threshold) < 1e-9:
                continue
            assert (belief(genome, point) > price) == (distance_sq < threshold)

    def test_threshold_is_full_ball_below_half(self):
        genome = make_genome((0.5, 0.5), radius=0.3)
        assert purchase_threshold(genome, 0.3) == pytest.approx(0.09)


class TestInitPopulation:
    """种群初始化测试"""

    @staticmethod
    def points(n, seed=0):
        rng = np.random.default_rng(seed)
        return [
            LabeledPoint(
                claim_id=f"P{i}",
                point=tuple(rng.uniform(0, 1, size=3)),
                label=Label.REPLICABLE if i % 2 else Label.NOT_REPLICABLE,
            )
            for i in range(n)
        ]

    def test_population_shape(self):
        train = self.points(20)
        genomes = init_population(train, 5, np.random.default_rng(1))
        assert [g.id for g in genomes] == ["AG_1", "AG_2", "AG_3", "AG_4", "AG_5"]
        for genome in genomes:
            assert genome.steepness == 50.0
            assert all(0.0 <= c <= 1.0 for c in genome.center)

        matrix = np.array([p.point for p in train])
        distances = np.linalg.norm(matrix[:, None, :] - matrix[None, :, :], axis=2)
        np.fill_diagonal(distances, np.inf)
        expected = float(np.median(distances.min(axis=1)))
        assert all(g.radius == pytest.approx(expected) for g in genomes)

    def test_asset_follows_anchor_label(self):
        """锚点附近（扰动 0.02）的最近训练点决定资产类别"""
        train = self.points(6)
        genomes = init_population(train, 5, np.random.default_rng(2), anchor_jitter=1e-6)
        for genome in genomes:
            nearest = min(
                train,
                key=lambda p: sum((a - b) ** 2 for a, b in zip(p.point, genome.center)),
            )
            expected = Asset.YES if nearest.label is Label.REPLICABLE else Asset.NO
            assert genome.asset_class is expected

    def test_deterministic(self):
        train = self.points(10)
        first = init_population(train, 5, np.random.default_rng(3))
        second = init_population(train, 5, np.random.default_rng(3))
        assert first == second

    def test_single_training_point(self):
        train = self.points(1)
        genomes = init_population(train, 3, np.random.default_rng(4))
        assert len(genomes) == 3
        assert all(g.radius == FALLBACK_RADIUS for g in genomes)
        for genome in genomes:
            assert np.allclose(genome.center, train[0].point, atol=0.2)

    def test_duplicate_points_clip_radius(self):
        point = LabeledPoint(claim_id="A", point=(0.5, 0.5), label=Label.REPLICABLE)
        twin = LabeledPoint(claim_id="B", point=(0.5, 0.5), label=Label.NOT_REPLICABLE)
        genomes = init_population([point, twin], 2, np.random.default_rng(0))
        assert all(g.radius == RADIUS_MIN for g in genomes)

    def test_count_must_be_positive(self):
        with pytest.raises(ValidationException):
            init_population(self.points(3), 0, np.random.default_rng(0))


class TestAgentIdGenerator:
    """agent 编号测试"""

    def test_continues_after_existing_ids(self):
        generator = AgentIdGenerator.from_existing(["AG_3", "AG_10", "bogus", "AG_x"])
        assert generator.generate_code() == "AG_11"
        assert generator.generate_code() == "AG_12"

    def test_validate_code_format(self):
        generator = AgentIdGenerator()
        assert generator.validate_code_format("AG_1")
        assert not generator.validate_code_format("AG_0")
        assert not generator.validate_code_format("XY_1")
        assert not generator.validate_code_format("AG_")
