import pytest
import sys
import os

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from config.settings import settings
from models.agents import AgentState, Genome
from models.claims import ClaimRecord, FeatureSchema
from models.enums import Asset, Label
from models.evolution import EvolutionConfig
from models.market import MarketConfig
from scripts.make_synthetic_dataset import SyntheticClaimsBuilder


def make_genome(
    center,
    radius=0.3,
    asset=Asset.YES,
    steepness=50.0,
    agent_id="AG_1",
) -> Genome:
    return Genome(
        id=agent_id,
        asset_class=asset,
        center=tuple(float(c) for c in center),
        radius=radius,
        steepness=steepness,
    )


def make_agent(genome: Genome, cash: float = 5.0) -> AgentState:
    return AgentState.fresh(genome, cash)


@pytest.fixture
def market_config():
    """默认市场参数"""
    return MarketConfig()


@pytest.fixture
def schema2():
    """二维 schema"""
    return FeatureSchema.default(2)


@pytest.fixture
def toy_records():
    """
    二维玩具数据集：左下角 Replicable，右上角 NotReplicable
    """
    rows = [
        ("T1", [0.10, 0.10], Label.REPLICABLE),
        ("T2", [0.15, 0.12], Label.REPLICABLE),
        ("T3", [0.12, 0.18], Label.REPLICABLE),
        ("T4", [0.90, 0.90], Label.NOT_REPLICABLE),
        ("T5", [0.85, 0.88], Label.NOT_REPLICABLE),
        ("T6", [0.88, 0.82], Label.NOT_REPLICABLE),
    ]
    return [ClaimRecord(id=i, raw_features=f, label=l) for i, f, l in rows]


@pytest.fixture
def small_config():
    """小规模进化参数（测试用）"""
    return EvolutionConfig(generations=3, population_size=4, master_seed=7)


@pytest.fixture(scope="session")
def synthetic_builder():
    return SyntheticClaimsBuilder(seed=11)


@pytest.fixture
def synthetic_csv(tmp_path):
    """小型合成数据集 CSV"""
    builder = SyntheticClaimsBuilder(n_claims=40, dimension=6, ball_radius=0.3, seed=3)
    return builder.write_csv(tmp_path / "claims.csv")


@pytest.fixture(scope="session", autouse=True)
def setup_test_environment():
    """
    测试环境初始化
    """
    print(f"\n 开始测试 - 环境: {settings.ENVIRONMENT}")
    yield
    print("\n 测试完成")
