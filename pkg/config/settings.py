from pathlib import Path
from typing import Any, Dict, Literal, Optional, Tuple, Type
import os

from pydantic import Field
from pydantic_settings import BaseSettings, PydanticBaseSettingsSource, SettingsConfigDict

from exceptions import NotFoundException
from models.enums import SelectionScheme
from models.evolution import EvolutionConfig

RUN_CONFIG_FILE = "run_config.env"


class Settings(BaseSettings):
    """进程级配置（环境变量 / .env）"""

    # 环境配置
    ENVIRONMENT: Literal["development", "production"] = "development"

    # 基础配置
    PROJECT_NAME: str = "可复现性预测市场"
    VERSION: str = "1.0.0"

    # 日志配置
    LOG_LEVEL: str = "INFO"
    LOG_FORMAT: str = "%(asctime)s %(levelname)s %(name)s: %(message)s"

    class Config:
        env_file = ".env" if os.getenv("ENVIRONMENT") != "production" else None
        env_file_encoding = "utf-8"
        case_sensitive = True  # 区分大小写
        extra = "ignore"


settings = Settings()


class RunConfig(BaseSettings):
    """
    实验级配置

    来源优先级：命令行参数 > --config 指定的 key=value 文件；
    不读取环境变量。完整写入每个输出目录，用于复现实验。
    """

    model_config = SettingsConfigDict(
        case_sensitive=False,
        env_file_encoding="utf-8",
        extra="forbid",
    )

    # 输入输出
    data: Optional[Path] = Field(None, description="数据集 CSV/JSON")
    schema_path: Optional[Path] = Field(None, description="特征名 JSON，缺省为 feature_1..feature_41")
    out: Path = Field(Path("runs/latest"), description="输出目录")
    model: Optional[Path] = Field(None, description="已训练模型 JSON")
    claim: Optional[str] = Field(None, description="单个 claim id（explain/simulate）")
    scores: Optional[Path] = Field(None, description="scores.json（explain 重新渲染）")

    # 实验
    folds: int = Field(5, ge=2, description="交叉验证折数")
    seed: int = Field(0, ge=0, description="主随机种子")
    jobs: int = Field(1, description="并行度，-1 表示全部 CPU")

    # 进化与市场
    generations: int = Field(50, ge=0)
    population: int = Field(5, ge=1)
    cash: float = Field(5.0, gt=0)
    liquidity: float = Field(1.0, gt=0)
    initial_price: float = Field(0.5, gt=0, lt=1)
    mutation_sigma_center: float = Field(0.05, ge=0)
    mutation_log_sigma: float = Field(0.1, ge=0)
    asset_flip_probability: float = Field(0.02, ge=0, le=1)
    max_rounds: int = Field(100, ge=1)
    trade_size: float = Field(1.0, gt=0)
    min_trade: float = Field(0.01, gt=0)
    margin: float = Field(0.0, ge=0)
    agents_per_market: Optional[int] = Field(None, ge=1)
    initial_steepness: float = Field(50.0, ge=0.1, le=1000.0)
    anchor_jitter: float = Field(0.02, ge=0)
    selection: SelectionScheme = SelectionScheme.PROPORTIONAL
    tournament_size: int = Field(2, ge=1)

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: Type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> Tuple[PydanticBaseSettingsSource, ...]:
        return init_settings, dotenv_settings

    @classmethod
    def load(cls, config_file: Optional[Path] = None, **overrides: Any) -> "RunConfig":
        """
        加载实验配置

        Args:
            config_file: key=value 配置文件（可选）
            overrides: 命令行参数，值为 None 的视为未提供
        """
        if config_file is not None and not Path(config_file).exists():
            raise NotFoundException("Config file", str(config_file))
        given = {key: value for key, value in overrides.items() if value is not None}
        return cls(_env_file=config_file, **given)

    def to_evolution_config(self) -> EvolutionConfig:
        return EvolutionConfig(
            generations=self.generations,
            population_size=self.population,
            initial_cash=self.cash,
            liquidity_b=self.liquidity,
            initial_price=self.initial_price,
            mutation_sigma_center=self.mutation_sigma_center,
            mutation_log_sigma=self.mutation_log_sigma,
            asset_flip_probability=self.asset_flip_probability,
            master_seed=self.seed,
            max_rounds=self.max_rounds,
            trade_size=self.trade_size,
            min_trade=self.min_trade,
            margin=self.margin,
            agents_per_market=self.agents_per_market,
            initial_steepness=self.initial_steepness,
            anchor_jitter=self.anchor_jitter,
            selection=self.selection,
            tournament_size=self.tournament_size,
            jobs=self.jobs,
        )

    def to_env_text(self) -> str:
        """key=value 文本（字段顺序，省略未设置的可选项）"""
        values: Dict[str, Any] = self.model_dump(mode="json")
        lines = [f"{key}={value}" for key, value in values.items() if value is not None]
        return "\n".join(lines) + "\n"

    def write(self, out_dir: Path) -> Path:
        """写入 <out_dir>/run_config.env"""
        path = Path(out_dir) / RUN_CONFIG_FILE
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_env_text(), encoding="utf-8")
        return path
