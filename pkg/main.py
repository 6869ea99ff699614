"""
命令行入口

  train     训练种群，写出模型与逐代日志
  score     对数据集评分，写出分数、交易记录与解释
  cv        分层交叉验证，写出各折与汇总报告
  explain   由已保存的交易记录重新渲染解释
  simulate  单个市场的详细运行（调试）
  sweep     参与度曲线：训练数据比例递增时的覆盖率
"""

import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from app_factory import get_command_factory, run_overrides
from config.settings import RunConfig
from exceptions import NotFoundException, ValidationException
from lifecycle import experiment, setup_logging
from middleware import EXIT_BUSINESS_ERROR, run_with_exception_handling
from models.claims import ClaimRecord
from models.enums import RenderFormat
from models.evolution import TrainedModel
from models.market import TradeRecord
from schemas.scores import ClaimScore
from services.data import ClaimDataService, export_fold_plan, load_schema
from services.evaluation import (
    compute_metrics,
    get_evaluation_service,
    render_metrics_table,
    to_claim_score,
)
from services.evolution import get_evolution_service
from services.explain import explain, render, replay_score, write_explanation
from utils.serialization import read_json, read_jsonl, read_model, write_json, write_jsonl

logger = logging.getLogger(__name__)

MODEL_FILE = "model.json"
TRAINING_LOG_FILE = "training_log.jsonl"
SCORES_FILE = "scores.json"


def _require(value, flag: str):
    if value is None:
        raise ValidationException(f"{flag} is required")
    return value


def _data_service(config: RunConfig) -> ClaimDataService:
    return ClaimDataService(load_schema(config.schema_path))


def _load_dataset(config: RunConfig, service: ClaimDataService) -> List[ClaimRecord]:
    return service.load_dataset(_require(config.data, "--data"))


def _load_model(config: RunConfig) -> TrainedModel:
    return read_model(_require(config.model, "--model"), TrainedModel)


def _find_claim(records: Sequence[ClaimRecord], claim_id: str) -> ClaimRecord:
    for record in records:
        if record.id == claim_id:
            return record
    raise NotFoundException("Claim", claim_id)


def _labels(records: Sequence[ClaimRecord]) -> Dict:
    return {r.id: r.label for r in records if r.label is not None}


def _write_scores(out_dir: Path, scores: Sequence[ClaimScore]) -> None:
    """交易记录写入 ledgers/<id>.jsonl，scores.json 中以路径引用"""
    written = []
    for score in scores:
        ref = f"ledgers/{score.claim_id}.jsonl"
        write_jsonl(out_dir / ref, score.ledger)
        written.append(score.model_copy(update={"ledger": [], "ledger_ref": ref}))
    write_json(out_dir / SCORES_FILE, written)


def cmd_train(config: RunConfig) -> None:
    """训练并写出 model.json 与 training_log.jsonl"""
    data_service = _data_service(config)
    records = _load_dataset(config, data_service)
    with experiment("train", config) as out_dir:
        normalizer = data_service.fit_normalizer(records)
        points = data_service.to_points(normalizer, records)
        model, history = get_evolution_service(config.to_evolution_config()).train(
            points, normalizer
        )
        write_json(out_dir / MODEL_FILE, model)
        write_jsonl(out_dir / TRAINING_LOG_FILE, history)
        print(
            f"best generation {model.best_generation}, "
            f"training RMSE {model.best_rmse:.4f} -> {out_dir / MODEL_FILE}"
        )


def cmd_score(config: RunConfig) -> None:
    """评分并写出 scores.json、交易记录与逐 claim 解释"""
    data_service = _data_service(config)
    model = _load_model(config)
    records = _load_dataset(config, data_service)
    with experiment("score", config, write_config=False) as out_dir:
        service = get_evaluation_service(data_service, jobs=config.jobs)
        scores = []
        for point, result in service.run_scoring_markets(model, records, config.seed):
            scores.append(to_claim_score(result, point.label))
            report = explain(result, model.genomes, point.point, data_service.schema)
            write_explanation(report, out_dir / "explanations")
        _write_scores(out_dir, scores)

        labels = _labels(records)
        scored_labeled = [s for s in scores if s.claim_id in labels]
        if scored_labeled:
            metrics = compute_metrics(scored_labeled, labels)
            write_json(out_dir / "metrics.json", metrics)
            print(render_metrics_table([("score", metrics)]))
        unscored = sum(1 for s in scores if s.score is None)
        print(f"scored {len(scores) - unscored} of {len(scores)} claims -> {out_dir}")


def cmd_cv(config: RunConfig) -> None:
    """交叉验证，写出各折与汇总报告"""
    data_service = _data_service(config)
    records = _load_dataset(config, data_service)
    with experiment("cv", config) as out_dir:
        plan = data_service.split_folds(records, config.folds, config.seed)
        export_fold_plan(plan, out_dir / "fold_plan.json")

        service = get_evaluation_service(data_service, jobs=config.jobs)
        result = service.cross_validate(records, plan, config.to_evolution_config())

        for report in result.folds:
            write_json(out_dir / "reports" / f"fold_{report.fold}.json", report)
            write_jsonl(
                out_dir / "folds" / f"fold_{report.fold}" / TRAINING_LOG_FILE,
                result.histories[report.fold],
            )
        write_json(out_dir / "reports" / "pooled.json", result.pooled)
        _write_scores(out_dir, result.scores)

        rows = [(f"fold {r.fold}", r.metrics) for r in result.folds]
        print(render_metrics_table(rows + [("pooled", result.pooled)]))


def cmd_sweep(config: RunConfig) -> None:
    """参与度曲线"""
    data_service = _data_service(config)
    records = _load_dataset(config, data_service)
    with experiment("sweep", config) as out_dir:
        plan = data_service.split_folds(records, config.folds, config.seed)
        service = get_evaluation_service(data_service, jobs=config.jobs)
        points = service.participation_curve(records, plan, config.to_evolution_config())
        write_json(out_dir / "sweep.json", points)
        for point in points:
            accuracy = "undefined" if point.accuracy is None else f"{point.accuracy:.4f}"
            print(
                f"fraction {point.fraction:.2f}: coverage {point.coverage:.4f}, "
                f"accuracy {accuracy}"
            )


def _stored_ledger(score: ClaimScore, scores_path: Path) -> List[TradeRecord]:
    if score.ledger or score.ledger_ref is None:
        return list(score.ledger)
    return read_jsonl(scores_path.parent / score.ledger_ref, TradeRecord)


def cmd_explain(config: RunConfig) -> None:
    """由已保存的交易记录重新渲染解释（不重新运行市场）"""
    data_service = _data_service(config)
    model = _load_model(config)
    records = _load_dataset(config, data_service)
    scores_path = Path(config.scores or Path(config.out) / SCORES_FILE)
    stored = [ClaimScore.model_validate(item) for item in read_json(scores_path)]
    if config.claim is not None:
        stored = [s for s in stored if s.claim_id == config.claim]
        if not stored:
            raise NotFoundException("Score for claim", config.claim)

    with experiment("explain", config, write_config=False) as out_dir:
        market_config = model.config.market_config()
        for score in stored:
            record = _find_claim(records, score.claim_id)
            point = data_service.apply_normalizer(model.normalizer, record)
            score = score.model_copy(update={"ledger": _stored_ledger(score, scores_path)})
            result = replay_score(score, model.genomes, market_config)
            report = explain(result, model.genomes, point.tolist(), data_service.schema)
            write_explanation(report, out_dir / "explanations")
            if config.claim is not None:
                print(render(report, RenderFormat.MARKDOWN))


def cmd_simulate(config: RunConfig) -> None:
    """单个市场的详细运行，逐笔交易以 DEBUG 日志输出"""
    setup_logging("DEBUG")
    data_service = _data_service(config)
    model = _load_model(config)
    records = _load_dataset(config, data_service)
    record = _find_claim(records, _require(config.claim, "--claim"))
    service = get_evaluation_service(data_service)
    [(point, result)] = service.run_scoring_markets(model, [record], config.seed)
    report = explain(result, model.genomes, point.point, data_service.schema)
    print(render(report, RenderFormat.MARKDOWN))


def setup_commands():
    """注册子命令"""
    factory = get_command_factory()
    if factory.commands:
        return factory

    common = ["--config", "--data", "--schema", "--out", "--seed", "--jobs"]
    training = ["--generations", "--population", "--cash", "--liquidity", "--initial-price"]

    factory.register_command("train", cmd_train, "训练种群", common + training)
    factory.register_command(
        "score", cmd_score, "对数据集评分", common + ["--model"]
    )
    factory.register_command(
        "cv", cmd_cv, "交叉验证", common + training + ["--folds"]
    )
    factory.register_command(
        "explain",
        cmd_explain,
        "重新渲染解释",
        common + ["--model", "--claim", "--scores"],
    )
    factory.register_command(
        "simulate", cmd_simulate, "运行单个市场", common + ["--model", "--claim"]
    )
    factory.register_command(
        "sweep", cmd_sweep, "参与度曲线", common + training + ["--folds"]
    )
    return factory


def main(argv: Optional[Sequence[str]] = None) -> int:
    setup_logging()
    factory = setup_commands()
    args = factory.create_parser().parse_args(argv)

    try:
        config = RunConfig.load(
            Path(args.config) if args.config else None, **run_overrides(args)
        )
    except Exception as exc:
        logger.warning(f"Invalid configuration: {exc}")
        return EXIT_BUSINESS_ERROR

    return run_with_exception_handling(factory.get_handler(args.command), config)


if __name__ == "__main__":
    sys.exit(main())
