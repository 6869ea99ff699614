"""
评估服务

对已训练的市场评分、计算覆盖率与分类指标、执行分层交叉验证。
分类指标只在已评分子集上计算，覆盖率单独报告。
"""

import logging
import math
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from sklearn.metrics import confusion_matrix, precision_recall_fscore_support

from exceptions import NotFoundException, SchemaMismatchException, ValidationException
from models.agents import AgentState, Genome
from models.claims import ClaimRecord, FeatureSchema, FoldPlan, LabeledPoint
from models.enums import Label, Prediction
from models.evolution import EvolutionConfig, GenerationStats, TrainedModel
from models.market import MarketConfig, MarketResult
from schemas.metrics import (
    ClassMetrics,
    Confusion,
    CrossValidationResult,
    FoldReport,
    MetricsReport,
    SweepPoint,
)
from schemas.scores import ClaimScore
from services.data import ClaimDataService
from services.evolution import EvolutionService
from services.market import run_market
from utils.base import derive_rng

logger = logging.getLogger(__name__)

TIE_EPSILON = 1e-9
CLASS_ORDER = (Label.REPLICABLE, Label.NOT_REPLICABLE)
DEFAULT_FRACTIONS = (0.25, 0.5, 0.75, 1.0)


def classify(result: MarketResult) -> Tuple[Optional[float], Prediction]:
    """收盘价 -> (分数, 预测)；未交易或收在 0.5 附近视为弃权"""
    if not result.scored:
        return None, Prediction.ABSTAIN
    price = result.close_price_yes
    if price > 0.5 + TIE_EPSILON:
        return price, Prediction.REPLICABLE
    if price < 0.5 - TIE_EPSILON:
        return price, Prediction.NOT_REPLICABLE
    return None, Prediction.ABSTAIN


def _run_scoring_market(
    genomes: List[Genome],
    claim: LabeledPoint,
    market_config: MarketConfig,
    seed: int,
) -> MarketResult:
    agents = [AgentState.fresh(g, market_config.initial_cash) for g in genomes]
    rng = derive_rng(seed, "score", claim.claim_id)
    return run_market(agents, claim.point, market_config, rng, claim_id=claim.claim_id)


def to_claim_score(
    result: MarketResult, label: Optional[Label] = None, ledger_ref: Optional[str] = None
) -> ClaimScore:
    """市场结果 -> ClaimScore"""
    score, prediction = classify(result)
    correct = None
    if label is not None and prediction is not Prediction.ABSTAIN:
        correct = prediction is Prediction.from_label(label)
    return ClaimScore(
        claim_id=result.claim_id,
        score=score,
        prediction=prediction,
        close_price=result.close_price_yes,
        participants=len(result.holdings),
        label=label,
        correct=correct,
        ledger_ref=ledger_ref,
        ledger=list(result.ledger),
    )


def compute_metrics(
    scores: Sequence[ClaimScore], labels: Mapping[str, Label]
) -> MetricsReport:
    """
    计算评估指标

    Args:
        scores: 评分列表（顺序无关）
        labels: claim id -> 真实标签；每个已评分 claim 都必须有标签

    Returns:
        指标报告；没有已评分 claim 时分类指标为 None 并标记 undefined
    """
    n_total = len(scores)
    scored = [s for s in scores if s.prediction is not Prediction.ABSTAIN]
    for s in scored:
        if s.claim_id not in labels:
            raise ValidationException(f"scored claim '{s.claim_id}' has no label")

    # 弃权按 0.5 计入残差
    residuals = [
        (s.score if s.score is not None else 0.5) - labels[s.claim_id].outcome
        for s in scores
        if s.claim_id in labels
    ]
    rmse = math.sqrt(float(np.mean(np.square(residuals)))) if residuals else None

    n_scored = len(scored)
    coverage = n_scored / n_total if n_total else 0.0
    if n_scored == 0:
        return MetricsReport(
            n_total=n_total, n_scored=0, coverage=coverage, rmse=rmse, undefined=True
        )

    class_values = [label.value for label in CLASS_ORDER]
    y_true = [labels[s.claim_id].value for s in scored]
    y_pred = [s.prediction.value for s in scored]

    (tp, fn), (fp, tn) = confusion_matrix(y_true, y_pred, labels=class_values)
    precision, recall, f1, support = precision_recall_fscore_support(
        y_true, y_pred, labels=class_values, zero_division=0
    )
    per_class = {
        value: ClassMetrics(
            precision=float(precision[i]),
            recall=float(recall[i]),
            f1=float(f1[i]),
            support=int(support[i]),
        )
        for i, value in enumerate(class_values)
    }
    return MetricsReport(
        n_total=n_total,
        n_scored=n_scored,
        coverage=coverage,
        accuracy=(int(tp) + int(tn)) / n_scored,
        macro_precision=float(np.mean(precision)),
        macro_recall=float(np.mean(recall)),
        macro_f1=float(np.mean(f1)),
        rmse=rmse,
        confusion=Confusion(tp=int(tp), fn=int(fn), fp=int(fp), tn=int(tn)),
        per_class=per_class,
    )


def render_metrics_table(rows: Sequence[Tuple[str, MetricsReport]]) -> str:
    """指标表（定宽文本）"""

    def fmt(value: Optional[float]) -> str:
        return "undefined" if value is None else f"{value:.4f}"

    frame = pd.DataFrame(
        [
            {
                "report": name,
                "n_total": report.n_total,
                "n_scored": report.n_scored,
                "coverage": fmt(report.coverage),
                "accuracy": fmt(report.accuracy),
                "precision": fmt(report.macro_precision),
                "recall": fmt(report.macro_recall),
                "f1": fmt(report.macro_f1),
                "rmse": fmt(report.rmse),
                "TP/FN/FP/TN": "{tp}/{fn}/{fp}/{tn}".format(
                    **report.confusion.model_dump()
                ),
            }
            for name, report in rows
        ]
    )
    return frame.to_string(index=False)


def _labels_of(records: Sequence[ClaimRecord]) -> Dict[str, Label]:
    return {r.id: r.label for r in records if r.label is not None}


def _stratified_subset(
    records: List[ClaimRecord], fraction: float, rng_stream: np.random.Generator
) -> List[ClaimRecord]:
    """按类别各取 fraction（每类至少 1 个），保持 claim id 顺序"""
    kept = set()
    for label in CLASS_ORDER:
        ids = [r.id for r in records if r.label is label]
        if not ids:
            continue
        take = max(1, math.ceil(fraction * len(ids)))
        kept.update(ids[i] for i in rng_stream.permutation(len(ids))[:take])
    return [r for r in records if r.id in kept]


def _run_fold(
    schema: FeatureSchema,
    records: List[ClaimRecord],
    plan: FoldPlan,
    fold: int,
    config: EvolutionConfig,
    seed: int,
    train_fraction: float = 1.0,
) -> Tuple[FoldReport, List[ClaimScore], List[GenerationStats]]:
    """单折：在其余折上拟合归一化并训练，对本折评分"""
    data_service = ClaimDataService(schema)
    by_id = {r.id: r for r in records}
    train = [by_id[cid] for cid in plan.train_ids(fold)]
    test = [by_id[cid] for cid in plan.test_ids(fold)]
    if train_fraction < 1.0:
        train = _stratified_subset(train, train_fraction, derive_rng(seed, "sweep", fold))

    normalizer = data_service.fit_normalizer(train)
    model, history = EvolutionService(config).train(
        data_service.to_points(normalizer, train), normalizer
    )
    service = EvaluationService(data_service, jobs=config.jobs)
    scores = service.score_claims(model, test, seed)
    metrics = compute_metrics(scores, _labels_of(test))
    report = FoldReport(
        fold=fold,
        n_train=len(train),
        n_test=len(test),
        best_generation=model.best_generation,
        best_rmse=model.best_rmse,
        metrics=metrics,
    )
    logger.info(
        f"Fold {fold}: n_test={len(test)} coverage={metrics.coverage:.3f} "
        f"accuracy={metrics.accuracy if metrics.accuracy is not None else 'undefined'}"
    )
    return report, scores, history


class EvaluationService:
    """评估服务"""

    def __init__(self, data_service: ClaimDataService, jobs: int = 1):
        self.data_service = data_service
        self.jobs = jobs

    def _check_model(self, model: TrainedModel) -> None:
        names = self.data_service.schema.names
        if model.normalizer.dimension != len(names):
            raise SchemaMismatchException(
                len(names), model.normalizer.dimension, "model normalizer"
            )
        if model.feature_names and list(model.feature_names) != list(names):
            raise ValidationException(
                "model feature names do not match the dataset schema"
            )

    # ------------------------------------------------------------------ 评分

    def run_scoring_markets(
        self, model: TrainedModel, claims: Sequence[ClaimRecord], seed: int
    ) -> List[Tuple[LabeledPoint, MarketResult]]:
        """
        对每个 claim 运行一次测试市场（资金重置，私有随机流）

        返回顺序与输入一致。
        """
        self._check_model(model)
        points = self.data_service.to_points(model.normalizer, claims)
        market_config = model.config.market_config()
        results = Parallel(n_jobs=self.jobs)(
            delayed(_run_scoring_market)(model.genomes, point, market_config, seed)
            for point in points
        )
        return list(zip(points, results))

    def score_claims(
        self, model: TrainedModel, claims: Sequence[ClaimRecord], seed: int
    ) -> List[ClaimScore]:
        """对 claim 评分，有标签的附带是否正确"""
        scores = [
            to_claim_score(result, point.label)
            for point, result in self.run_scoring_markets(model, claims, seed)
        ]
        scored = sum(1 for s in scores if s.score is not None)
        logger.info(f"Scored {scored} of {len(scores)} claims")
        return scores

    # ------------------------------------------------------------------ 交叉验证

    def cross_validate(
        self,
        dataset: Sequence[ClaimRecord],
        fold_plan: FoldPlan,
        config: EvolutionConfig,
        train_fraction: float = 1.0,
    ) -> CrossValidationResult:
        """
        分层交叉验证

        各折使用同一 EvolutionConfig（相同种子派生）；jobs ≠ 1 时各折并行，
        折内市场串行。汇总报告由全部测试评分重新计算。
        """
        records = sorted(dataset, key=lambda r: r.id)
        missing = [r.id for r in records if r.id not in fold_plan.assignments]
        if missing:
            raise NotFoundException("Fold assignment", missing[0])
        if len(fold_plan.assignments) != len(records):
            raise ValidationException("fold plan covers claims missing from the dataset")

        seed = config.master_seed
        if self.jobs == 1:
            outcomes = [
                _run_fold(
                    self.data_service.schema, records, fold_plan, fold, config, seed,
                    train_fraction,
                )
                for fold in range(fold_plan.fold_count)
            ]
        else:
            inner = config.model_copy(update={"jobs": 1})
            outcomes = Parallel(n_jobs=self.jobs)(
                delayed(_run_fold)(
                    self.data_service.schema, records, fold_plan, fold, inner, seed,
                    train_fraction,
                )
                for fold in range(fold_plan.fold_count)
            )

        all_scores = sorted(
            (score for _, scores, _ in outcomes for score in scores),
            key=lambda s: s.claim_id,
        )
        pooled = compute_metrics(all_scores, _labels_of(records))
        return CrossValidationResult(
            folds=[report for report, _, _ in outcomes],
            pooled=pooled,
            scores=all_scores,
            histories={report.fold: history for report, _, history in outcomes},
        )

    def participation_curve(
        self,
        dataset: Sequence[ClaimRecord],
        fold_plan: FoldPlan,
        config: EvolutionConfig,
        fractions: Sequence[float] = DEFAULT_FRACTIONS,
    ) -> List[SweepPoint]:
        """训练数据比例递增时的汇总覆盖率与准确率"""
        points = []
        for fraction in fractions:
            if not 0 < fraction <= 1:
                raise ValidationException(f"fraction must lie in (0, 1], got {fraction}")
            result = self.cross_validate(dataset, fold_plan, config, fraction)
            pooled = result.pooled
            points.append(
                SweepPoint(
                    fraction=fraction,
                    n_train=sum(report.n_train for report in result.folds),
                    coverage=pooled.coverage,
                    accuracy=pooled.accuracy,
                    macro_f1=pooled.macro_f1,
                    rmse=pooled.rmse,
                )
            )
            logger.info(f"Fraction {fraction:.2f}: coverage={pooled.coverage:.3f}")
        return points


def get_evaluation_service(
    data_service: ClaimDataService, jobs: int = 1
) -> EvaluationService:
    """获取评估服务实例"""
    return EvaluationService(data_service, jobs=jobs)
