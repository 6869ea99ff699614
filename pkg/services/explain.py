"""
评分解释

由交易记录与参与 agent 的几何（球心、半径、增益）生成解释报告：
谁交易了、为什么交易、哪些特征决定了接近程度。
"""

import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from exceptions import SchemaMismatchException, ValidationException
from models.agents import Genome
from models.claims import FeatureSchema
from models.enums import UNSCORED, Prediction, RenderFormat
from models.market import Holding, MarketConfig, MarketResult, TradeRecord
from schemas.explanations import (
    AbstentionRow,
    AgentAttribution,
    ExplanationReport,
    FeatureContribution,
    ParticipationRow,
)
from schemas.scores import ClaimScore
from services.agents import belief, membership, squared_deviations
from services.evaluation import classify
from services.lmsr import new_market, own_price, price_yes

logger = logging.getLogger(__name__)

TOP_FEATURES = 10


def _attribution(
    genome: Genome, point: Sequence[float], schema: FeatureSchema
) -> AgentAttribution:
    deviations = squared_deviations(genome, point)
    order = np.argsort(-deviations, kind="stable")
    top = order[:TOP_FEATURES]
    return AgentAttribution(
        agent_id=genome.id,
        squared_distance=float(deviations.sum()),
        top_features=[
            FeatureContribution(feature=schema.names[i], contribution=float(deviations[i]))
            for i in top
        ],
        residual=float(deviations[order[TOP_FEATURES:]].sum()),
    )


def _check_inputs(
    result: MarketResult,
    genomes: Dict[str, Genome],
    point: Sequence[float],
    schema: FeatureSchema,
) -> List[str]:
    """校验输入一致性，返回按首次成交排序的参与 agent"""
    if len(point) != schema.dimension:
        raise SchemaMismatchException(schema.dimension, len(point), "explained point")
    traded: List[str] = []
    for record in result.ledger:
        if record.agent_id not in genomes:
            raise ValidationException(
                f"ledger references agent '{record.agent_id}' missing from the population"
            )
        if record.agent_id not in traded:
            traded.append(record.agent_id)
    if set(traded) != set(result.holdings):
        raise ValidationException("market holdings do not match the ledger")
    for agent_id in traded:
        if genomes[agent_id].asset_class is not result.holdings[agent_id].asset:
            raise ValidationException(
                f"agent '{agent_id}' holds a different asset than its genome trades"
            )
    return traded


def _narrative(report: ExplanationReport) -> str:
    lines = []
    if report.prediction is Prediction.ABSTAIN:
        if report.participation:
            lines.append(
                f"Claim {report.claim_id} is {UNSCORED}: the market traded but closed "
                f"within the tie band around 0.5."
            )
        else:
            lines.append(
                f"Claim {report.claim_id} is {UNSCORED}: no agent participated."
            )
            nearest = next(
                (r for r in report.abstentions if r.agent_id == report.nearest_agent),
                None,
            )
            if nearest is not None:
                lines.append(
                    f"The nearest agent is {nearest.agent_id} ({nearest.asset_class.value}); "
                    f"the claim lies outside its region by a membership deficit of "
                    f"{nearest.deficit:.6f} (distance {nearest.distance:.4f}, "
                    f"radius {nearest.radius:.4f})."
                )
    else:
        lines.append(
            f"Claim {report.claim_id} scored {report.score:.4f} "
            f"({report.prediction.value})."
        )
    if report.participation:
        lines.append(
            f"{len(report.participation)} of {report.population_size} agents participated "
            f"(participation {report.participation_fraction:.2f}), "
            f"spending {report.revenue:.4f} in {len(report.ledger)} trades."
        )
        for row in report.participation:
            lines.append(
                f"- {row.agent_id} bought {row.shares:.4f} {row.asset_class.value} shares "
                f"for {row.spend:.4f}; membership {row.membership:.6f}, "
                f"belief {row.belief:.4f}, edge {row.edge_at_open:+.4f} at open "
                f"and {row.edge_at_close:+.4f} at close."
            )
    return "\n".join(lines)


def explain(
    result: MarketResult,
    genomes: Sequence[Genome],
    point: Sequence[float],
    schema: FeatureSchema,
) -> ExplanationReport:
    """
    生成解释报告

    Args:
        result: 市场结果（必须由这些 agent 在该点上产生）
        genomes: 种群
        point: 归一化特征点
        schema: 特征名

    Returns:
        解释报告

    Raises:
        ValidationException: agent 与交易记录不一致
    """
    by_id = {genome.id: genome for genome in genomes}
    traded = _check_inputs(result, by_id, point, schema)
    score, prediction = classify(result)

    trade_counts: Dict[str, int] = {}
    for record in result.ledger:
        trade_counts[record.agent_id] = trade_counts.get(record.agent_id, 0) + 1

    participation = []
    for agent_id in traded:
        genome = by_id[agent_id]
        holding = result.holdings[agent_id]
        agent_belief = belief(genome, point)
        open_own = own_price(result.open_price_yes, genome.asset_class)
        close_own = own_price(result.close_price_yes, genome.asset_class)
        participation.append(
            ParticipationRow(
                agent_id=agent_id,
                asset_class=genome.asset_class,
                shares=holding.shares,
                spend=holding.spend,
                membership=membership(genome, point),
                belief=agent_belief,
                own_price_at_open=open_own,
                own_price_at_close=close_own,
                edge_at_open=agent_belief - open_own,
                edge_at_close=agent_belief - close_own,
                trades=trade_counts[agent_id],
            )
        )

    abstentions = []
    for genome in genomes:
        if genome.id in result.holdings:
            continue
        g = membership(genome, point)
        abstentions.append(
            AbstentionRow(
                agent_id=genome.id,
                asset_class=genome.asset_class,
                membership=g,
                deficit=-g,
                distance=float(np.sqrt(squared_deviations(genome, point).sum())),
                radius=genome.radius,
            )
        )
    abstentions.sort(key=lambda row: (row.deficit, row.agent_id))

    report = ExplanationReport(
        claim_id=result.claim_id or "",
        score=score,
        prediction=prediction,
        population_size=len(genomes),
        participation_fraction=len(participation) / len(genomes) if genomes else 0.0,
        participation=participation,
        attributions=[_attribution(by_id[a], point, schema) for a in traded],
        abstentions=abstentions,
        nearest_agent=abstentions[0].agent_id if not traded and abstentions else None,
        revenue=result.revenue,
        ledger=list(result.ledger),
    )
    return report.model_copy(update={"narrative": _narrative(report)})


def _markdown(report: ExplanationReport) -> str:
    score = UNSCORED if report.score is None else f"{report.score:.6f}"
    out = [
        f"# Explanation for claim {report.claim_id}",
        "",
        f"- Score: {score}",
        f"- Prediction: {report.prediction.value}",
        f"- Participation: {len(report.participation)}/{report.population_size} "
        f"({report.participation_fraction:.2f})",
        f"- Market revenue: {report.revenue:.6f}",
        "",
        "## Narrative",
        "",
        report.narrative,
        "",
    ]
    if report.participation:
        out += [
            "## Participation",
            "",
            "| agent | asset | shares | spend | membership | belief | edge@open | edge@close |",
            "|---|---|---|---|---|---|---|---|",
        ]
        out += [
            f"| {r.agent_id} | {r.asset_class.value} | {r.shares:.6f} | {r.spend:.6f} "
            f"| {r.membership:.6f} | {r.belief:.6f} | {r.edge_at_open:+.6f} "
            f"| {r.edge_at_close:+.6f} |"
            for r in report.participation
        ]
        out.append("")
    if report.attributions:
        out += ["## Feature attributions", ""]
        for attribution in report.attributions:
            out.append(
                f"### {attribution.agent_id} (squared distance "
                f"{attribution.squared_distance:.6f})"
            )
            out.append("")
            out += [
                f"- {c.feature}: {c.contribution:.6f}" for c in attribution.top_features
            ]
            out.append(f"- (other features): {attribution.residual:.6f}")
            out.append("")
    if report.abstentions:
        out += [
            "## Non-participating agents",
            "",
            "| agent | asset | membership deficit | distance | radius |",
            "|---|---|---|---|---|",
        ]
        out += [
            f"| {r.agent_id} | {r.asset_class.value} | {r.deficit:.6f} "
            f"| {r.distance:.6f} | {r.radius:.6f} |"
            for r in report.abstentions
        ]
        out.append("")
    out += ["## Ledger", ""]
    if report.ledger:
        out += [
            "| round | agent | asset | shares | cost | price before | price after |",
            "|---|---|---|---|---|---|---|",
        ]
        out += [
            f"| {t.round} | {t.agent_id} | {t.asset.value} | {t.shares:.6f} "
            f"| {t.cost:.6f} | {t.price_before:.6f} | {t.price_after:.6f} |"
            for t in report.ledger
        ]
    else:
        out.append("No trades.")
    return "\n".join(out) + "\n"


def render(report: ExplanationReport, format: RenderFormat = RenderFormat.JSON) -> str:
    """渲染报告（纯函数，结果确定）"""
    if RenderFormat(format) is RenderFormat.MARKDOWN:
        return _markdown(report)
    return report.model_dump_json(indent=2) + "\n"


def explanation_paths(out_dir: Path, claim_id: str) -> Tuple[Path, Path]:
    """<claim_id>.explain.md 与 <claim_id>.explain.json"""
    out_dir = Path(out_dir)
    return (
        out_dir / f"{claim_id}.explain.md",
        out_dir / f"{claim_id}.explain.json",
    )


def write_explanation(report: ExplanationReport, out_dir: Path) -> Tuple[Path, Path]:
    """写出 markdown 与 json 两份解释"""
    md_path, json_path = explanation_paths(out_dir, report.claim_id)
    md_path.parent.mkdir(parents=True, exist_ok=True)
    md_path.write_text(render(report, RenderFormat.MARKDOWN), encoding="utf-8")
    json_path.write_text(render(report, RenderFormat.JSON), encoding="utf-8")
    return md_path, json_path


def replay_result(
    claim_id: str,
    ledger: Sequence[TradeRecord],
    genomes: Sequence[Genome],
    market_config: MarketConfig,
) -> MarketResult:
    """
    由已保存的交易记录重建市场结果（用于重新渲染解释）
    """
    by_id = {genome.id: genome for genome in genomes}
    open_price = price_yes(new_market(market_config.liquidity_b, market_config.initial_price))
    holdings: Dict[str, Holding] = {}
    for record in ledger:
        genome = by_id.get(record.agent_id)
        if genome is None:
            raise ValidationException(
                f"ledger references agent '{record.agent_id}' missing from the model"
            )
        previous = holdings.get(record.agent_id)
        holdings[record.agent_id] = Holding(
            asset=genome.asset_class,
            shares=record.shares + (previous.shares if previous else 0.0),
            spend=record.cost + (previous.spend if previous else 0.0),
        )
    last_round = max((record.round for record in ledger), default=0)
    return MarketResult(
        claim_id=claim_id,
        open_price_yes=open_price,
        close_price_yes=ledger[-1].price_after if ledger else open_price,
        ledger=list(ledger),
        scored=bool(ledger),
        rounds_run=min(last_round + 1, market_config.max_rounds),
        revenue=float(sum(record.cost for record in ledger)),
        holdings=holdings,
        participants=[genome.id for genome in genomes],
    )


def replay_score(
    score: ClaimScore, genomes: Sequence[Genome], market_config: MarketConfig
) -> MarketResult:
    """ClaimScore 内联交易记录 -> 市场结果"""
    return replay_result(score.claim_id, score.ledger, genomes, market_config)
