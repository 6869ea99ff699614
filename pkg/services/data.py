import logging
import re
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd

from exceptions import (
    DataFormatException,
    DuplicateException,
    NotFoundException,
    SchemaMismatchException,
    ValidationException,
)
from models.claims import (
    ClaimRecord,
    FeatureSchema,
    FoldPlan,
    LabeledPoint,
    NormalizationParams,
)
from models.enums import Label
from utils.base import derive_rng
from utils.serialization import read_json, write_json

logger = logging.getLogger(__name__)

ID_COLUMN = "id"
LABEL_COLUMN = "label"


def load_schema(path: Optional[Path] = None, dimension: int = 41) -> FeatureSchema:
    """
    读取特征 schema

    文件格式为 JSON {"names": [...]} 或名称数组；未提供路径时使用通用名称。
    """
    if path is None:
        return FeatureSchema.default(dimension)
    data = read_json(path)
    names = data.get("names") if isinstance(data, dict) else data
    if not isinstance(names, list):
        raise DataFormatException(f"{path}: expected a list of feature names")
    try:
        return FeatureSchema(names=names, dimension=len(names))
    except ValueError as e:
        raise ValidationException(f"invalid feature schema {path}: {e}")


class ClaimDataService:
    """论文特征数据服务：读取、归一化、分折"""

    def __init__(self, schema: FeatureSchema):
        self.schema = schema

    # ------------------------------------------------------------------ 读取

    def load_dataset(self, path: Path) -> List[ClaimRecord]:
        """
        读取 CSV（或字段相同的 JSON）数据集

        Args:
            path: 文件路径

        Returns:
            ClaimRecord 列表，空白特征记为缺失
        """
        path = Path(path)
        if not path.exists():
            raise NotFoundException("Dataset", str(path))

        if path.suffix.lower() == ".json":
            frame = self._read_json_frame(path)
        else:
            frame = self._read_csv_frame(path)

        records = self._frame_to_records(frame)
        logger.info(f"Loaded {len(records)} claims from {path}")
        return records

    def _expected_columns(self, with_label: bool) -> List[str]:
        columns = [ID_COLUMN] + list(self.schema.names)
        return columns + [LABEL_COLUMN] if with_label else columns

    def _check_header(self, columns: Sequence[str]) -> None:
        columns = list(columns)
        if columns not in (
            self._expected_columns(True),
            self._expected_columns(False),
        ):
            raise DataFormatException(
                "header must be 'id', the schema's feature names in order, "
                f"and an optional 'label' column; got {columns}"
            )

    def _read_csv_frame(self, path: Path) -> pd.DataFrame:
        try:
            # 表头按普通行读入：不让 pandas 推断隐式索引列
            raw = pd.read_csv(
                path, header=None, dtype=str, keep_default_na=False, encoding="utf-8"
            )
        except pd.errors.EmptyDataError:
            raise DataFormatException(f"{path} is empty; a header row is required")
        except pd.errors.ParserError as e:
            # pandas 报告的是文件行号（含表头，从 1 开始）
            match = re.search(r"line (\d+)", str(e))
            row_index = int(match.group(1)) - 2 if match else None
            raise DataFormatException(f"wrong number of fields: {e}", row_index)

        columns = list(raw.iloc[0])
        self._check_header(columns)
        frame = raw.iloc[1:].reset_index(drop=True)
        frame.columns = columns
        short_rows = frame.isna().any(axis=1)
        if short_rows.any():
            row_index = int(np.flatnonzero(short_rows.to_numpy())[0])
            raise DataFormatException(
                f"expected {len(frame.columns)} fields", row_index
            )
        return frame

    def _read_json_frame(self, path: Path) -> pd.DataFrame:
        rows = read_json(path)
        if not isinstance(rows, list):
            raise DataFormatException(f"{path}: expected a JSON array of claims")

        with_label = any(LABEL_COLUMN in row for row in rows if isinstance(row, dict))
        expected = self._expected_columns(with_label)
        for index, row in enumerate(rows):
            if not isinstance(row, dict) or set(row) != set(expected):
                raise DataFormatException(
                    f"expected fields {expected}", row_index=index
                )

        frame = pd.DataFrame.from_records(rows, columns=expected)
        return frame.astype(object).where(frame.notna(), "").astype(str)

    def _parse_features(self, frame: pd.DataFrame) -> np.ndarray:
        columns = []
        for name in self.schema.names:
            raw = frame[name].str.strip()
            blank = raw == ""
            numeric = pd.to_numeric(raw.where(~blank), errors="coerce")
            bad = (numeric.isna() & ~blank) | np.isinf(numeric)
            if bad.any():
                row_index = int(np.flatnonzero(bad.to_numpy())[0])
                token = frame[name].iloc[row_index]
                raise DataFormatException(
                    f"feature '{name}': cannot parse '{token}' as a number",
                    row_index,
                    token,
                )
            columns.append(numeric.to_numpy(dtype=float))
        if not columns:
            return np.empty((len(frame), 0))
        return np.column_stack(columns) if len(frame) else np.empty((0, len(columns)))

    def _parse_labels(self, frame: pd.DataFrame) -> List[Optional[Label]]:
        if LABEL_COLUMN not in frame.columns:
            return [None] * len(frame)
        labels = []
        for row_index, token in enumerate(frame[LABEL_COLUMN].str.strip()):
            if token == "":
                labels.append(None)
                continue
            try:
                labels.append(Label.from_token(token))
            except ValueError:
                raise DataFormatException(
                    f"unknown label token '{token}'", row_index, token
                )
        return labels

    def _frame_to_records(self, frame: pd.DataFrame) -> List[ClaimRecord]:
        features = self._parse_features(frame)
        labels = self._parse_labels(frame)

        records = []
        seen = set()
        for row_index, claim_id in enumerate(frame[ID_COLUMN].str.strip()):
            if not claim_id:
                raise DataFormatException("claim id is empty", row_index)
            if claim_id in seen:
                raise DuplicateException(claim_id, row_index)
            seen.add(claim_id)
            raw = [None if np.isnan(v) else float(v) for v in features[row_index]]
            records.append(
                ClaimRecord(id=claim_id, raw_features=raw, label=labels[row_index])
            )
        return records

    # ------------------------------------------------------------------ 归一化

    def _check_record(self, record: ClaimRecord) -> None:
        if len(record.raw_features) != self.schema.dimension:
            raise SchemaMismatchException(
                self.schema.dimension,
                len(record.raw_features),
                f"claim '{record.id}'",
            )

    def _matrix(self, records: Sequence[ClaimRecord]) -> np.ndarray:
        for record in records:
            self._check_record(record)
        return np.array(
            [
                [np.nan if v is None else v for v in record.raw_features]
                for record in records
            ],
            dtype=float,
        ).reshape(len(records), self.schema.dimension)

    def fit_normalizer(self, train: Sequence[ClaimRecord]) -> NormalizationParams:
        """
        拟合 min/max/median（只使用训练集中的观测值）
        """
        if not train:
            raise ValidationException("cannot fit a normalizer on an empty training set")
        matrix = self._matrix(train)
        observed = (~np.isnan(matrix)).sum(axis=0)
        for name, count in zip(self.schema.names, observed):
            if count == 0:
                raise ValidationException(
                    f"feature '{name}' has no observed values in the training set"
                )

        return NormalizationParams(
            feature_names=list(self.schema.names),
            mins=np.nanmin(matrix, axis=0).tolist(),
            maxs=np.nanmax(matrix, axis=0).tolist(),
            medians=np.nanmedian(matrix, axis=0).tolist(),
        )

    def apply_normalizer(
        self, params: NormalizationParams, record: ClaimRecord
    ) -> np.ndarray:
        """
        缺失值以训练中位数填补，再 (v − min)/(max − min) 映射并截断到 [0,1]；
        常数特征映射为 0.5
        """
        self._check_record(record)
        if params.dimension != self.schema.dimension:
            raise SchemaMismatchException(
                self.schema.dimension, params.dimension, "normalizer"
            )
        x = np.array(
            [np.nan if v is None else v for v in record.raw_features], dtype=float
        )
        mins = np.asarray(params.mins)
        spans = np.asarray(params.maxs) - mins
        x = np.where(np.isnan(x), np.asarray(params.medians), x)
        constant = spans <= 0
        scaled = (x - mins) / np.where(constant, 1.0, spans)
        return np.clip(np.where(constant, 0.5, scaled), 0.0, 1.0)

    def to_points(
        self, params: NormalizationParams, records: Sequence[ClaimRecord]
    ) -> List[LabeledPoint]:
        """批量归一化为 LabeledPoint"""
        return [
            LabeledPoint(
                claim_id=record.id,
                point=tuple(float(v) for v in self.apply_normalizer(params, record)),
                label=record.label,
            )
            for record in records
        ]

    # ------------------------------------------------------------------ 分折

    def split_folds(
        self, dataset: Sequence[ClaimRecord], fold_count: int, seed: int
    ) -> FoldPlan:
        """
        按标签分层的确定性分折

        每个类别内部按种子打乱后，按类别顺序轮流发牌到各折，
        因而各折总数与各类别计数的差都不超过 1。
        """
        if fold_count < 2:
            raise ValidationException(f"fold_count must be at least 2, got {fold_count}")
        if len(dataset) < fold_count:
            raise ValidationException(
                f"cannot split {len(dataset)} claims into {fold_count} folds"
            )
        for record in dataset:
            if record.label is None:
                raise ValidationException(
                    f"cross-validation requires labels; claim '{record.id}' is unlabeled"
                )

        rng = derive_rng(seed, "folds")
        ordered = []
        for label in (Label.REPLICABLE, Label.NOT_REPLICABLE):
            ids = [record.id for record in dataset if record.label is label]
            ordered.extend(ids[i] for i in rng.permutation(len(ids)))

        assignments = {claim_id: pos % fold_count for pos, claim_id in enumerate(ordered)}
        plan = FoldPlan(fold_count=fold_count, assignments=assignments, seed=seed)
        logger.info(f"Split {len(dataset)} claims into folds of sizes {plan.fold_sizes()}")
        return plan


def export_fold_plan(plan: FoldPlan, path: Path) -> Path:
    """导出 {claim_id: fold_index}，按 claim id 排序"""
    return write_json(path, dict(sorted(plan.assignments.items())))


def get_claim_data_service(schema: Optional[FeatureSchema] = None) -> ClaimDataService:
    """获取数据服务实例"""
    return ClaimDataService(schema or FeatureSchema.default())
