import argparse
import os
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np
import pandas as pd

# 添加项目根目录到路径
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from models.claims import ClaimRecord, FeatureSchema
from models.enums import Label
from services.data import ID_COLUMN, LABEL_COLUMN
from utils.base import derive_rng


class SyntheticClaimsBuilder:
    """
    合成 claim 数据集生成器

    两个不相交的球分别对应 Replicable / NotReplicable，
    另有一部分 claim 远离两个球（用于产生弃权），并加入标签噪声。

    球内的点分两层：core_fraction 的点落在半径 core_scale * ball_radius 的
    致密核心内，其余在整个球内均匀分布（高维下贴近球面）。核心点须少于全部点的
    一半：中位最近邻距离取自外层点，锚在核心上的 agent 覆盖整个核心。
    """

    def __init__(
        self,
        n_claims: int = 192,
        dimension: int = 41,
        far_fraction: float = 0.25,
        noise_rate: float = 0.05,
        ball_radius: float = 1.0,
        separation: float = 0.2,
        core_fraction: float = 0.6,
        core_scale: float = 0.15,
        missing_rate: float = 0.0,
        seed: int = 0,
    ):
        self.n_claims = n_claims
        self.dimension = dimension
        self.far_fraction = far_fraction
        self.noise_rate = noise_rate
        self.ball_radius = ball_radius
        self.separation = separation
        self.core_fraction = core_fraction
        self.core_scale = core_scale
        self.missing_rate = missing_rate
        self.seed = seed

        signs = derive_rng(seed, "synthetic", "centers").choice([-1.0, 1.0], dimension)
        self.centers = {
            Label.REPLICABLE: 0.5 + separation * signs,
            Label.NOT_REPLICABLE: 0.5 - separation * signs,
        }

    @property
    def schema(self) -> FeatureSchema:
        return FeatureSchema.default(self.dimension)

    def _uniform_ball(
        self, center: np.ndarray, radius: float, count: int, rng: np.random.Generator
    ) -> np.ndarray:
        directions = rng.normal(size=(count, self.dimension))
        directions /= np.linalg.norm(directions, axis=1, keepdims=True)
        radii = radius * rng.uniform(size=count) ** (1.0 / self.dimension)
        return center + directions * radii[:, None]

    def _in_ball(self, center: np.ndarray, count: int, rng: np.random.Generator) -> np.ndarray:
        """核心 + 外层两层采样"""
        n_core = int(round(self.core_fraction * count))
        return np.vstack(
            [
                self._uniform_ball(center, self.core_scale * self.ball_radius, n_core, rng),
                self._uniform_ball(center, self.ball_radius, count - n_core, rng),
            ]
        )

    def _far(self, count: int, rng: np.random.Generator) -> np.ndarray:
        """单位立方体内、距两个球心都超过 1.5 倍半径的点"""
        points = []
        while len(points) < count:
            candidate = rng.uniform(size=self.dimension)
            distances = [np.linalg.norm(candidate - c) for c in self.centers.values()]
            if min(distances) > 1.5 * self.ball_radius:
                points.append(candidate)
        return np.array(points).reshape(count, self.dimension)

    def _nearer_label(self, point: np.ndarray) -> Label:
        yes = np.linalg.norm(point - self.centers[Label.REPLICABLE])
        no = np.linalg.norm(point - self.centers[Label.NOT_REPLICABLE])
        return Label.REPLICABLE if yes <= no else Label.NOT_REPLICABLE

    def build(self) -> List[ClaimRecord]:
        """生成 claim 记录（id 为 C001 起的定长编号）"""
        rng = derive_rng(self.seed, "synthetic", "claims")
        n_far = int(round(self.far_fraction * self.n_claims))
        n_yes = (self.n_claims - n_far + 1) // 2
        n_no = self.n_claims - n_far - n_yes

        points = np.vstack(
            [
                self._in_ball(self.centers[Label.REPLICABLE], n_yes, rng),
                self._in_ball(self.centers[Label.NOT_REPLICABLE], n_no, rng),
                self._far(n_far, rng),
            ]
        )
        labels = (
            [Label.REPLICABLE] * n_yes
            + [Label.NOT_REPLICABLE] * n_no
            + [self._nearer_label(p) for p in points[n_yes + n_no :]]
        )

        flipped = rng.choice(
            self.n_claims, size=int(round(self.noise_rate * self.n_claims)), replace=False
        )
        for index in flipped:
            labels[index] = (
                Label.NOT_REPLICABLE if labels[index] is Label.REPLICABLE else Label.REPLICABLE
            )

        points = np.clip(points, 0.0, 1.0)
        missing = rng.uniform(size=points.shape) < self.missing_rate
        order = rng.permutation(self.n_claims)
        width = max(3, len(str(self.n_claims)))

        records = []
        for number, index in enumerate(order, start=1):
            raw = [
                None if missing[index, j] else float(points[index, j])
                for j in range(self.dimension)
            ]
            records.append(
                ClaimRecord(id=f"C{number:0{width}d}", raw_features=raw, label=labels[index])
            )
        return records

    def to_frame(self, records: List[ClaimRecord], with_labels: bool = True) -> pd.DataFrame:
        """记录 -> 与 load_dataset 相同列布局的 DataFrame"""
        rows = []
        for record in records:
            row = {ID_COLUMN: record.id}
            row.update(
                {
                    name: "" if value is None else repr(value)
                    for name, value in zip(self.schema.names, record.raw_features)
                }
            )
            if with_labels:
                row[LABEL_COLUMN] = record.label.value if record.label else ""
            rows.append(row)
        columns = [ID_COLUMN] + list(self.schema.names)
        return pd.DataFrame(rows, columns=columns + ([LABEL_COLUMN] if with_labels else []))

    def write_csv(
        self,
        path: Path,
        records: Optional[List[ClaimRecord]] = None,
        with_labels: bool = True,
    ) -> Path:
        """写出 CSV 数据集"""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        records = records if records is not None else self.build()
        self.to_frame(records, with_labels).to_csv(path, index=False)
        return path


def main():
    parser = argparse.ArgumentParser(description="生成合成 claim 数据集")
    parser.add_argument("--out", default="data/synthetic_claims.csv")
    parser.add_argument("--claims", type=int, default=192)
    parser.add_argument("--dimension", type=int, default=41)
    parser.add_argument("--far-fraction", type=float, default=0.25)
    parser.add_argument("--noise", type=float, default=0.05)
    parser.add_argument("--core-fraction", type=float, default=0.6)
    parser.add_argument("--core-scale", type=float, default=0.15)
    parser.add_argument("--missing-rate", type=float, default=0.0)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--unlabeled", action="store_true", help="不写 label 列")
    args = parser.parse_args()

    builder = SyntheticClaimsBuilder(
        n_claims=args.claims,
        dimension=args.dimension,
        far_fraction=args.far_fraction,
        noise_rate=args.noise,
        core_fraction=args.core_fraction,
        core_scale=args.core_scale,
        missing_rate=args.missing_rate,
        seed=args.seed,
    )
    path = builder.write_csv(Path(args.out), with_labels=not args.unlabeled)
    print(f"已生成 {args.claims} 条 claim: {path}")


if __name__ == "__main__":
    main()
