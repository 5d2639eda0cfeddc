"""Effectiveness/efficiency trade-off (EET) targets over candidate cut-offs.

EET scores a cut-off k by the weighted harmonic mean of two quantities:

- effectiveness sigma: the re-ranking gain at k, i.e. the metric of the
  composite list at k minus the metric without re-ranking (k = 0);
- efficiency gamma: exponential decay ``exp(alpha * k)`` with alpha <= 0.

    eet = (1 + beta^2) * (gamma * sigma) / (beta^2 * sigma + gamma)

beta = 0 reduces to sigma alone (effectiveness only); larger beta weights
efficiency more.  Negative gains are clamped to 0 before combining: the
harmonic mean is not meaningful for negative effectiveness, and "re-ranking
hurts" and "re-ranking is useless" should steer an optimizer identically.

A consequence worth knowing: the k = 0 entry is always 0 (sigma = 0 there),
so methods trained to put probability mass on high-target cut-offs can
never learn to prefer skipping re-ranking from raw targets alone.

Targets are stored raw (not normalized); one target file per trade-off:

    # beta=<v> alpha=<v> metric=<label>
    <query_id> t0 t1 ... tn        (9 significant digits)
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

import numpy as np

from .metrics import NDCG_AT_10, MetricId
from .runs import QrelsSet, RerankPair
from .simulate import SweepMatrix, sweep

DEFAULT_ALPHA = -0.001
BETA_PRESETS = (0.0, 1.0, 2.0)


@dataclass(frozen=True)
class EetConfig:
    beta: float
    alpha: float = DEFAULT_ALPHA
    metric: MetricId = NDCG_AT_10

    def __post_init__(self):
        if self.beta < 0:
            raise ValueError("beta must be >= 0")
        if self.alpha > 0:
            raise ValueError("alpha must be <= 0")


@dataclass(frozen=True)
class TargetVector:
    """query_id -> vector t with t[k] = EET value at cut-off k."""

    beta: float
    alpha: float
    metric: MetricId
    vectors: Mapping[str, np.ndarray]

    def __getitem__(self, query_id: str) -> np.ndarray:
        return self.vectors[query_id]

    @property
    def query_ids(self) -> tuple[str, ...]:
        return tuple(sorted(self.vectors))


def efficiency_decay(k: int, alpha: float) -> float:
    """gamma = exp(alpha * k); 1.0 at k = 0 and for alpha = 0."""
    if k < 0:
        raise ValueError("k must be >= 0")
    return math.exp(alpha * k)


def rerank_gain(sweep_values, k: int) -> float:
    """sigma = metric at cut-off k minus metric without re-ranking."""
    row = np.asarray(sweep_values, dtype=float)
    if not 0 <= k < row.size:
        raise ValueError(f"k={k} outside [0, {row.size - 1}]")
    return float(row[k] - row[0])


def eet(sigma: float, gamma: float, beta: float) -> float:
    """Weighted harmonic mean of gain and efficiency, clamped at zero gain.

    beta = 0 returns the clamped gain exactly (no division involved).
    """
    clamped = max(sigma, 0.0)
    if clamped == 0.0:
        return 0.0
    if beta == 0.0:
        return clamped
    b2 = beta * beta
    return (1.0 + b2) * (gamma * clamped) / (b2 * clamped + gamma)


def targets_from_sweep_row(values: np.ndarray, beta: float, alpha: float) -> np.ndarray:
    """EET target vector of one query from its sweep row."""
    out = np.empty_like(values, dtype=float)
    base = float(values[0])
    for k in range(values.size):
        sigma = float(values[k]) - base
        out[k] = eet(sigma, efficiency_decay(k, alpha), beta)
    return out


def targets_from_sweep(matrix: SweepMatrix, config: EetConfig) -> TargetVector:
    vectors = {
        qid: targets_from_sweep_row(matrix[qid], config.beta, config.alpha)
        for qid in matrix.query_ids
    }
    return TargetVector(
        beta=config.beta, alpha=config.alpha, metric=matrix.metric, vectors=vectors
    )


def build_targets(
    pair: RerankPair,
    qrels: QrelsSet,
    config: EetConfig,
    matrix: SweepMatrix | None = None,
) -> TargetVector:
    """Sweep (unless a matrix is supplied) and convert to EET targets."""
    if matrix is None:
        matrix = sweep(pair, qrels, config.metric)
    elif matrix.metric != config.metric:
        raise ValueError(
            f"sweep metric {matrix.metric.label} != target metric {config.metric.label}"
        )
    return targets_from_sweep(matrix, config)


def write_targets(path: str | Path, targets: TargetVector) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(
            f"# beta={targets.beta:g} alpha={targets.alpha:g} "
            f"metric={targets.metric.label}\n"
        )
        for qid in targets.query_ids:
            values = " ".join(f"{v:.9g}" for v in targets[qid])
            handle.write(f"{qid} {values}\n")


def read_targets(path: str | Path) -> TargetVector:
    beta = alpha = None
    metric = NDCG_AT_10
    vectors: dict[str, np.ndarray] = {}
    with open(path, "r", encoding="utf-8") as handle:
        for raw in handle:
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                for token in line.lstrip("#").split():
                    key, _, value = token.partition("=")
                    if key == "beta":
                        beta = float(value)
                    elif key == "alpha":
                        alpha = float(value)
                    elif key == "metric":
                        metric = MetricId.parse(value)
                continue
            qid, *rest = line.split()
            vectors[qid] = np.array([float(v) for v in rest], dtype=float)
    if beta is None or alpha is None:
        raise ValueError(f"{path}: missing '# beta=... alpha=...' header")
    return TargetVector(beta=beta, alpha=alpha, metric=metric, vectors=vectors)
