"""Simulated re-ranking at every candidate cut-off.

Re-ranking a list at cut-off k re-orders the top-k retrieved documents by
the re-ranker's scores and leaves the tail in retrieved order ("composite"
list).  k = 0 means re-ranking is skipped entirely, which is a legal and
frequently optimal choice in this setting.

The sweep evaluates one metric on the composite list at every k in
0..depth.  It runs incrementally (growing the re-ranked head one document
per step) but is bitwise-equal to recomposing and re-scoring from scratch
at each k, because both paths share :func:`metrics.metric_from_prefix`.

The cost model is the point-wise re-ranker one: latency is proportional to
the number of re-ranker inferences, ``fixed_overhead + k * per_item``.
Presets below are derived from published per-query latencies at depths 100
and 1000 for an LLM re-ranker (29.77 s / 1000 items) and a pre-trained-LM
re-ranker (13.66 s / 1000 items).
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import CutoffOutOfRange, DocSetMismatch, MissingQuery
from .metrics import MetricId, QueryMetricContext, make_context, metric_from_prefix
from .runs import QrelsSet, RankedList, RerankPair, RunItem


@dataclass(frozen=True)
class CostModel:
    """Seconds per re-ranker inference plus a fixed per-query overhead."""

    per_item_latency: float
    fixed_overhead: float = 0.0

    def __post_init__(self):
        if self.per_item_latency < 0:
            raise ValueError("per_item_latency must be >= 0")

    def latency(self, k: int) -> float:
        return self.fixed_overhead + k * self.per_item_latency


LLM_RERANKER_COST = CostModel(per_item_latency=0.02977)
LM_RERANKER_COST = CostModel(per_item_latency=0.01366)


@dataclass(frozen=True)
class TruncationPrediction:
    """Per-query chosen cut-offs of one truncation method."""

    method_name: str
    cutoffs: Mapping[str, int]

    def __post_init__(self):
        for qid, k in self.cutoffs.items():
            if k < 0:
                raise ValueError(f"negative cut-off {k} for query {qid}")

    @property
    def query_ids(self) -> tuple[str, ...]:
        return tuple(sorted(self.cutoffs))


@dataclass(frozen=True)
class SweepMatrix:
    """query_id -> vector v with v[k] = metric of the composite at cut-off k."""

    metric: MetricId
    rows: Mapping[str, np.ndarray]

    def __getitem__(self, query_id: str) -> np.ndarray:
        return self.rows[query_id]

    @property
    def query_ids(self) -> tuple[str, ...]:
        return tuple(sorted(self.rows))


@dataclass(frozen=True)
class ReportRow:
    """One evaluated truncation method: means plus per-query detail."""

    method_name: str
    avg_k: float
    mean_metric: float
    mean_latency: float
    per_query_metric: Mapping[str, float]
    per_query_k: Mapping[str, int]


def _reranker_order_key(score_by_doc: Mapping[str, float]):
    return lambda doc: (-score_by_doc[doc], doc)


def compose_at_k(retrieved: RankedList, reranked: RankedList, k: int) -> RankedList:
    """Composite list: top-k re-ordered by re-ranker score, tail untouched.

    Ties in re-ranker scores break by doc id ascending.  The output carries
    synthetic strictly-decreasing scores (the composite order is not induced
    by any single score column).
    """
    n = len(retrieved)
    if not 0 <= k <= n:
        raise CutoffOutOfRange(f"k={k} outside [0, {n}] for query {retrieved.query_id}")
    if retrieved.doc_set != reranked.doc_set:
        raise DocSetMismatch(f"doc sets differ for query {retrieved.query_id}")
    score_by_doc = {item.doc_id: item.score for item in reranked.items}
    head = sorted(retrieved.doc_ids[:k], key=_reranker_order_key(score_by_doc))
    ordered = list(head) + list(retrieved.doc_ids[k:])
    items = tuple(
        RunItem(doc, float(n - i), i + 1) for i, doc in enumerate(ordered)
    )
    return RankedList(retrieved.query_id, items)


def sweep_row(
    retrieved: RankedList,
    reranked: RankedList,
    ctx: QueryMetricContext,
    metric: MetricId,
) -> np.ndarray:
    """Metric of the composite list at every cut-off 0..depth for one query.

    Incremental: the sorted re-ranked head grows by one insertion per step;
    the metric only ever reads the top ``min(metric.k, depth)`` documents.
    """
    n = len(retrieved)
    m = min(metric.k, n)
    score_by_doc = {item.doc_id: item.score for item in reranked.items}
    retrieved_docs = retrieved.doc_ids
    head: list[tuple[float, str]] = []
    values = np.empty(n + 1, dtype=float)
    for k in range(n + 1):
        if k > 0:
            doc = retrieved_docs[k - 1]
            bisect.insort(head, (-score_by_doc[doc], doc))
        if k >= m:
            prefix = [entry[1] for entry in head[:m]]
        else:
            prefix = [entry[1] for entry in head]
            prefix.extend(retrieved_docs[k : k + (m - k)])
        values[k] = metric_from_prefix(metric, prefix, ctx)
    return values


def sweep(pair: RerankPair, qrels: QrelsSet, metric: MetricId) -> SweepMatrix:
    """Per-query metric sweep over all candidate cut-offs."""
    rows = {}
    for qid in pair.query_ids:
        retrieved = pair.retrieved[qid]
        ctx = make_context(retrieved, qrels, metric)
        rows[qid] = sweep_row(retrieved, pair.reranked[qid], ctx, metric)
    return SweepMatrix(metric=metric, rows=rows)


def oracle_cutoff(values: Sequence[float] | np.ndarray) -> int:
    """Smallest index attaining the maximum of a sweep row."""
    arr = np.asarray(values)
    if arr.size == 0:
        raise ValueError("empty sweep row")
    return int(np.argmax(arr))


def oracle_predictions(matrix: SweepMatrix) -> TruncationPrediction:
    return TruncationPrediction(
        method_name="oracle",
        cutoffs={qid: oracle_cutoff(matrix[qid]) for qid in matrix.query_ids},
    )


def evaluate_prediction(
    pred: TruncationPrediction,
    pair: RerankPair,
    qrels: QrelsSet,
    metric: MetricId,
    cost: CostModel,
) -> ReportRow:
    """Average cut-off, mean metric, and mean latency of one method.

    The prediction must cover every query of the pair; per-query metric
    values are retained for paired significance testing.
    """
    query_ids = pair.query_ids
    missing = [qid for qid in query_ids if qid not in pred.cutoffs]
    if missing:
        raise MissingQuery(
            f"prediction {pred.method_name!r} misses queries: {', '.join(missing[:5])}"
        )
    per_metric: dict[str, float] = {}
    per_k: dict[str, int] = {}
    for qid in query_ids:
        k = int(pred.cutoffs[qid])
        composite = compose_at_k(pair.retrieved[qid], pair.reranked[qid], k)
        ctx = make_context(pair.retrieved[qid], qrels, metric)
        m = min(metric.k, len(composite))
        per_metric[qid] = metric_from_prefix(metric, composite.doc_ids[:m], ctx)
        per_k[qid] = k
    ks = np.array([per_k[qid] for qid in query_ids], dtype=float)
    vals = np.array([per_metric[qid] for qid in query_ids], dtype=float)
    lats = np.array([cost.latency(per_k[qid]) for qid in query_ids], dtype=float)
    return ReportRow(
        method_name=pred.method_name,
        avg_k=float(np.mean(ks)),
        mean_metric=float(np.mean(vals)),
        mean_latency=float(np.mean(lats)),
        per_query_metric=per_metric,
        per_query_k=per_k,
    )


def write_predictions(path, pred: TruncationPrediction) -> None:
    """TSV: ``query_id<TAB>k``, preceded by a ``# method=NAME`` header."""
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(f"# method={pred.method_name}\n")
        for qid in pred.query_ids:
            handle.write(f"{qid}\t{pred.cutoffs[qid]}\n")


def read_predictions(path) -> TruncationPrediction:
    """Read a prediction TSV; method name from the header or the file stem."""
    from pathlib import Path

    method = Path(path).stem
    cutoffs: dict[str, int] = {}
    with open(path, "r", encoding="utf-8") as handle:
        for line_no, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line.lstrip("#").strip()
                if body.startswith("method="):
                    method = body[len("method="):].strip()
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{line_no}: expected 'query_id<TAB>k'")
            qid, k_s = parts
            cutoffs[qid] = int(k_s)
    return TruncationPrediction(method_name=method, cutoffs=cutoffs)


def validate_cutoffs(pred: TruncationPrediction, depths: Mapping[str, int]) -> None:
    """Check 0 <= k <= depth for every covered query."""
    for qid, k in pred.cutoffs.items():
        if qid in depths and not 0 <= k <= depths[qid]:
            raise CutoffOutOfRange(
                f"method {pred.method_name!r}: k={k} outside [0, {depths[qid]}] "
                f"for query {qid}"
            )


def fixed_latency_presets() -> dict[str, CostModel]:
    return {"llm": LLM_RERANKER_COST, "lm": LM_RERANKER_COST}


def iter_query_rows(matrix: SweepMatrix) -> Iterable[tuple[str, np.ndarray]]:
    for qid in matrix.query_ids:
        yield qid, matrix[qid]
