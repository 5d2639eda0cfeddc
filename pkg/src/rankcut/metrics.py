"""Rank-quality metrics and the paired significance test.

Conventions, fixed package-wide:

- Binary relevance (precision/recall/F1, penalized DCG) comes from grade
  thresholding; unjudged documents count as non-relevant.
- nDCG uses linear gain (gain = grade) by default, ``2**grade - 1`` behind
  the ``gain="exponential"`` switch, discount ``log2(rank + 1)``, and an
  ideal ranking built from *all* judged documents of the query, not only
  those present in the list.
- ``judged@k`` is the only metric that distinguishes judged from unjudged.
- Aggregations over queries always run in ascending query id order so that
  floating-point sums are bitwise reproducible.

The paired t-test is two-sided; the p-value is the regularized incomplete
beta function ``I_{df/(df+t^2)}(df/2, 1/2)`` (scipy's ``betainc``, accurate
well past the 1e-10 target here).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.special import betainc

from .runs import QrelsSet, RankedList

log = logging.getLogger(__name__)

METRIC_KINDS = (
    "precision_at_k",
    "recall_at_k",
    "f1_at_k",
    "dcg_penalized_at_k",
    "ndcg_at_k",
    "judged_at_k",
)

SIGNIFICANCE_LEVEL = 0.05


@dataclass(frozen=True)
class MetricId:
    """A metric family plus its rank cut-off parameter.

    ``gain`` only affects ``ndcg_at_k`` ("linear" or "exponential").
    """

    kind: str
    k: int
    gain: str = "linear"

    def __post_init__(self):
        if self.kind not in METRIC_KINDS:
            raise ValueError(f"unknown metric kind {self.kind!r}")
        if self.k < 1:
            raise ValueError("metric parameter k must be >= 1")
        if self.gain not in ("linear", "exponential"):
            raise ValueError(f"unknown gain {self.gain!r}")

    @property
    def label(self) -> str:
        """Header spelling: the kind with the k value substituted in."""
        return self.kind.replace("_at_k", f"_at_{self.k}")

    @staticmethod
    def parse(text: str) -> "MetricId":
        """Parse labels like ``ndcg_at_10`` back into a MetricId."""
        stem, _, tail = text.rpartition("_at_")
        if not stem or not tail.isdigit():
            raise ValueError(f"cannot parse metric {text!r}")
        return MetricId(f"{stem}_at_k", int(tail))


NDCG_AT_10 = MetricId("ndcg_at_k", 10)


@dataclass(frozen=True)
class TTestResult:
    t_statistic: float
    p_value: float
    degrees_of_freedom: int
    significant: bool
    note: str | None = None


@dataclass(frozen=True)
class QueryMetricContext:
    """Per-query quantities that do not depend on the list order.

    For a fixed query and doc *set*, relevant count and ideal DCG are
    constants; sweeps over cut-offs reuse them across every composite
    ordering.
    """

    query_id: str
    n_relevant: int
    ideal_dcg: float
    qrels: QrelsSet = field(repr=False)


def _gain(grade: int, gain: str) -> float:
    if gain == "exponential":
        return float(2**grade - 1)
    return float(grade)


def ideal_dcg(qrels: QrelsSet, query_id: str, k: int, gain: str = "linear") -> float:
    """DCG of the best possible ranking of all judged docs of the query."""
    grades = sorted(
        (g for g in qrels.judged_for_query(query_id).values() if g > 0),
        reverse=True,
    )
    total = 0.0
    for i, grade in enumerate(grades[:k], start=1):
        total += _gain(grade, gain) / math.log2(i + 1)
    return total


def make_context(
    ranked: RankedList, qrels: QrelsSet, metric: MetricId
) -> QueryMetricContext:
    return QueryMetricContext(
        query_id=ranked.query_id,
        n_relevant=qrels.relevant_count_in(ranked),
        ideal_dcg=ideal_dcg(qrels, ranked.query_id, metric.k, metric.gain),
        qrels=qrels,
    )


def metric_from_prefix(
    metric: MetricId,
    prefix_doc_ids: Sequence[str],
    ctx: QueryMetricContext,
) -> float:
    """Evaluate a metric from the top-m document ids of a list.

    ``prefix_doc_ids`` must be the first ``min(metric.k, depth)`` documents
    in rank order.  This is the single arithmetic path for both direct
    metric calls and incremental sweeps, so the two agree bitwise.
    """
    qrels = ctx.qrels
    qid = ctx.query_id
    m = len(prefix_doc_ids)
    kind = metric.kind
    if kind == "ndcg_at_k":
        total = 0.0
        for i, doc in enumerate(prefix_doc_ids, start=1):
            grade = qrels.grade_of(qid, doc)
            if grade > 0:
                total += _gain(grade, metric.gain) / math.log2(i + 1)
        if ctx.ideal_dcg == 0.0:
            return 0.0
        return total / ctx.ideal_dcg
    if kind == "dcg_penalized_at_k":
        total = 0.0
        for i, doc in enumerate(prefix_doc_ids, start=1):
            y = 1.0 if qrels.is_relevant(qid, doc) else -1.0
            total += y / math.log2(i + 1)
        return total
    if kind == "judged_at_k":
        judged = sum(1 for doc in prefix_doc_ids if qrels.is_judged(qid, doc))
        return judged / m
    # binary prefix metrics
    hits = sum(1 for doc in prefix_doc_ids if qrels.is_relevant(qid, doc))
    if kind == "precision_at_k":
        return hits / m
    if kind == "recall_at_k":
        return hits / ctx.n_relevant if ctx.n_relevant else 0.0
    if kind == "f1_at_k":
        precision = hits / m
        recall = hits / ctx.n_relevant if ctx.n_relevant else 0.0
        if precision + recall == 0.0:
            return 0.0
        if precision == recall:
            return precision  # harmonic mean of equals, exact in floats too
        return 2.0 * precision * recall / (precision + recall)
    raise AssertionError(kind)


def compute_metric(metric: MetricId, ranked: RankedList, qrels: QrelsSet) -> float:
    """Evaluate ``metric`` on a full ranked list (k clamped to the depth)."""
    ctx = make_context(ranked, qrels, metric)
    m = min(metric.k, len(ranked))
    if m == 0:
        return 0.0
    return metric_from_prefix(metric, ranked.doc_ids[:m], ctx)


def _check_k(ranked: RankedList, k: int) -> None:
    if not 1 <= k <= len(ranked):
        raise ValueError(f"k={k} outside [1, {len(ranked)}]")


def precision_at_k(ranked: RankedList, qrels: QrelsSet, k: int) -> float:
    _check_k(ranked, k)
    return compute_metric(MetricId("precision_at_k", k), ranked, qrels)


def recall_at_k(ranked: RankedList, qrels: QrelsSet, k: int) -> float:
    _check_k(ranked, k)
    return compute_metric(MetricId("recall_at_k", k), ranked, qrels)


def f1_at_k(ranked: RankedList, qrels: QrelsSet, k: int) -> float:
    """Harmonic mean of precision@k and recall over the whole list.

    Returns 0 when no relevant item sits in the top k; queries with no
    relevant item anywhere in the list are additionally logged, since
    every cut-off is equally (un)attractive for them.
    """
    _check_k(ranked, k)
    if qrels.relevant_count_in(ranked) == 0:
        log.debug("query %s has no relevant item in the list", ranked.query_id)
    return compute_metric(MetricId("f1_at_k", k), ranked, qrels)


def dcg_penalized_at_k(ranked: RankedList, qrels: QrelsSet, k: int) -> float:
    """DCG with gains +1 (relevant) / -1 (non-relevant): non-monotonic in k."""
    _check_k(ranked, k)
    return compute_metric(MetricId("dcg_penalized_at_k", k), ranked, qrels)


def ndcg_at_k(
    ranked: RankedList, qrels: QrelsSet, k: int, gain: str = "linear"
) -> float:
    if k < 1:
        raise ValueError("k must be >= 1")
    metric = MetricId("ndcg_at_k", k, gain)
    if ideal_dcg(qrels, ranked.query_id, k, gain) == 0.0:
        log.debug("query %s has no judged relevant docs", ranked.query_id)
    return compute_metric(metric, ranked, qrels)


def judged_at_k(ranked: RankedList, qrels: QrelsSet, k: int) -> float:
    _check_k(ranked, k)
    return compute_metric(MetricId("judged_at_k", k), ranked, qrels)


def mean_over_queries(values: Mapping[str, float]) -> float:
    """Mean in ascending query id order (bitwise-stable aggregation)."""
    if not values:
        raise ValueError("no queries to aggregate")
    ordered = np.array([values[qid] for qid in sorted(values)], dtype=float)
    return float(np.mean(ordered))


def _aligned_arrays(
    a: Mapping[str, float] | Sequence[float],
    b: Mapping[str, float] | Sequence[float],
) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(a, Mapping) or isinstance(b, Mapping):
        if not (isinstance(a, Mapping) and isinstance(b, Mapping)):
            raise TypeError("mix of mapping and sequence inputs")
        if set(a) != set(b):
            raise ValueError("query sets differ between the two samples")
        keys = sorted(a)
        return (
            np.array([a[k] for k in keys], dtype=float),
            np.array([b[k] for k in keys], dtype=float),
        )
    if len(a) != len(b):
        raise ValueError("samples have different lengths")
    return np.asarray(a, dtype=float), np.asarray(b, dtype=float)


def paired_t_test(
    a: Mapping[str, float] | Sequence[float],
    b: Mapping[str, float] | Sequence[float],
) -> TTestResult:
    """Two-sided paired t-test on per-query differences.

    Mappings are aligned by query id (the key sets must match exactly);
    sequences are assumed pre-aligned.  Degenerate cases: all differences
    zero gives t=0, p=1; identical nonzero differences have zero variance
    and are reported as t=+/-inf, p=0, flagged via ``note``.
    """
    xs, ys = _aligned_arrays(a, b)
    n = xs.size
    if n < 2:
        raise ValueError("paired t-test needs at least 2 pairs")
    diffs = xs - ys
    df = n - 1
    mean = float(np.mean(diffs))
    sd = float(np.std(diffs, ddof=1))
    if sd == 0.0:
        if mean == 0.0:
            return TTestResult(0.0, 1.0, df, False, note="all_equal")
        t = math.inf if mean > 0 else -math.inf
        return TTestResult(t, 0.0, df, True, note="zero_variance")
    t = mean / (sd / math.sqrt(n))
    p = float(betainc(df / 2.0, 0.5, df / (df + t * t)))
    return TTestResult(t, p, df, p < SIGNIFICANCE_LEVEL)
