"""Unsupervised truncation methods: Fixed-k, Greedy-k, and Surprise.

Fixed-k applies one re-ranking depth to every query (capped at each list's
length).  Greedy-k picks the single depth that maximizes the mean training
target.  Surprise calibrates retrieval scores with a generalized Pareto
tail fit and truncates where items stop looking like tail (signal) members.

Surprise reconstruction
-----------------------
Only retrieval scores are used.  Scores arrive sorted descending; the high
scores are the signal tail of interest and the low scores form the bulk,
so the upper tail of the score distribution is modeled directly:

1. candidate thresholds are score quantiles (default 0.5..0.9); candidates
   are tried from the smallest tail (highest quantile) downwards;
2. exceedances over a candidate threshold get a GPD fit; the first
   candidate whose Cramér-von Mises statistic is at or below the
   acceptance level wins (default 0.461, about the 10% critical value);
3. every item's score maps to a calibrated tail probability: the fitted
   CDF of its excess over the threshold, 0 for items at or below it;
4. the prediction is the largest k such that items 1..k all have
   calibrated probability >= the cut probability (default 0.5): the whole
   list if all pass, 1 if even the first item fails (the method always
   re-ranks at least one item).

If no candidate passes the goodness-of-fit check the method falls back to
the full list and flags the query.  All knobs live in
:class:`SurpriseConfig`; see ``demos/04_surprise_calibration.py`` for a
worked example of the tail orientation.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
import numpy as np

from .errors import EmptyTraining, TooFewSamples
from .gpd import GpdFit, fit_gpd, gpd_cdf
from .runs import RankedList, RunSet
from .simulate import TruncationPrediction
from .targets import TargetVector

log = logging.getLogger(__name__)

FIXED_K_PRESETS = (10, 20, 100, 200, 1000)


def fixed_k(run: RunSet, k: int, method_name: str | None = None) -> TruncationPrediction:
    """Every query truncated at min(k, list depth)."""
    if k < 0:
        raise ValueError("k must be >= 0")
    name = method_name or f"fixed_k_{k}"
    return TruncationPrediction(
        method_name=name,
        cutoffs={qid: min(k, len(run[qid])) for qid in run.query_ids},
    )


def greedy_k(train_targets: TargetVector) -> int:
    """Depth maximizing the mean target across training queries.

    Ties break toward the smallest k.  Queries shorter than the longest one
    contribute their final target value to deeper cut-offs (a fixed depth
    beyond a list's end truncates at the end, so its target is the last
    entry).
    """
    qids = train_targets.query_ids
    if not qids:
        raise EmptyTraining("no training queries")
    max_len = max(train_targets[qid].size for qid in qids)
    acc = np.zeros(max_len, dtype=float)
    for qid in qids:
        vec = train_targets[qid]
        if vec.size < max_len:
            vec = np.concatenate([vec, np.full(max_len - vec.size, vec[-1])])
        acc += vec
    return int(np.argmax(acc / len(qids)))


def greedy_k_predict(
    run: RunSet, train_targets: TargetVector, method_name: str | None = None
) -> TruncationPrediction:
    k = greedy_k(train_targets)
    name = method_name or f"greedy_k_beta{train_targets.beta:g}"
    return fixed_k(run, k, method_name=name)


@dataclass(frozen=True)
class SurpriseConfig:
    candidate_threshold_quantiles: tuple[float, ...] = (0.5, 0.6, 0.7, 0.8, 0.9)
    cvm_acceptance_level: float = 0.461
    calibrated_cut_probability: float = 0.5
    min_exceedances: int = 10

    def __post_init__(self):
        qs = self.candidate_threshold_quantiles
        if not qs or any(not 0.0 < q < 1.0 for q in qs):
            raise ValueError("threshold quantiles must lie in (0, 1)")
        if any(b <= a for a, b in zip(qs, qs[1:])):
            raise ValueError("threshold quantiles must be strictly increasing")
        if not 0.0 < self.calibrated_cut_probability < 1.0:
            raise ValueError("calibrated_cut_probability must lie in (0, 1)")
        if self.cvm_acceptance_level <= 0:
            raise ValueError("cvm_acceptance_level must be > 0")
        if self.min_exceedances < 2:
            raise ValueError("min_exceedances must be >= 2")


@dataclass(frozen=True)
class SurpriseDecision:
    """Cut-off plus the audit trail of the accepted tail fit."""

    query_id: str
    k: int
    fit: GpdFit | None
    threshold_quantile: float | None
    fallback: bool

    def to_record(self) -> dict:
        record = {
            "query_id": self.query_id,
            "k": self.k,
            "fallback": self.fallback,
            "threshold_quantile": self.threshold_quantile,
        }
        if self.fit is not None:
            record.update(
                threshold_u=self.fit.threshold_u,
                shape_xi=self.fit.shape_xi,
                scale=self.fit.scale,
                n_exceedances=self.fit.n_exceedances,
                cvm_statistic=self.fit.cvm_statistic,
            )
        return record


def leading_pass_count(probabilities, cut: float) -> int:
    """Largest k such that all of positions 1..k reach the cut probability."""
    k = 0
    for p in probabilities:
        if p < cut:
            break
        k += 1
    return k


def surprise_diagnose(ranked: RankedList, config: SurpriseConfig) -> SurpriseDecision:
    """Run the full Surprise pipeline for one query, keeping diagnostics."""
    scores = np.asarray(ranked.scores, dtype=float)
    n = scores.size
    if n < config.min_exceedances:
        raise TooFewSamples(
            f"query {ranked.query_id}: {n} items < minimum {config.min_exceedances}"
        )

    accepted: GpdFit | None = None
    accepted_quantile = None
    for quantile in sorted(config.candidate_threshold_quantiles, reverse=True):
        u = float(np.quantile(scores, quantile))
        excess = scores[scores > u] - u
        if excess.size < config.min_exceedances:
            continue
        if np.all(excess == excess[0]):
            continue
        fit = fit_gpd(excess, threshold_u=u, min_exceedances=config.min_exceedances)
        if fit.cvm_statistic <= config.cvm_acceptance_level:
            accepted = fit
            accepted_quantile = quantile
            break

    if accepted is None:
        log.warning(
            "query %s: no tail threshold passed the CvM check, keeping full list",
            ranked.query_id,
        )
        return SurpriseDecision(ranked.query_id, n, None, None, fallback=True)

    probabilities = np.where(
        scores > accepted.threshold_u,
        gpd_cdf(scores - accepted.threshold_u, accepted.shape_xi, accepted.scale),
        0.0,
    )
    k = max(leading_pass_count(probabilities, config.calibrated_cut_probability), 1)
    return SurpriseDecision(ranked.query_id, k, accepted, accepted_quantile, fallback=False)


def surprise_truncate(ranked: RankedList, config: SurpriseConfig | None = None) -> int:
    """Score-threshold truncation via extreme-value calibration."""
    return surprise_diagnose(ranked, config or SurpriseConfig()).k


def surprise_predict(
    run: RunSet,
    config: SurpriseConfig | None = None,
    method_name: str = "surprise",
) -> tuple[TruncationPrediction, list[SurpriseDecision]]:
    """Surprise over a whole run; returns predictions plus per-query audits."""
    config = config or SurpriseConfig()
    decisions = [surprise_diagnose(run[qid], config) for qid in run.query_ids]
    cutoffs = {decision.query_id: decision.k for decision in decisions}
    return TruncationPrediction(method_name=method_name, cutoffs=cutoffs), decisions
