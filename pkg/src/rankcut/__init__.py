"""rankcut: a lab for re-ranking cut-off prediction.

Simulates re-ranking at every candidate cut-off from precomputed run
files, scores effectiveness/efficiency trade-offs, runs truncation
methods, and evaluates them with rank metrics and paired significance
tests.
"""

from .errors import RankcutError
from .features import (
    EmbeddingStore,
    TfidfVectorizer,
    build_tfidf,
    export_features,
    neighbor_similarity,
    read_embeddings_file,
    tokenize,
)
from .gpd import GpdFit, cvm_statistic, fit_gpd, gpd_cdf, gpd_loglik, gpd_quantile
from .metrics import (
    MetricId,
    NDCG_AT_10,
    TTestResult,
    compute_metric,
    dcg_penalized_at_k,
    f1_at_k,
    judged_at_k,
    ndcg_at_k,
    paired_t_test,
    precision_at_k,
    recall_at_k,
)
from .runs import (
    QrelsSet,
    RankedList,
    RerankPair,
    RunItem,
    RunSet,
    pair_runs,
    parse_qrels,
    parse_run,
    read_corpus_file,
    read_qrels_file,
    read_run_file,
    serialize_run,
    write_run_file,
)
from .simulate import (
    CostModel,
    LLM_RERANKER_COST,
    LM_RERANKER_COST,
    ReportRow,
    SweepMatrix,
    TruncationPrediction,
    compose_at_k,
    evaluate_prediction,
    oracle_cutoff,
    oracle_predictions,
    read_predictions,
    sweep,
    write_predictions,
)
from .targets import (
    BETA_PRESETS,
    EetConfig,
    TargetVector,
    build_targets,
    eet,
    efficiency_decay,
    read_targets,
    rerank_gain,
    write_targets,
)
from .truncators import (
    FIXED_K_PRESETS,
    SurpriseConfig,
    SurpriseDecision,
    fixed_k,
    greedy_k,
    greedy_k_predict,
    surprise_predict,
    surprise_truncate,
)

__version__ = "0.1.0"

__all__ = [
    "BETA_PRESETS",
    "CostModel",
    "EetConfig",
    "EmbeddingStore",
    "FIXED_K_PRESETS",
    "GpdFit",
    "LLM_RERANKER_COST",
    "LM_RERANKER_COST",
    "MetricId",
    "NDCG_AT_10",
    "QrelsSet",
    "RankcutError",
    "RankedList",
    "ReportRow",
    "RerankPair",
    "RunItem",
    "RunSet",
    "SurpriseConfig",
    "SurpriseDecision",
    "SweepMatrix",
    "TTestResult",
    "TargetVector",
    "TfidfVectorizer",
    "TruncationPrediction",
    "build_targets",
    "build_tfidf",
    "compose_at_k",
    "compute_metric",
    "cvm_statistic",
    "dcg_penalized_at_k",
    "eet",
    "efficiency_decay",
    "evaluate_prediction",
    "export_features",
    "f1_at_k",
    "fit_gpd",
    "fixed_k",
    "gpd_cdf",
    "gpd_loglik",
    "gpd_quantile",
    "greedy_k",
    "greedy_k_predict",
    "judged_at_k",
    "ndcg_at_k",
    "neighbor_similarity",
    "oracle_cutoff",
    "oracle_predictions",
    "pair_runs",
    "paired_t_test",
    "parse_qrels",
    "parse_run",
    "precision_at_k",
    "read_corpus_file",
    "read_embeddings_file",
    "read_predictions",
    "read_qrels_file",
    "read_run_file",
    "read_targets",
    "recall_at_k",
    "rerank_gain",
    "serialize_run",
    "surprise_predict",
    "surprise_truncate",
    "sweep",
    "tokenize",
    "write_predictions",
    "write_run_file",
    "write_targets",
]
