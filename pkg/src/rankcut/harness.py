"""Config-driven experiment pipeline and report generation.

The pipeline is a chain of file-producing steps over one experiment
configuration (a single JSON document):

    sweep -> oracle / targets -> features / truncate -> evaluate / plotdata

The sweep cache is the single numeric source downstream: targets, oracle
cut-offs, and evaluation all read composite-list metric values from it, so
every method comparison is exactly consistent.  The cache is mandatory;
commands that need it fail fast when it is missing rather than recomputing
an expensive sweep implicitly.

Determinism: all per-query work is merged in ascending query id order,
floats are serialized with ``repr`` (lossless round-trip), and files are
written atomically (temp file + rename).  Identical config + inputs give
byte-identical outputs.
"""

from __future__ import annotations

import json
import logging
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from . import features as feats
from .errors import ConfigError, MissingQuery
from .metrics import MetricId, paired_t_test
from .runs import (
    QrelsSet,
    RerankPair,
    pair_runs,
    read_corpus_file,
    read_qrels_file,
    read_run_file,
)
from .simulate import (
    CostModel,
    ReportRow,
    SweepMatrix,
    TruncationPrediction,
    oracle_cutoff,
    read_predictions,
    sweep,
    validate_cutoffs,
    write_predictions,
)
from .targets import EetConfig, read_targets, targets_from_sweep, write_targets
from .truncators import (
    SurpriseConfig,
    fixed_k,
    greedy_k_predict,
    surprise_predict,
)

log = logging.getLogger(__name__)

CONFIG_SCHEMA_VERSION = 1
NO_RERANK_METHOD = "w/o re-ranking"
ORACLE_METHOD = "oracle"
SIGNIFICANCE_SYMBOLS = ("*", "§", "†", "‡", "#")
HISTOGRAM_BINS = 20

_INPUT_PATH_KEYS = ("retrieved_run", "reranked_run", "qrels", "corpus", "embeddings")
_OUTPUT_PATH_KEYS = (
    "sweep_cache",
    "targets_dir",
    "features_dir",
    "predictions_dir",
    "reports_dir",
)


@dataclass(frozen=True)
class ExperimentConfig:
    dataset_label: str
    retrieved_run: Path
    reranked_run: Path
    qrels: Path
    sweep_cache: Path
    targets_dir: Path
    features_dir: Path
    predictions_dir: Path
    reports_dir: Path
    metric: MetricId
    eet_presets: tuple[EetConfig, ...]
    cost_model: CostModel
    relevance_threshold: int
    list_depth: int
    significance_baselines: tuple[str, ...]
    frontier_ks: tuple[int, ...]
    corpus: Path | None = None
    embeddings: Path | None = None
    surprise: SurpriseConfig = field(default_factory=SurpriseConfig)


def load_config(path: str | Path) -> ExperimentConfig:
    """Load and validate a config; every referenced input path must exist."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None

    if raw.get("schema_version") != CONFIG_SCHEMA_VERSION:
        raise ConfigError(
            f"config {path}: schema_version must be {CONFIG_SCHEMA_VERSION}"
        )
    paths = raw.get("paths")
    if not isinstance(paths, dict):
        raise ConfigError(f"config {path}: missing 'paths' object")
    base = path.parent

    def resolve(key: str, required: bool) -> Path | None:
        value = paths.get(key)
        if value is None:
            if required:
                raise ConfigError(f"config {path}: paths.{key} is required")
            return None
        return (base / value).resolve() if not os.path.isabs(value) else Path(value)

    resolved: dict[str, Path | None] = {}
    for key in _INPUT_PATH_KEYS:
        required = key in ("retrieved_run", "reranked_run", "qrels")
        resolved[key] = resolve(key, required)
        if resolved[key] is not None and not resolved[key].exists():
            raise ConfigError(f"config {path}: paths.{key} does not exist: {resolved[key]}")
    for key in _OUTPUT_PATH_KEYS:
        resolved[key] = resolve(key, required=True)

    try:
        metric = MetricId.parse(raw["metric"])
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"config {path}: bad metric: {exc}") from None

    presets_raw = raw.get("eet_presets") or []
    if not presets_raw:
        raise ConfigError(f"config {path}: eet_presets must be non-empty")
    presets = []
    betas_seen = set()
    for entry in presets_raw:
        try:
            preset = EetConfig(
                beta=float(entry["beta"]),
                alpha=float(entry.get("alpha", -0.001)),
                metric=metric,
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"config {path}: bad eet preset {entry}: {exc}") from None
        if preset.beta in betas_seen:
            raise ConfigError(f"config {path}: duplicate beta {preset.beta:g} in presets")
        betas_seen.add(preset.beta)
        presets.append(preset)

    cost_raw = raw.get("cost_model") or {}
    try:
        cost = CostModel(
            per_item_latency=float(cost_raw["per_item_latency"]),
            fixed_overhead=float(cost_raw.get("fixed_overhead", 0.0)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"config {path}: bad cost_model: {exc}") from None

    threshold = int(raw.get("relevance_threshold", 2))
    depth = int(raw.get("list_depth", 1000))
    if depth < 1:
        raise ConfigError(f"config {path}: list_depth must be >= 1")
    baselines = tuple(raw.get("significance_baselines") or ())
    if len(baselines) > len(SIGNIFICANCE_SYMBOLS):
        raise ConfigError(
            f"config {path}: at most {len(SIGNIFICANCE_SYMBOLS)} baselines supported"
        )
    frontier = tuple(int(k) for k in raw.get("frontier_ks", (0, 10, 20, 100, 200, 1000)))

    surprise_raw = raw.get("surprise") or {}
    try:
        surprise_cfg = SurpriseConfig(
            candidate_threshold_quantiles=tuple(
                surprise_raw.get("candidate_threshold_quantiles", (0.5, 0.6, 0.7, 0.8, 0.9))
            ),
            cvm_acceptance_level=float(surprise_raw.get("cvm_acceptance_level", 0.461)),
            calibrated_cut_probability=float(
                surprise_raw.get("calibrated_cut_probability", 0.5)
            ),
            min_exceedances=int(surprise_raw.get("min_exceedances", 10)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"config {path}: bad surprise config: {exc}") from None

    return ExperimentConfig(
        dataset_label=str(raw.get("dataset_label", path.stem)),
        retrieved_run=resolved["retrieved_run"],
        reranked_run=resolved["reranked_run"],
        qrels=resolved["qrels"],
        corpus=resolved["corpus"],
        embeddings=resolved["embeddings"],
        sweep_cache=resolved["sweep_cache"],
        targets_dir=resolved["targets_dir"],
        features_dir=resolved["features_dir"],
        predictions_dir=resolved["predictions_dir"],
        reports_dir=resolved["reports_dir"],
        metric=metric,
        eet_presets=tuple(presets),
        cost_model=cost,
        relevance_threshold=threshold,
        list_depth=depth,
        significance_baselines=baselines,
        frontier_ks=frontier,
        surprise=surprise_cfg,
    )


def write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_pair(config: ExperimentConfig) -> tuple[RerankPair, QrelsSet]:
    retrieved = read_run_file(config.retrieved_run, max_depth=config.list_depth)
    reranked = read_run_file(config.reranked_run, max_depth=config.list_depth)
    qrels = read_qrels_file(config.qrels, relevance_threshold=config.relevance_threshold)
    return pair_runs(retrieved, reranked), qrels


# -- sweep cache ---------------------------------------------------------


def cmd_sweep(config: ExperimentConfig) -> Path:
    """Compute the metric sweep and write the cache CSV."""
    pair, qrels = load_pair(config)
    matrix = sweep(pair, qrels, config.metric)
    lines = [f"# metric={config.metric.label}", "query_id,k,value"]
    for qid in matrix.query_ids:
        for k, value in enumerate(matrix[qid]):
            lines.append(f"{qid},{k},{float(value)!r}")
    write_atomic(config.sweep_cache, "\n".join(lines) + "\n")
    log.info("sweep cache written: %s (%d queries)", config.sweep_cache, len(matrix.rows))
    return config.sweep_cache


def load_sweep_cache(config: ExperimentConfig) -> SweepMatrix:
    path = config.sweep_cache
    if not path.exists():
        raise ConfigError(f"sweep cache missing: {path} (run 'sweep' first)")
    metric = config.metric
    per_query: dict[str, list[float]] = {}
    with open(path, "r", encoding="utf-8") as handle:
        for raw in handle:
            line = raw.strip()
            if not line or line.startswith("query_id,"):
                continue
            if line.startswith("#"):
                body = line.lstrip("#").strip()
                if body.startswith("metric="):
                    metric = MetricId.parse(body[len("metric="):])
                continue
            qid, k_s, value_s = line.split(",")
            per_query.setdefault(qid, []).append((int(k_s), float(value_s)))
    rows = {}
    for qid, entries in per_query.items():
        entries.sort(key=lambda kv: kv[0])
        if [k for k, _ in entries] != list(range(len(entries))):
            raise ConfigError(f"sweep cache {path}: non-contiguous k for query {qid}")
        rows[qid] = np.array([v for _, v in entries], dtype=float)
    if metric != config.metric:
        raise ConfigError(
            f"sweep cache {path} holds {metric.label}, config wants {config.metric.label}"
        )
    return SweepMatrix(metric=metric, rows=rows)


# -- oracle --------------------------------------------------------------


def cmd_oracle(config: ExperimentConfig) -> tuple[Path, Path]:
    """Oracle predictions plus the CDF of oracle cut-offs."""
    matrix = load_sweep_cache(config)
    cutoffs = {qid: oracle_cutoff(matrix[qid]) for qid in matrix.query_ids}
    pred = TruncationPrediction(method_name=ORACLE_METHOD, cutoffs=cutoffs)

    pred_path = config.predictions_dir / "oracle.tsv"
    pred_path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"# method={ORACLE_METHOD}"]
    lines += [f"{qid}\t{cutoffs[qid]}" for qid in pred.query_ids]
    write_atomic(pred_path, "\n".join(lines) + "\n")

    ks = np.array([cutoffs[qid] for qid in pred.query_ids], dtype=int)
    n = ks.size
    zero_fraction = float(np.count_nonzero(ks == 0)) / n
    unique = np.unique(ks)
    cdf_lines = [f"# zero_fraction={zero_fraction!r}", "k,cum_fraction"]
    for value in unique:
        frac = float(np.count_nonzero(ks <= value)) / n
        cdf_lines.append(f"{int(value)},{frac!r}")
    cdf_path = config.reports_dir / "oracle_cdf.csv"
    write_atomic(cdf_path, "\n".join(cdf_lines) + "\n")
    log.info(
        "oracle: %.1f%% of queries need no re-ranking (k=0)", 100.0 * zero_fraction
    )
    return pred_path, cdf_path


# -- targets and features ------------------------------------------------


def target_file(config: ExperimentConfig, beta: float) -> Path:
    return config.targets_dir / f"targets_beta{beta:g}.txt"


def cmd_targets(config: ExperimentConfig) -> list[Path]:
    matrix = load_sweep_cache(config)
    written = []
    for preset in config.eet_presets:
        targets = targets_from_sweep(matrix, preset)
        path = target_file(config, preset.beta)
        path.parent.mkdir(parents=True, exist_ok=True)
        write_targets(path, targets)
        written.append(path)
        log.info("targets written: %s", path)
    return written


def cmd_features(config: ExperimentConfig) -> list[Path]:
    if config.corpus is None:
        raise ConfigError("paths.corpus is required for feature extraction")
    pair, qrels = load_pair(config)
    corpus = read_corpus_file(config.corpus)
    embeddings = (
        feats.read_embeddings_file(config.embeddings)
        if config.embeddings is not None
        else None
    )
    vectorizer = feats.build_tfidf(corpus)
    written = []
    for preset in config.eet_presets:
        targets_path = target_file(config, preset.beta)
        if not targets_path.exists():
            raise ConfigError(f"targets missing: {targets_path} (run 'targets' first)")
        targets = read_targets(targets_path)
        objects = feats.export_features(
            pair, corpus, qrels, targets, embeddings=embeddings, vectorizer=vectorizer
        )
        out = config.features_dir / f"features_beta{preset.beta:g}.jsonl"
        out.parent.mkdir(parents=True, exist_ok=True)
        text = "".join(json.dumps(obj, separators=(",", ":")) + "\n" for obj in objects)
        write_atomic(out, text)
        written.append(out)
        log.info("features written: %s", out)
    return written


# -- truncation methods --------------------------------------------------


def cmd_truncate(
    config: ExperimentConfig,
    method: str,
    k: int | None = None,
    beta: float | None = None,
) -> Path:
    pair, _ = load_pair(config)
    run = pair.retrieved
    if method == "fixed_k":
        if k is None:
            raise ConfigError("fixed_k needs --k")
        pred = fixed_k(run, k)
        out = config.predictions_dir / f"fixed_k_{k}.tsv"
    elif method == "greedy_k":
        if beta is None:
            raise ConfigError("greedy_k needs --beta")
        targets_path = target_file(config, beta)
        if not targets_path.exists():
            raise ConfigError(f"targets missing: {targets_path} (run 'targets' first)")
        pred = greedy_k_predict(run, read_targets(targets_path))
        out = config.predictions_dir / f"greedy_k_beta{beta:g}.tsv"
    elif method == "surprise":
        pred, decisions = surprise_predict(run, config.surprise)
        out = config.predictions_dir / "surprise.tsv"
        diag = config.predictions_dir / "surprise_diagnostics.jsonl"
        diag.parent.mkdir(parents=True, exist_ok=True)
        diag_text = "".join(
            json.dumps(d.to_record(), separators=(",", ":")) + "\n" for d in decisions
        )
        write_atomic(diag, diag_text)
    else:
        raise ConfigError(f"unknown truncation method {method!r}")
    out.parent.mkdir(parents=True, exist_ok=True)
    write_predictions(out, pred)
    log.info("predictions written: %s", out)
    return out


# -- evaluation ----------------------------------------------------------


@dataclass(frozen=True)
class ReportTable:
    dataset_label: str
    metric_label: str
    baselines: tuple[str, ...]
    rows: tuple[ReportRow, ...]
    significant: Mapping[tuple[str, str], bool]

    def row(self, method_name: str) -> ReportRow:
        for row in self.rows:
            if row.method_name == method_name:
                return row
        raise KeyError(method_name)


def _row_from_cutoffs(
    method: str,
    cutoffs: Mapping[str, int],
    matrix: SweepMatrix,
    cost: CostModel,
) -> ReportRow:
    """Build one report row from cached sweep values.

    Mirrors the arithmetic of :func:`rankcut.simulate.evaluate_prediction`
    exactly (same ordering, same array ops) so both report identical rows.
    """
    qids = matrix.query_ids
    missing = [qid for qid in qids if qid not in cutoffs]
    if missing:
        raise MissingQuery(
            f"prediction {method!r} misses queries: {', '.join(missing[:5])}"
        )
    per_metric = {}
    per_k = {}
    for qid in qids:
        k = int(cutoffs[qid])
        row = matrix[qid]
        if not 0 <= k < row.size:
            raise MissingQuery(
                f"prediction {method!r}: k={k} outside sweep range for query {qid}"
            )
        per_metric[qid] = float(row[k])
        per_k[qid] = k
    ks = np.array([per_k[qid] for qid in qids], dtype=float)
    vals = np.array([per_metric[qid] for qid in qids], dtype=float)
    lats = np.array([cost.latency(per_k[qid]) for qid in qids], dtype=float)
    return ReportRow(
        method_name=method,
        avg_k=float(np.mean(ks)),
        mean_metric=float(np.mean(vals)),
        mean_latency=float(np.mean(lats)),
        per_query_metric=per_metric,
        per_query_k=per_k,
    )


def build_report_rows(
    config: ExperimentConfig,
    prediction_paths: Sequence[Path],
) -> tuple[SweepMatrix, list[ReportRow]]:
    matrix = load_sweep_cache(config)
    depths = {qid: matrix[qid].size - 1 for qid in matrix.query_ids}
    rows = [
        _row_from_cutoffs(
            NO_RERANK_METHOD,
            {qid: 0 for qid in matrix.query_ids},
            matrix,
            config.cost_model,
        )
    ]
    for path in prediction_paths:
        pred = read_predictions(path)
        validate_cutoffs(pred, depths)
        rows.append(_row_from_cutoffs(pred.method_name, pred.cutoffs, matrix, config.cost_model))
    oracle = {qid: oracle_cutoff(matrix[qid]) for qid in matrix.query_ids}
    rows.append(_row_from_cutoffs(ORACLE_METHOD, oracle, matrix, config.cost_model))
    return matrix, rows


def build_report_table(
    config: ExperimentConfig,
    prediction_paths: Sequence[Path],
) -> ReportTable:
    _, rows = build_report_rows(config, prediction_paths)
    by_name = {row.method_name: row for row in rows}
    for baseline in config.significance_baselines:
        if baseline not in by_name:
            raise ConfigError(
                f"significance baseline {baseline!r} is not among the evaluated methods"
            )
    significant = {}
    for row in rows:
        for baseline in config.significance_baselines:
            result = paired_t_test(row.per_query_metric, by_name[baseline].per_query_metric)
            significant[(row.method_name, baseline)] = result.significant
    return ReportTable(
        dataset_label=config.dataset_label,
        metric_label=config.metric.label,
        baselines=config.significance_baselines,
        rows=tuple(rows),
        significant=significant,
    )


def render_table_csv(table: ReportTable) -> str:
    header = ["method", "avg_k", table.metric_label, "latency_s"]
    header += [f"sig_vs_{baseline}" for baseline in table.baselines]
    lines = [",".join(header)]
    for row in table.rows:
        cells = [
            row.method_name,
            repr(row.avg_k),
            repr(row.mean_metric),
            repr(row.mean_latency),
        ]
        for baseline in table.baselines:
            cells.append("true" if table.significant[(row.method_name, baseline)] else "false")
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def render_table_text(table: ReportTable) -> str:
    """Aligned-column table with significance marks as symbol suffixes."""
    headers = ["Method", "Avg. k", table.metric_label, "Lat."]
    body = []
    for row in table.rows:
        marks = "".join(
            SIGNIFICANCE_SYMBOLS[i]
            for i, baseline in enumerate(table.baselines)
            if table.significant[(row.method_name, baseline)]
        )
        body.append(
            [
                row.method_name,
                f"{row.avg_k:g}",
                f"{row.mean_metric:.3f}{marks}",
                f"{row.mean_latency:.2f}",
            ]
        )
    widths = [
        max(len(headers[col]), *(len(line[col]) for line in body))
        for col in range(len(headers))
    ]
    out = [f"# {table.dataset_label}"]
    out.append(
        "  ".join(
            headers[col].ljust(widths[col]) if col == 0 else headers[col].rjust(widths[col])
            for col in range(len(headers))
        )
    )
    for line in body:
        out.append(
            "  ".join(
                line[col].ljust(widths[col]) if col == 0 else line[col].rjust(widths[col])
                for col in range(len(headers))
            )
        )
    for i, baseline in enumerate(table.baselines):
        out.append(
            f"{SIGNIFICANCE_SYMBOLS[i]} significant difference vs {baseline} "
            "(paired t-test, p < 0.05)"
        )
    return "\n".join(out) + "\n"


def cmd_evaluate(
    config: ExperimentConfig, prediction_paths: Sequence[Path]
) -> tuple[Path, Path]:
    table = build_report_table(config, prediction_paths)
    csv_path = config.reports_dir / "evaluation.csv"
    txt_path = config.reports_dir / "evaluation.txt"
    write_atomic(csv_path, render_table_csv(table))
    write_atomic(txt_path, render_table_text(table))
    log.info("evaluation written: %s, %s", csv_path, txt_path)
    return csv_path, txt_path


# -- figure data ---------------------------------------------------------


def _histogram(ks: Sequence[int], list_depth: int) -> list[tuple[float, float, int]]:
    """20 equal-width bins over [0, list_depth]; the top edge is inclusive."""
    edges = np.linspace(0.0, float(list_depth), HISTOGRAM_BINS + 1)
    counts, _ = np.histogram(np.asarray(ks, dtype=float), bins=edges)
    return [
        (float(edges[i]), float(edges[i + 1]), int(counts[i]))
        for i in range(HISTOGRAM_BINS)
    ]


def _safe_name(method: str) -> str:
    return "".join(c if c.isalnum() or c in "-_." else "_" for c in method)


def cmd_plotdata(
    config: ExperimentConfig,
    prediction_paths: Sequence[Path],
    svg: bool = False,
) -> list[Path]:
    matrix, rows = build_report_rows(config, prediction_paths)
    written = []

    scatter_lines = [f"method,avg_k,latency_s,{config.metric.label}"]
    for row in rows:
        scatter_lines.append(
            f"{row.method_name},{row.avg_k!r},{row.mean_latency!r},{row.mean_metric!r}"
        )
    scatter_path = config.reports_dir / "scatter.csv"
    write_atomic(scatter_path, "\n".join(scatter_lines) + "\n")
    written.append(scatter_path)

    frontier_lines = [f"k,avg_k,latency_s,{config.metric.label}"]
    frontier_rows = []
    for k in config.frontier_ks:
        cutoffs = {
            qid: min(k, matrix[qid].size - 1) for qid in matrix.query_ids
        }
        row = _row_from_cutoffs(f"fixed_k_{k}", cutoffs, matrix, config.cost_model)
        frontier_rows.append((k, row))
        frontier_lines.append(
            f"{k},{row.avg_k!r},{row.mean_latency!r},{row.mean_metric!r}"
        )
    frontier_path = config.reports_dir / "frontier.csv"
    write_atomic(frontier_path, "\n".join(frontier_lines) + "\n")
    written.append(frontier_path)

    for row in rows:
        if row.method_name == NO_RERANK_METHOD:
            continue
        ks = [row.per_query_k[qid] for qid in sorted(row.per_query_k)]
        hist_lines = ["bin_lo,bin_hi,count"]
        for lo, hi, count in _histogram(ks, config.list_depth):
            hist_lines.append(f"{lo!r},{hi!r},{count}")
        hist_path = config.reports_dir / f"histogram_{_safe_name(row.method_name)}.csv"
        write_atomic(hist_path, "\n".join(hist_lines) + "\n")
        written.append(hist_path)

    if svg:
        svg_path = config.reports_dir / "scatter.svg"
        write_atomic(svg_path, render_scatter_svg(config, rows, frontier_rows))
        written.append(svg_path)
    log.info("figure data written: %d files", len(written))
    return written


def render_scatter_svg(
    config: ExperimentConfig,
    rows: Sequence[ReportRow],
    frontier_rows: Sequence[tuple[int, ReportRow]],
) -> str:
    """Self-contained SVG scatter: avg cut-off vs metric, fixed-k frontier."""
    width, height = 640, 420
    margin_l, margin_r, margin_t, margin_b = 60, 20, 30, 45
    xs = [row.avg_k for row in rows] + [row.avg_k for _, row in frontier_rows]
    ys = [row.mean_metric for row in rows] + [row.mean_metric for _, row in frontier_rows]
    x_lo, x_hi = 0.0, max(max(xs), 1.0) * 1.05
    y_lo = min(ys)
    y_hi = max(ys)
    pad = (y_hi - y_lo) * 0.1 or 0.05
    y_lo, y_hi = y_lo - pad, y_hi + pad

    def sx(x: float) -> float:
        return margin_l + (x - x_lo) / (x_hi - x_lo) * (width - margin_l - margin_r)

    def sy(y: float) -> float:
        return height - margin_b - (y - y_lo) / (y_hi - y_lo) * (height - margin_t - margin_b)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{margin_l}" y1="{height - margin_b}" x2="{width - margin_r}" '
        f'y2="{height - margin_b}" stroke="black"/>',
        f'<line x1="{margin_l}" y1="{margin_t}" x2="{margin_l}" '
        f'y2="{height - margin_b}" stroke="black"/>',
    ]
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        x = x_lo + frac * (x_hi - x_lo)
        y = y_lo + frac * (y_hi - y_lo)
        parts.append(
            f'<text x="{sx(x):.1f}" y="{height - margin_b + 16}" font-size="10" '
            f'text-anchor="middle">{x:.0f}</text>'
        )
        parts.append(
            f'<text x="{margin_l - 6}" y="{sy(y):.1f}" font-size="10" '
            f'text-anchor="end" dominant-baseline="middle">{y:.3f}</text>'
        )
    parts.append(
        f'<text x="{(margin_l + width - margin_r) / 2:.1f}" y="{height - 8}" '
        f'font-size="12" text-anchor="middle">average re-ranking cut-off</text>'
    )
    parts.append(
        f'<text x="14" y="{(margin_t + height - margin_b) / 2:.1f}" font-size="12" '
        f'text-anchor="middle" transform="rotate(-90 14 '
        f'{(margin_t + height - margin_b) / 2:.1f})">{config.metric.label}</text>'
    )
    if frontier_rows:
        points = " ".join(
            f"{sx(row.avg_k):.1f},{sy(row.mean_metric):.1f}" for _, row in frontier_rows
        )
        parts.append(
            f'<polyline points="{points}" fill="none" stroke="gray" '
            'stroke-dasharray="4 3"/>'
        )
    for row in rows:
        cx, cy = sx(row.avg_k), sy(row.mean_metric)
        color = "firebrick" if row.method_name == ORACLE_METHOD else "steelblue"
        parts.append(f'<circle cx="{cx:.1f}" cy="{cy:.1f}" r="4" fill="{color}"/>')
        parts.append(
            f'<text x="{cx + 6:.1f}" y="{cy - 5:.1f}" font-size="9">'
            f"{_xml_escape(row.method_name)}</text>"
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _xml_escape(text: str) -> str:
    return (
        text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
    )
