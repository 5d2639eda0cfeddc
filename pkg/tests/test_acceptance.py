"""Acceptance suite: every frozen criterion at its stated tolerance.

Each criterion prints one ``ACCEPTANCE <name>: PASS|FAIL`` line (visible
with ``pytest -s``).  Budgeted criteria assert their runtime caps.

Known-red criterion: ``paired_t_reference`` pins reference constants
(t=1.8371, p=0.1400) that are mutually consistent at df=4 but do not
follow from the stated data under the standard two-sided paired t-test;
the correct hand evaluation (t=sqrt(6)~2.4495, p~0.0705, cross-checked
against scipy and a t-table) is frozen in test_metrics.py.  The constants
are asserted as recorded, so this one test fails by design rather than
bending the implementation to a miscomputed value.
"""

import json
import math
import time
from contextlib import contextmanager
from pathlib import Path

import numpy as np
import pytest

from helpers import qrels_from_grades, random_instance, random_pair
from oracles import naive_f1, naive_ndcg

from rankcut import (
    compose_at_k,
    compute_metric,
    cvm_statistic,
    eet,
    efficiency_decay,
    f1_at_k,
    fit_gpd,
    fixed_k,
    greedy_k,
    ndcg_at_k,
    oracle_cutoff,
    paired_t_test,
    sweep,
)
from rankcut import harness
from rankcut.gpd import sample_gpd
from rankcut.metrics import NDCG_AT_10
from rankcut.targets import TargetVector

DATA = Path(__file__).resolve().parent.parent / "data" / "synthetic"


@contextmanager
def criterion(name: str):
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {name}: FAIL")
        raise
    print(f"ACCEPTANCE {name}: PASS")


def test_eet_reduction_at_beta_zero():
    with criterion("eet_beta0_reduces_to_gain"):
        rng = np.random.default_rng(101)
        for _ in range(1000):
            sigma = float(rng.uniform(0.0, 1.0))
            gamma = float(rng.uniform(1e-9, 1.0))
            assert abs(eet(sigma, gamma, 0.0) - sigma) < 1e-12


def test_efficiency_decay_closed_form():
    with criterion("efficiency_decay_e_minus_one"):
        assert abs(efficiency_decay(1000, -0.001) - 0.3678794412) < 1e-9


def test_metric_brute_force_equivalence():
    with criterion("metric_oracle_equivalence"):
        start = time.monotonic()
        rng = np.random.default_rng(202)
        for _ in range(500):
            ranked, grades, threshold = random_instance(rng, max_docs=10, max_grade=3)
            qrels = qrels_from_grades("q", grades, threshold)
            k = int(rng.integers(1, len(ranked) + 1))
            relevant = {d for d, g in grades.items() if g >= threshold}
            got_f1 = f1_at_k(ranked, qrels, k)
            assert abs(got_f1 - naive_f1(ranked.doc_ids, relevant, k)) < 1e-12
            got_ndcg = ndcg_at_k(ranked, qrels, k)
            assert abs(got_ndcg - naive_ndcg(ranked.doc_ids, grades, k)) < 1e-12
        elapsed = time.monotonic() - start
        assert elapsed < 5.0, f"metric equivalence took {elapsed:.2f}s"


def _sweep_instances():
    rng = np.random.default_rng(303)
    metric = NDCG_AT_10
    for _ in range(100):
        pair, qrels = random_pair(rng, n_queries=1, max_depth=32)
        yield pair, qrels, metric


def test_sweep_matches_naive_and_oracle_scan():
    with criterion("sweep_exactness"):
        start = time.monotonic()
        for pair, qrels, metric in _sweep_instances():
            qid = pair.query_ids[0]
            matrix = sweep(pair, qrels, metric)
            row = matrix[qid]
            retrieved, reranked = pair.retrieved[qid], pair.reranked[qid]
            best_k, best_v = 0, -math.inf
            for k in range(len(retrieved) + 1):
                naive = compute_metric(
                    metric, compose_at_k(retrieved, reranked, k), qrels
                )
                assert row[k] == naive
                if naive > best_v:
                    best_k, best_v = k, naive
            assert oracle_cutoff(row) == best_k
        elapsed = time.monotonic() - start
        assert elapsed < 10.0, f"sweep exactness took {elapsed:.2f}s"


def test_oracle_dominates_fixed_k():
    with criterion("oracle_dominance"):
        for pair, qrels, metric in _sweep_instances():
            qid = pair.query_ids[0]
            row = sweep(pair, qrels, metric)[qid]
            best = row[oracle_cutoff(row)]
            depth = len(pair.retrieved[qid])
            for k in (0, 10, 20, 100, 200, 1000):
                assert best >= row[min(k, depth)]
        # and on the bundled dataset, at the per-query level
        config = harness.load_config(DATA / "config.json")
        pair, qrels = harness.load_pair(config)
        matrix = sweep(pair, qrels, config.metric)
        for k in (0, 10, 20, 100, 200, 1000):
            pred = fixed_k(pair.retrieved, k)
            for qid in matrix.query_ids:
                row = matrix[qid]
                assert row[oracle_cutoff(row)] >= row[pred.cutoffs[qid]]


def test_greedy_k_brute_force():
    with criterion("greedy_k_exhaustive"):
        rng = np.random.default_rng(404)
        for _ in range(100):
            n_q = int(rng.integers(1, 25))
            depth = int(rng.integers(1, 40))
            vectors = {f"q{j}": rng.random(depth + 1) for j in range(n_q)}
            targets = TargetVector(
                beta=0.0, alpha=0.0, metric=NDCG_AT_10,
                vectors={q: np.asarray(v) for q, v in vectors.items()},
            )
            best_k, best_mean = 0, -math.inf
            for k in range(depth + 1):
                mean = sum(float(v[k]) for v in vectors.values()) / n_q
                if mean > best_mean:
                    best_k, best_mean = k, mean
            assert greedy_k(targets) == best_k


def test_gpd_recovery():
    with criterion("gpd_recovery"):
        start = time.monotonic()
        rng = np.random.default_rng(505)
        samples = sample_gpd(rng, 10_000, 0.2, 1.0)
        fit = fit_gpd(samples)
        assert 0.1 <= fit.shape_xi <= 0.3, fit
        assert 0.8 <= fit.scale <= 1.2, fit

        samples = sample_gpd(rng, 10_000, 0.0, 2.0)
        fit = fit_gpd(samples)
        assert -0.1 <= fit.shape_xi <= 0.1, fit
        elapsed = time.monotonic() - start
        assert elapsed < 30.0, f"gpd recovery took {elapsed:.2f}s"


def test_cvm_exactness():
    with criterion("cvm_perfect_fit_floor"):
        for n in (1, 10, 100):
            positions = (2.0 * np.arange(1, n + 1) - 1.0) / (2.0 * n)
            w2 = cvm_statistic(positions, lambda v: v)
            assert abs(w2 - 1.0 / (12.0 * n)) < 1e-12


def test_paired_t_reference():
    """Recorded reference constants; see the module docstring (known red)."""
    with criterion("paired_t_reference"):
        result = paired_t_test([1.0, 2.0, 3.0, 4.0, 5.0], [0.0, 2.0, 2.0, 4.0, 4.0])
        assert result.degrees_of_freedom == 4
        assert abs(result.t_statistic - 1.8371) < 5e-4, (
            f"t={result.t_statistic:.4f}: the standard paired t-test on "
            "diffs (1,0,1,0,1) gives sqrt(6)~2.4495, not the recorded 1.8371"
        )
        assert abs(result.p_value - 0.1400) <= 0.0005


def _pipeline_config(run_dir: Path) -> Path:
    raw = json.loads((DATA / "config.json").read_text())
    for key in ("retrieved_run", "reranked_run", "qrels", "corpus", "embeddings"):
        raw["paths"][key] = str((DATA / raw["paths"][key]).resolve())
    cfg = run_dir / "config.json"
    run_dir.mkdir(parents=True, exist_ok=True)
    cfg.write_text(json.dumps(raw, indent=2))
    return cfg


def _run_pipeline(run_dir: Path) -> dict[str, bytes]:
    config = harness.load_config(_pipeline_config(run_dir))
    harness.cmd_sweep(config)
    harness.cmd_oracle(config)
    harness.cmd_targets(config)
    harness.cmd_features(config)
    preds = [harness.cmd_truncate(config, "fixed_k", k=k) for k in (10, 20, 100)]
    preds += [harness.cmd_truncate(config, "greedy_k", beta=b) for b in (0.0, 1.0, 2.0)]
    preds.append(harness.cmd_truncate(config, "surprise"))
    preds.append(DATA / "predictions" / "demo_trained.tsv")
    harness.cmd_evaluate(config, preds)
    harness.cmd_plotdata(config, preds, svg=True)
    out = {}
    out_root = run_dir / "out"
    for path in sorted(out_root.rglob("*")):
        if path.is_file():
            out[str(path.relative_to(out_root))] = path.read_bytes()
    return out


def test_end_to_end_pipeline(tmp_path):
    with criterion("end_to_end_bundled_dataset"):
        start = time.monotonic()
        first = _run_pipeline(tmp_path / "run1")
        first_elapsed = time.monotonic() - start
        assert first_elapsed < 60.0, f"pipeline took {first_elapsed:.1f}s"

        second = _run_pipeline(tmp_path / "run2")
        assert first.keys() == second.keys()
        for name in first:
            assert first[name] == second[name], f"{name} differs between runs"

        txt = first["reports/evaluation.txt"].decode()
        header = txt.splitlines()[1]
        for column in ("Method", "Avg. k", "ndcg_at_10", "Lat."):
            assert column in header, header
        assert "significant difference vs" in txt
        csv_header = first["reports/evaluation.csv"].decode().splitlines()[0]
        assert csv_header.startswith("method,avg_k,ndcg_at_10,latency_s,sig_vs_")

        methods = [
            line.split(",")[0]
            for line in first["reports/evaluation.csv"].decode().splitlines()[1:]
        ]
        assert methods[0] == "w/o re-ranking" and methods[-1] == "oracle"
        assert "surprise" in methods and "greedy_k_beta1" in methods

        # stash for the latency criterion
        test_end_to_end_pipeline.outputs = first


def test_latency_model_preset(tmp_path):
    with criterion("latency_model_fixed_k_100"):
        outputs = getattr(test_end_to_end_pipeline, "outputs", None)
        if outputs is None:
            outputs = _run_pipeline(tmp_path / "latency_run")
        csv_lines = outputs["reports/evaluation.csv"].decode().splitlines()
        header = csv_lines[0].split(",")
        lat_col = header.index("latency_s")
        row = next(l for l in csv_lines[1:] if l.startswith("fixed_k_100,"))
        latency = float(row.split(",")[lat_col])
        assert abs(latency - 2.98) <= 0.01, latency
        txt_row = next(
            l
            for l in outputs["reports/evaluation.txt"].decode().splitlines()
            if l.startswith("fixed_k_100")
        )
        assert "2.98" in txt_row
