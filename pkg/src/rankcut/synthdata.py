"""Deterministic synthetic dataset for demos and end-to-end tests.

Generates a small "retrieve-then-re-rank" scenario: a weak retriever and a
strong re-ranker over per-query candidate pools, with multi-graded
judgments, a token-soup corpus, and per-pair embeddings.  Roughly a third
of the queries get a strong retriever so that their oracle cut-off is at
or near zero, mirroring the situation where re-ranking can be skipped.

Everything is a pure function of the seed: regenerating with the same seed
reproduces every output file byte for byte.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .metrics import NDCG_AT_10
from .runs import QrelsSet, RankedList, RerankPair, RunItem, RunSet
from .simulate import TruncationPrediction, oracle_cutoff, sweep, write_predictions

DEFAULT_SEED = 20240801


def _doc_text(rng: np.random.Generator, topic_tokens: list[str], grade: int) -> str:
    length = int(rng.integers(10, 24))
    words = [f"w{int(i):03d}" for i in rng.integers(0, 400, size=length)]
    for token in topic_tokens:
        words.extend([token] * grade)
    order = rng.permutation(len(words))
    return " ".join(words[i] for i in order)


def generate_dataset(
    out_dir: str | Path,
    n_queries: int = 50,
    depth: int = 100,
    embed_dim: int = 8,
    seed: int = DEFAULT_SEED,
) -> Path:
    """Write the full dataset under ``out_dir`` and return the config path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)

    run_lines_ret: list[str] = []
    run_lines_rr: list[str] = []
    qrels_lines: list[str] = []
    corpus_lines: list[str] = []
    embed_lines: list[str] = [json.dumps({"dim": embed_dim})]

    retrieved_lists: dict[str, RankedList] = {}
    reranked_lists: dict[str, RankedList] = {}
    grades_map: dict[tuple[str, str], int] = {}

    doc_counter = 0
    for qi in range(n_queries):
        qid = f"q{qi + 1:03d}"
        topic_tokens = [f"t{qi:02d}{c}" for c in "abc"]
        strong_retriever = qi % 3 == 0

        n_relevant = int(rng.integers(5, 13))
        grades = np.zeros(depth, dtype=int)
        grades[:n_relevant] = rng.integers(1, 4, size=n_relevant)

        utility = grades + rng.normal(0.0, 0.3, size=depth)
        if strong_retriever:
            ret_score = utility * 3.0 + rng.normal(0.0, 0.05, size=depth)
        else:
            ret_score = utility * 0.35 + rng.normal(0.0, 1.0, size=depth)
        rr_score = utility * 3.0 + rng.normal(0.0, 0.5, size=depth)

        query_emb = rng.normal(0.0, 1.0, size=embed_dim)
        query_emb /= np.linalg.norm(query_emb)

        docs = []
        for j in range(depth):
            doc_id = f"D{doc_counter:05d}"
            doc_counter += 1
            grade = int(grades[j])
            docs.append((doc_id, grade, float(ret_score[j]), float(rr_score[j])))
            corpus_lines.append(f"{doc_id}\t{_doc_text(rng, topic_tokens, grade)}")

            doc_emb = query_emb * (0.3 * grade) + rng.normal(0.0, 0.5, size=embed_dim)
            doc_emb /= np.linalg.norm(doc_emb)
            embed_lines.append(
                json.dumps(
                    {
                        "query_id": qid,
                        "doc_id": doc_id,
                        "query_embedding": [round(float(v), 4) for v in query_emb],
                        "doc_embedding": [round(float(v), 4) for v in doc_emb],
                    },
                    separators=(",", ":"),
                )
            )

        zero_grade_docs = [d for d, g, _, _ in docs if g == 0]
        judged_extra = rng.choice(
            zero_grade_docs, size=min(25, len(zero_grade_docs)), replace=False
        )
        judged_extra_set = set(str(d) for d in judged_extra)
        for doc_id, grade, _, _ in docs:
            if grade > 0 or doc_id in judged_extra_set:
                qrels_lines.append(f"{qid} 0 {doc_id} {grade}")
                grades_map[(qid, doc_id)] = grade

        by_ret = sorted(docs, key=lambda d: (-d[2], d[0]))
        retrieved_lists[qid] = RankedList(
            qid,
            tuple(
                RunItem(d[0], round(d[2], 6), rank)
                for rank, d in enumerate(by_ret, start=1)
            ),
        )
        by_rr = sorted(docs, key=lambda d: (-d[3], d[0]))
        reranked_lists[qid] = RankedList(
            qid,
            tuple(
                RunItem(d[0], round(d[3], 6), rank)
                for rank, d in enumerate(by_rr, start=1)
            ),
        )
        for item in retrieved_lists[qid].items:
            run_lines_ret.append(
                f"{qid} Q0 {item.doc_id} {item.rank} {item.score:.6f} synth-retriever"
            )
        for item in reranked_lists[qid].items:
            run_lines_rr.append(
                f"{qid} Q0 {item.doc_id} {item.rank} {item.score:.6f} synth-reranker"
            )

    (out / "retrieved.run").write_text("\n".join(run_lines_ret) + "\n", encoding="utf-8")
    (out / "reranked.run").write_text("\n".join(run_lines_rr) + "\n", encoding="utf-8")
    (out / "qrels.txt").write_text("\n".join(qrels_lines) + "\n", encoding="utf-8")
    (out / "corpus.tsv").write_text("\n".join(corpus_lines) + "\n", encoding="utf-8")
    (out / "embeddings.jsonl").write_text("\n".join(embed_lines) + "\n", encoding="utf-8")

    # one pre-generated "trained model" prediction file: oracle plus noise,
    # never predicting zero (supervised methods trained on raw targets
    # cannot learn to skip re-ranking)
    pair = RerankPair(
        retrieved=RunSet("synth-retriever", retrieved_lists),
        reranked=RunSet("synth-reranker", reranked_lists),
    )
    qrels = QrelsSet(grades=grades_map, relevance_threshold=2)
    matrix = sweep(pair, qrels, NDCG_AT_10)
    cutoffs = {}
    for qid in matrix.query_ids:
        k = oracle_cutoff(matrix[qid]) + int(rng.integers(-8, 9))
        cutoffs[qid] = min(max(k, 1), depth)
    demo_pred = TruncationPrediction(method_name="demo_trained", cutoffs=cutoffs)
    predictions_dir = out / "predictions"
    predictions_dir.mkdir(parents=True, exist_ok=True)
    write_predictions(predictions_dir / "demo_trained.tsv", demo_pred)

    config = {
        "schema_version": 1,
        "dataset_label": f"synthetic-{n_queries}q-d{depth}",
        "paths": {
            "retrieved_run": "retrieved.run",
            "reranked_run": "reranked.run",
            "qrels": "qrels.txt",
            "corpus": "corpus.tsv",
            "embeddings": "embeddings.jsonl",
            "sweep_cache": "out/sweep_cache.csv",
            "targets_dir": "out/targets",
            "features_dir": "out/features",
            "predictions_dir": "out/predictions",
            "reports_dir": "out/reports",
        },
        "metric": "ndcg_at_10",
        "eet_presets": [
            {"beta": 0.0, "alpha": -0.001},
            {"beta": 1.0, "alpha": -0.001},
            {"beta": 2.0, "alpha": -0.001},
        ],
        "cost_model": {"per_item_latency": 0.02977, "fixed_overhead": 0.0},
        "relevance_threshold": 2,
        "list_depth": depth,
        "significance_baselines": ["fixed_k_20", f"fixed_k_{depth}"],
        "frontier_ks": sorted(
            {0, depth // 20, depth // 10, depth // 5, depth // 2, 3 * depth // 4, depth}
        ),
    }
    config_path = out / "config.json"
    config_path.write_text(json.dumps(config, indent=2) + "\n", encoding="utf-8")
    return config_path


if __name__ == "__main__":
    import sys

    target = sys.argv[1] if len(sys.argv) > 1 else "data/synthetic"
    path = generate_dataset(target)
    print(f"dataset written, config at {path}")
