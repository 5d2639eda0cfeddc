"""Parsing run files and scoring ranked lists.

Walks through the bundled synthetic dataset: load the retrieved and
re-ranked runs, pair them, and score a few lists with the rank metrics.
"""

from pathlib import Path

from rankcut import (
    f1_at_k,
    judged_at_k,
    ndcg_at_k,
    pair_runs,
    paired_t_test,
    read_qrels_file,
    read_run_file,
)

DATA = Path(__file__).resolve().parent.parent / "data" / "synthetic"

retrieved = read_run_file(DATA / "retrieved.run")
reranked = read_run_file(DATA / "reranked.run")
qrels = read_qrels_file(DATA / "qrels.txt", relevance_threshold=2)

print(f"retrieved run: tag={retrieved.tag!r}, {len(retrieved)} queries")
print(f"re-ranked run: tag={reranked.tag!r}, {len(reranked)} queries")

pair = pair_runs(retrieved, reranked)
print(f"paired on {len(pair.query_ids)} common queries\n")

qid = pair.query_ids[0]
ranked = pair.retrieved[qid]
print(f"query {qid}: depth {len(ranked)}, top-3 docs {ranked.doc_ids[:3]}")
print(f"  ndcg@10   retrieved: {ndcg_at_k(ranked, qrels, 10):.4f}")
print(f"  ndcg@10   re-ranked: {ndcg_at_k(pair.reranked[qid], qrels, 10):.4f}")
print(f"  f1@10     retrieved: {f1_at_k(ranked, qrels, 10):.4f}")
print(f"  judged@10 retrieved: {judged_at_k(ranked, qrels, 10):.4f}\n")

# does full re-ranking significantly beat no re-ranking on this dataset?
a = {q: ndcg_at_k(pair.reranked[q], qrels, 10) for q in pair.query_ids}
b = {q: ndcg_at_k(pair.retrieved[q], qrels, 10) for q in pair.query_ids}
result = paired_t_test(a, b)
print(
    f"full re-ranking vs none: mean {sum(a.values())/len(a):.4f} vs "
    f"{sum(b.values())/len(b):.4f}, t={result.t_statistic:.3f}, "
    f"p={result.p_value:.2g}, significant={result.significant}"
)
