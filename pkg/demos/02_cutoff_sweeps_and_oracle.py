"""Simulated re-ranking at every cut-off, and the oracle's view of it.

The sweep evaluates nDCG@10 of the composite list (top-k re-ranked, tail
in retrieved order) for every k.  The oracle picks, per query, the
smallest k reaching the maximum: deeper re-ranking is not always better,
and a fair share of queries need no re-ranking at all.
"""

from pathlib import Path

import numpy as np

from rankcut import (
    NDCG_AT_10,
    oracle_cutoff,
    pair_runs,
    read_qrels_file,
    read_run_file,
    sweep,
)

DATA = Path(__file__).resolve().parent.parent / "data" / "synthetic"

pair = pair_runs(read_run_file(DATA / "retrieved.run"), read_run_file(DATA / "reranked.run"))
qrels = read_qrels_file(DATA / "qrels.txt")
matrix = sweep(pair, qrels, NDCG_AT_10)

# mean nDCG@10 across queries as the re-ranking depth grows
depth = matrix[matrix.query_ids[0]].size - 1
mean_curve = np.mean([matrix[q] for q in matrix.query_ids], axis=0)
print("mean nDCG@10 by re-ranking cut-off:")
for k in (0, 5, 10, 20, 50, 75, depth):
    bar = "#" * int(40 * mean_curve[k])
    print(f"  k={k:>3}  {mean_curve[k]:.4f}  {bar}")

oracle_ks = np.array([oracle_cutoff(matrix[q]) for q in matrix.query_ids])
oracle_vals = [matrix[q][k] for q, k in zip(matrix.query_ids, oracle_ks)]
print(f"\noracle: mean nDCG@10 {np.mean(oracle_vals):.4f} at mean cut-off {oracle_ks.mean():.1f}")
print(f"fixed full-depth re-ranking: {mean_curve[-1]:.4f} at cut-off {depth}")
print(f"queries needing no re-ranking (oracle k=0): {np.mean(oracle_ks == 0):.0%}")

print("\ncumulative distribution of oracle cut-offs:")
for value in np.unique(oracle_ks)[:8]:
    frac = np.mean(oracle_ks <= value)
    print(f"  k <= {int(value):>3}: {frac:.2f}")
