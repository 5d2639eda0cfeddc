"""Effectiveness/efficiency trade-off targets over candidate cut-offs.

The same sweep turns into different supervision signals depending on the
trade-off weight beta: beta=0 rewards pure re-ranking gain, larger betas
increasingly reward stopping early.  The mean target curves below peak at
visibly different depths.
"""

from pathlib import Path

import numpy as np

from rankcut import (
    EetConfig,
    NDCG_AT_10,
    build_targets,
    eet,
    efficiency_decay,
    pair_runs,
    read_qrels_file,
    read_run_file,
    sweep,
)
from rankcut.truncators import greedy_k

DATA = Path(__file__).resolve().parent.parent / "data" / "synthetic"

print("the efficiency term is exponential decay in the cut-off:")
for k in (0, 100, 500, 1000):
    print(f"  k={k:>4}: gamma = {efficiency_decay(k, -0.001):.4f}")
print("and the combination is a weighted harmonic mean, e.g.")
print(f"  eet(sigma=0.1, gamma=0.9, beta=1) = {eet(0.1, 0.9, 1.0):.4f}\n")

pair = pair_runs(read_run_file(DATA / "retrieved.run"), read_run_file(DATA / "reranked.run"))
qrels = read_qrels_file(DATA / "qrels.txt")
matrix = sweep(pair, qrels, NDCG_AT_10)

# alpha tuned to the short demo lists so the decay bites within depth 100
alpha = -0.01
for beta in (0.0, 1.0, 2.0):
    targets = build_targets(pair, qrels, EetConfig(beta=beta, alpha=alpha), matrix=matrix)
    mean_curve = np.mean([targets[q] for q in targets.query_ids], axis=0)
    best = greedy_k(targets)
    print(f"beta={beta:g}: greedy-k depth {best:>3}, mean target curve:")
    for k in (0, 5, 10, 20, 50, 100):
        bar = "#" * int(200 * mean_curve[k])
        print(f"   k={k:>3}  {mean_curve[k]:.4f}  {bar}")
    print()
