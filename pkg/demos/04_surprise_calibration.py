"""Worked example: score calibration with a generalized Pareto tail.

Tail orientation, step by step.  A retrieval score list arrives sorted
descending: a few large "signal" scores, then a bulk of noise.  Surprise
models the *upper* tail of the score distribution: it puts a threshold at
a score quantile, fits a GPD to the exceedances above it, checks the fit
with the Cramér-von Mises statistic, and then reads each item's fitted
CDF value as "how far into the signal tail this item sits".  The cut
falls where those calibrated probabilities drop below the cut level.
"""

import numpy as np

from rankcut import SurpriseConfig, cvm_statistic, fit_gpd, gpd_cdf
from rankcut.runs import RankedList
from rankcut.truncators import surprise_diagnose

rng = np.random.default_rng(2718)

# 15 strong scores well above a noisy bulk of 185
signal = np.sort(rng.normal(14.0, 2.0, size=15))[::-1]
noise = np.sort(rng.exponential(2.0, size=185))[::-1]
scores = np.concatenate([signal, noise + 4.0])
scores = np.sort(scores)[::-1]
ranked = RankedList.from_scored_docs(
    "demo", [(f"d{i:03d}", float(s)) for i, s in enumerate(scores)]
)

config = SurpriseConfig()
print(f"candidate threshold quantiles: {config.candidate_threshold_quantiles}")
for quantile in sorted(config.candidate_threshold_quantiles, reverse=True):
    u = np.quantile(scores, quantile)
    excess = scores[scores > u] - u
    fit = fit_gpd(excess, threshold_u=float(u))
    verdict = "accept" if fit.cvm_statistic <= config.cvm_acceptance_level else "reject"
    print(
        f"  q={quantile:.1f}: u={u:7.3f}, {excess.size:3d} exceedances, "
        f"xi={fit.shape_xi:+.3f}, scale={fit.scale:.3f}, "
        f"W2={fit.cvm_statistic:.4f} -> {verdict}"
    )

decision = surprise_diagnose(ranked, config)
fit = decision.fit
print(f"\naccepted threshold quantile: {decision.threshold_quantile}")
print(f"calibrated tail probabilities along the ranking (cut at "
      f"{config.calibrated_cut_probability}):")
probs = np.where(
    scores > fit.threshold_u, gpd_cdf(scores - fit.threshold_u, fit.shape_xi, fit.scale), 0.0
)
for i in list(range(0, 12)) + [14, 15, 16, 25]:
    marker = "<- cut here" if i + 1 == decision.k + 1 else ""
    print(f"  rank {i + 1:>3}  score {scores[i]:7.3f}  p={probs[i]:.3f} {marker}")
print(f"\npredicted re-ranking cut-off k = {decision.k}")

# the GPD family is closed under scaling, so the decision is scale-free
scaled = RankedList.from_scored_docs(
    "demo-scaled", [(d, s * 40.0) for d, s in zip(ranked.doc_ids, ranked.scores)]
)
print(f"same list with scores x40: k = {surprise_diagnose(scaled, config).k}")

# and the CvM statistic at a perfect fit hits its floor 1/(12n)
n = 50
positions = (2 * np.arange(1, n + 1) - 1) / (2 * n)
print(f"\nCvM floor check: W2 = {cvm_statistic(positions, lambda v: v):.6f}"
      f" vs 1/(12n) = {1 / (12 * n):.6f}")
