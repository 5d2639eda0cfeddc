"""Independent reference implementations used as test oracles.

Everything here is written directly from the metric definitions using
plain Python containers, deliberately sharing no code with the package
under test.
"""

from __future__ import annotations

import math


def naive_precision(doc_ids, relevant: set, k: int) -> float:
    hits = sum(1 for d in doc_ids[:k] if d in relevant)
    return hits / k


def naive_recall(doc_ids, relevant: set, k: int) -> float:
    n_l = sum(1 for d in doc_ids if d in relevant)
    if n_l == 0:
        return 0.0
    hits = sum(1 for d in doc_ids[:k] if d in relevant)
    return hits / n_l


def naive_f1(doc_ids, relevant: set, k: int) -> float:
    p = naive_precision(doc_ids, relevant, k)
    r = naive_recall(doc_ids, relevant, k)
    if p + r == 0.0:
        return 0.0
    return 2.0 * p * r / (p + r)


def naive_dcg_penalized(doc_ids, relevant: set, k: int) -> float:
    total = 0.0
    for i, d in enumerate(doc_ids[:k], start=1):
        total += (1.0 if d in relevant else -1.0) / math.log2(i + 1)
    return total


def naive_ndcg(doc_ids, grades: dict, k: int) -> float:
    """grades: doc -> grade for every judged doc of the query (linear gain)."""
    dcg = 0.0
    for i, d in enumerate(doc_ids[:k], start=1):
        dcg += grades.get(d, 0) / math.log2(i + 1)
    ideal = sorted((g for g in grades.values() if g > 0), reverse=True)
    idcg = 0.0
    for i, g in enumerate(ideal[:k], start=1):
        idcg += g / math.log2(i + 1)
    if idcg == 0.0:
        return 0.0
    return dcg / idcg


def naive_judged(doc_ids, judged: set, k: int) -> float:
    return sum(1 for d in doc_ids[:k] if d in judged) / k


def naive_paired_t(a, b):
    """(t, df) by the textbook formula; p left to a reference table/library."""
    diffs = [x - y for x, y in zip(a, b)]
    n = len(diffs)
    mean = sum(diffs) / n
    var = sum((d - mean) ** 2 for d in diffs) / (n - 1)
    t = mean / math.sqrt(var / n)
    return t, n - 1
