"""Shared builders for randomized test instances."""

from __future__ import annotations

import numpy as np

from rankcut import QrelsSet, RankedList, RerankPair, RunItem, RunSet


def ranked_list(query_id: str, doc_scores) -> RankedList:
    return RankedList.from_scored_docs(query_id, doc_scores)


def list_from_docs(query_id: str, doc_ids) -> RankedList:
    """A ranked list in the given order with synthetic descending scores."""
    n = len(doc_ids)
    items = tuple(
        RunItem(doc, float(n - i), i + 1) for i, doc in enumerate(doc_ids)
    )
    return RankedList(query_id, items)


def qrels_from_grades(query_id: str, grades: dict, threshold: int = 1) -> QrelsSet:
    return QrelsSet(
        grades={(query_id, doc): g for doc, g in grades.items()},
        relevance_threshold=threshold,
    )


def random_instance(rng: np.random.Generator, max_docs: int = 10, max_grade: int = 3):
    """One query: ranked list, full grade map, relevance threshold."""
    n = int(rng.integers(1, max_docs + 1))
    doc_ids = [f"d{i:02d}" for i in range(n)]
    order = rng.permutation(n)
    docs = [doc_ids[i] for i in order]
    # judge a random subset; some docs stay unjudged on purpose
    grades = {}
    for doc in docs:
        if rng.random() < 0.8:
            grades[doc] = int(rng.integers(0, max_grade + 1))
    threshold = int(rng.integers(1, max_grade + 1))
    return list_from_docs("q", docs), grades, threshold


def random_pair(rng: np.random.Generator, n_queries: int = 1, max_depth: int = 32):
    """A RerankPair plus qrels with random scores and grades."""
    retrieved = {}
    reranked = {}
    grades = {}
    for qi in range(n_queries):
        qid = f"q{qi:03d}"
        n = int(rng.integers(2, max_depth + 1))
        docs = [f"d{qi:03d}_{j:02d}" for j in range(n)]
        ret_scores = rng.normal(size=n)
        rr_scores = rng.normal(size=n)
        retrieved[qid] = RankedList.from_scored_docs(
            qid, zip(docs, (float(s) for s in ret_scores))
        )
        reranked[qid] = RankedList.from_scored_docs(
            qid, zip(docs, (float(s) for s in rr_scores))
        )
        for doc in docs:
            if rng.random() < 0.7:
                grades[(qid, doc)] = int(rng.integers(0, 4))
    pair = RerankPair(
        retrieved=RunSet("ret", retrieved), reranked=RunSet("rr", reranked)
    )
    qrels = QrelsSet(grades=grades, relevance_threshold=2)
    return pair, qrels
