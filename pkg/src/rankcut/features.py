"""Per-item features for supervised truncators, exported as JSON lines.

Each query becomes one JSON object::

    {"schema_version": "v1", "query_id": ..., "records": [...],
     "labels": [...], "targets": [...]}

Record fields, in fixed order: doc_id, retrieval_score (min-max normalized
per list; constant lists map to 0.5), length_tokens, unique_tokens,
tfidf_sim_prev, tfidf_sim_next, and, when an embeddings file is supplied,
embed_sim_prev, embed_sim_next, dense_embedding (query embedding followed
by the item embedding).  Record i always describes retrieved rank i+1.

Neighbor similarities are cosines with the rank-adjacent items; boundary
items carry their single available neighbor similarity in both slots, and
a single-item list gets 0 in both.  Cosines against an all-zero vector are
defined as 0.

The tf-idf scheme: idf(t) = ln(N / df(t)) + 1, components tf * idf,
L2-normalized, with the vocabulary taken from the whole corpus.
"""

from __future__ import annotations

import json
import logging
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import EmptyCorpus, MissingDocText, MissingEmbedding
from .runs import QrelsSet, RerankPair
from .targets import TargetVector

log = logging.getLogger(__name__)

FEATURE_SCHEMA_VERSION = "v1"

_TOKEN_RE = re.compile(r"[^\W_]+")


def tokenize(text: str) -> list[str]:
    """Lowercase and split on any non-alphanumeric codepoint."""
    return _TOKEN_RE.findall(text.lower())


@dataclass(frozen=True)
class TfidfVectorizer:
    """Corpus-wide idf table; immutable once built."""

    n_docs: int
    idf: Mapping[str, float]

    def vectorize(self, text: str) -> dict[str, float]:
        """Unit-L2 tf-idf vector as a sparse token->weight dict."""
        counts: dict[str, int] = {}
        for token in tokenize(text):
            counts[token] = counts.get(token, 0) + 1
        weights = {
            token: tf * self.idf[token]
            for token, tf in counts.items()
            if token in self.idf
        }
        norm = math.sqrt(sum(w * w for w in weights.values()))
        if norm == 0.0:
            return {}
        return {token: w / norm for token, w in weights.items()}


def build_tfidf(corpus: Mapping[str, str]) -> TfidfVectorizer:
    if not corpus:
        raise EmptyCorpus("cannot build a vocabulary from an empty corpus")
    n_docs = len(corpus)
    df: dict[str, int] = {}
    for text in corpus.values():
        for token in set(tokenize(text)):
            df[token] = df.get(token, 0) + 1
    idf = {token: math.log(n_docs / count) + 1.0 for token, count in df.items()}
    return TfidfVectorizer(n_docs=n_docs, idf=idf)


def cosine_sparse(a: Mapping[str, float], b: Mapping[str, float]) -> float:
    """Cosine of two unit-norm sparse vectors; 0 if either is all-zero."""
    if not a or not b:
        log.debug("cosine against an all-zero vector, returning 0")
        return 0.0
    if len(b) < len(a):
        a, b = b, a
    dot = sum(w * b[token] for token, w in a.items() if token in b)
    return min(1.0, max(-1.0, dot))


def cosine_dense(a: np.ndarray, b: np.ndarray) -> float:
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        log.debug("cosine against an all-zero vector, returning 0")
        return 0.0
    return min(1.0, max(-1.0, float(np.dot(a, b)) / (na * nb)))


def neighbor_similarity(vectors: Sequence, cosine=cosine_sparse) -> list[tuple[float, float]]:
    """(sim_prev, sim_next) per item against its rank-adjacent neighbors."""
    n = len(vectors)
    if n == 0:
        return []
    if n == 1:
        return [(0.0, 0.0)]
    forward = [cosine(vectors[i], vectors[i + 1]) for i in range(n - 1)]
    out = []
    for i in range(n):
        sim_prev = forward[i - 1] if i > 0 else forward[0]
        sim_next = forward[i] if i < n - 1 else forward[n - 2]
        out.append((sim_prev, sim_next))
    return out


def normalize_scores(scores: Sequence[float]) -> list[float]:
    """Per-list min-max; constant lists carry no information and map to 0.5."""
    lo, hi = min(scores), max(scores)
    if hi == lo:
        return [0.5] * len(scores)
    span = hi - lo
    return [(s - lo) / span for s in scores]


@dataclass(frozen=True)
class EmbeddingStore:
    """(query_id, doc_id) -> (query embedding, doc embedding)."""

    dim: int
    pairs: Mapping[tuple[str, str], tuple[tuple[float, ...], tuple[float, ...]]]

    def lookup(self, query_id: str, doc_id: str):
        key = (query_id, doc_id)
        if key not in self.pairs:
            raise MissingEmbedding(f"no embedding for query {query_id}, doc {doc_id}")
        return self.pairs[key]


def read_embeddings_file(path: str | Path) -> EmbeddingStore:
    """JSON-lines embeddings; the first record is a header declaring "dim"."""
    dim = None
    pairs: dict[tuple[str, str], tuple[tuple[float, ...], tuple[float, ...]]] = {}
    with open(path, "r", encoding="utf-8") as handle:
        for line_no, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line:
                continue
            record = json.loads(line)
            if dim is None:
                if "dim" not in record:
                    raise ValueError(f"{path}:1: first record must declare 'dim'")
                dim = int(record["dim"])
                continue
            qe = tuple(float(v) for v in record["query_embedding"])
            de = tuple(float(v) for v in record["doc_embedding"])
            if len(qe) != dim or len(de) != dim:
                raise ValueError(
                    f"{path}:{line_no}: embedding dimension != declared {dim}"
                )
            pairs[(record["query_id"], record["doc_id"])] = (qe, de)
    if dim is None:
        raise ValueError(f"{path}: empty embeddings file")
    return EmbeddingStore(dim=dim, pairs=pairs)


def export_features(
    pair: RerankPair,
    corpus: Mapping[str, str],
    qrels: QrelsSet,
    targets: TargetVector,
    embeddings: EmbeddingStore | None = None,
    vectorizer: TfidfVectorizer | None = None,
) -> list[dict]:
    """One exportable JSON object per query, in ascending query id order."""
    if vectorizer is None:
        vectorizer = build_tfidf(corpus)
    objects = []
    for qid in pair.query_ids:
        ranked = pair.retrieved[qid]
        docs = ranked.doc_ids
        for doc in docs:
            if doc not in corpus:
                raise MissingDocText(f"corpus lacks text for doc {doc} (query {qid})")
        texts = [corpus[doc] for doc in docs]
        token_lists = [tokenize(text) for text in texts]
        tfidf_vectors = [vectorizer.vectorize(text) for text in texts]
        tfidf_sims = neighbor_similarity(tfidf_vectors, cosine=cosine_sparse)
        norm_scores = normalize_scores(ranked.scores)

        embed_sims = None
        dense = None
        if embeddings is not None:
            looked_up = [embeddings.lookup(qid, doc) for doc in docs]
            doc_vectors = [np.asarray(de, dtype=float) for _, de in looked_up]
            embed_sims = neighbor_similarity(doc_vectors, cosine=cosine_dense)
            dense = [list(qe) + list(de) for qe, de in looked_up]

        records = []
        for i, doc in enumerate(docs):
            record = {
                "doc_id": doc,
                "retrieval_score": norm_scores[i],
                "length_tokens": len(token_lists[i]),
                "unique_tokens": len(set(token_lists[i])),
                "tfidf_sim_prev": tfidf_sims[i][0],
                "tfidf_sim_next": tfidf_sims[i][1],
            }
            if embeddings is not None:
                record["embed_sim_prev"] = embed_sims[i][0]
                record["embed_sim_next"] = embed_sims[i][1]
                record["dense_embedding"] = dense[i]
            records.append(record)

        labels = [1 if qrels.is_relevant(qid, doc) else 0 for doc in docs]
        objects.append(
            {
                "schema_version": FEATURE_SCHEMA_VERSION,
                "query_id": qid,
                "records": records,
                "labels": labels,
                "targets": [float(v) for v in targets[qid]],
            }
        )
    return objects


def write_features_file(path: str | Path, objects: Iterable[dict]) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for obj in objects:
            handle.write(json.dumps(obj, separators=(",", ":")) + "\n")


def read_features_file(path: str | Path) -> list[dict]:
    objects = []
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if line:
                objects.append(json.loads(line))
    return objects
