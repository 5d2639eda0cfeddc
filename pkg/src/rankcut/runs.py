"""Run files, relevance judgments, corpus text, and run pairing.

File formats:

- Run file: 6 whitespace-separated columns per line::

    qid Q0 docid rank score tag

  Incoming ranks are ignored; per query the items are re-sorted by score
  descending (ties broken by docid ascending) and ranks rewritten 1..n, so
  run files with inconsistent rank columns still parse to one canonical
  order.  Serialization emits the same 6 columns with scores printed to 6
  decimal places, queries in ascending query id order.

- Qrels file: 4 whitespace-separated columns ``qid iteration docid grade``.
  Grades are non-negative integers; a pair is "relevant" when its grade
  reaches the configured threshold.  Unjudged pairs are simply absent.

- Corpus file: one document per line, ``docid<TAB>text``.

Lists longer than the configured maximum depth are truncated at load time
(with a warning); 1000 is the conventional deepest re-ranking depth.
All containers here are treated as immutable after construction and are
safe to share across threads.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping, NamedTuple

from .errors import (
    DocSetMismatch,
    DuplicateDoc,
    EmptyInput,
    EmptyIntersection,
    MalformedLine,
    NegativeGrade,
)

log = logging.getLogger(__name__)

DEFAULT_MAX_DEPTH = 1000
DEFAULT_RELEVANCE_THRESHOLD = 2


class RunItem(NamedTuple):
    doc_id: str
    score: float
    rank: int


@dataclass(frozen=True)
class RankedList:
    """One query's ordered retrieval result.

    Invariants (checked on construction): ranks are contiguous 1..n, scores
    are non-increasing with rank, and doc ids are unique.
    """

    query_id: str
    items: tuple[RunItem, ...]

    def __post_init__(self):
        seen = set()
        prev_score = None
        for pos, item in enumerate(self.items, start=1):
            if item.rank != pos:
                raise ValueError(
                    f"query {self.query_id}: rank {item.rank} at position {pos}; "
                    "ranks must be contiguous from 1"
                )
            if prev_score is not None and item.score > prev_score:
                raise ValueError(
                    f"query {self.query_id}: scores increase at rank {pos}"
                )
            if item.doc_id in seen:
                raise ValueError(
                    f"query {self.query_id}: duplicate doc {item.doc_id}"
                )
            seen.add(item.doc_id)
            prev_score = item.score

    def __len__(self) -> int:
        return len(self.items)

    @property
    def doc_ids(self) -> tuple[str, ...]:
        return tuple(item.doc_id for item in self.items)

    @property
    def scores(self) -> tuple[float, ...]:
        return tuple(item.score for item in self.items)

    @property
    def doc_set(self) -> frozenset[str]:
        return frozenset(item.doc_id for item in self.items)

    @staticmethod
    def from_scored_docs(query_id: str, scored: Iterable[tuple[str, float]]) -> "RankedList":
        """Build a canonical list: sort by score desc, docid asc, rank 1..n."""
        ordered = sorted(scored, key=lambda pair: (-pair[1], pair[0]))
        items = tuple(
            RunItem(doc_id, float(score), rank)
            for rank, (doc_id, score) in enumerate(ordered, start=1)
        )
        return RankedList(query_id, items)


@dataclass(frozen=True)
class RunSet:
    """All ranked lists of one system, keyed by query id."""

    tag: str
    lists: Mapping[str, RankedList]

    def __len__(self) -> int:
        return len(self.lists)

    def __getitem__(self, query_id: str) -> RankedList:
        return self.lists[query_id]

    def __contains__(self, query_id: str) -> bool:
        return query_id in self.lists

    @property
    def query_ids(self) -> tuple[str, ...]:
        return tuple(sorted(self.lists))

    def depths(self) -> dict[str, int]:
        return {qid: len(self.lists[qid]) for qid in self.query_ids}


@dataclass(frozen=True)
class QrelsSet:
    """Graded relevance judgments with a binarization threshold.

    ``grades`` maps (query_id, doc_id) to an integer grade >= 0.  A pair is
    relevant when ``grade >= relevance_threshold``; absent pairs are
    unjudged and count as grade 0 everywhere except ``judged@k``.
    """

    grades: Mapping[tuple[str, str], int]
    relevance_threshold: int = DEFAULT_RELEVANCE_THRESHOLD
    _by_query: dict[str, dict[str, int]] = field(
        init=False, repr=False, compare=False, default_factory=dict
    )

    def __post_init__(self):
        if self.relevance_threshold < 1:
            raise ValueError("relevance_threshold must be >= 1")
        by_query: dict[str, dict[str, int]] = {}
        for (qid, did), grade in self.grades.items():
            if grade < 0:
                raise ValueError(f"negative grade for ({qid}, {did})")
            by_query.setdefault(qid, {})[did] = grade
        object.__setattr__(self, "_by_query", by_query)

    def grade_of(self, query_id: str, doc_id: str) -> int:
        return self.grades.get((query_id, doc_id), 0)

    def is_judged(self, query_id: str, doc_id: str) -> bool:
        return (query_id, doc_id) in self.grades

    def is_relevant(self, query_id: str, doc_id: str) -> bool:
        return self.grade_of(query_id, doc_id) >= self.relevance_threshold

    def judged_for_query(self, query_id: str) -> dict[str, int]:
        """All judged doc -> grade pairs for one query."""
        return dict(self._by_query.get(query_id, {}))

    def relevant_count_in(self, ranked: RankedList) -> int:
        """Number of relevant items within the list (N over the list)."""
        return sum(
            1 for doc in ranked.doc_ids if self.is_relevant(ranked.query_id, doc)
        )


@dataclass(frozen=True)
class RerankPair:
    """A retrieved run and a full-depth re-ranked run over the same docs."""

    retrieved: RunSet
    reranked: RunSet

    def __post_init__(self):
        for qid in self.retrieved.query_ids:
            if qid not in self.reranked:
                raise ValueError(f"re-ranked run is missing query {qid}")
            if self.retrieved[qid].doc_set != self.reranked[qid].doc_set:
                raise ValueError(f"doc sets differ for query {qid}")

    @property
    def query_ids(self) -> tuple[str, ...]:
        return self.retrieved.query_ids


def parse_run(lines: Iterable[str], max_depth: int = DEFAULT_MAX_DEPTH) -> RunSet:
    """Parse a 6-column run stream into a canonical :class:`RunSet`.

    Raises :class:`MalformedLine` (with line number) on bad columns,
    :class:`DuplicateDoc` when a doc repeats within a query, and
    :class:`EmptyInput` when no data lines are present.  Blank lines are
    skipped.
    """
    tag = None
    per_query: dict[str, dict[str, float]] = {}
    for line_no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        cols = line.split()
        if len(cols) != 6:
            raise MalformedLine(f"expected 6 columns, got {len(cols)}", line_no)
        qid, _, doc_id, rank_s, score_s, line_tag = cols
        try:
            int(rank_s)
        except ValueError:
            raise MalformedLine(f"non-integer rank {rank_s!r}", line_no) from None
        try:
            score = float(score_s)
        except ValueError:
            raise MalformedLine(f"non-numeric score {score_s!r}", line_no) from None
        if tag is None:
            tag = line_tag
        docs = per_query.setdefault(qid, {})
        if doc_id in docs:
            raise DuplicateDoc(f"doc {doc_id} appears twice for query {qid}")
        docs[doc_id] = score
    if tag is None:
        raise EmptyInput("run stream contains no data lines")

    lists: dict[str, RankedList] = {}
    for qid, docs in per_query.items():
        ranked = RankedList.from_scored_docs(qid, docs.items())
        if len(ranked) > max_depth:
            log.warning(
                "query %s: list depth %d exceeds cap %d, truncating",
                qid, len(ranked), max_depth,
            )
            ranked = RankedList(qid, ranked.items[:max_depth])
        lists[qid] = ranked
    return RunSet(tag=tag, lists=lists)


def serialize_run(run: RunSet) -> Iterator[str]:
    """Yield canonical run-file lines (no trailing newline per item)."""
    for qid in run.query_ids:
        for item in run[qid].items:
            yield f"{qid} Q0 {item.doc_id} {item.rank} {item.score:.6f} {run.tag}"


def read_run_file(path: str | Path, max_depth: int = DEFAULT_MAX_DEPTH) -> RunSet:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_run(handle, max_depth=max_depth)


def write_run_file(path: str | Path, run: RunSet) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for line in serialize_run(run):
            handle.write(line + "\n")


def parse_qrels(
    lines: Iterable[str],
    relevance_threshold: int = DEFAULT_RELEVANCE_THRESHOLD,
) -> QrelsSet:
    """Parse 4-column qrels; raises on malformed lines or negative grades."""
    grades: dict[tuple[str, str], int] = {}
    saw_any = False
    for line_no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        cols = line.split()
        if len(cols) != 4:
            raise MalformedLine(f"expected 4 columns, got {len(cols)}", line_no)
        qid, _, doc_id, grade_s = cols
        try:
            grade = int(grade_s)
        except ValueError:
            raise MalformedLine(f"non-integer grade {grade_s!r}", line_no) from None
        if grade < 0:
            raise NegativeGrade(f"negative grade {grade} for ({qid}, {doc_id})", line_no)
        grades[(qid, doc_id)] = grade
        saw_any = True
    if not saw_any:
        raise EmptyInput("qrels stream contains no data lines")
    return QrelsSet(grades=grades, relevance_threshold=relevance_threshold)


def read_qrels_file(
    path: str | Path,
    relevance_threshold: int = DEFAULT_RELEVANCE_THRESHOLD,
) -> QrelsSet:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_qrels(handle, relevance_threshold=relevance_threshold)


def pair_runs(retrieved: RunSet, reranked: RunSet) -> RerankPair:
    """Pair two runs over their common queries.

    Queries present in only one run are dropped.  Queries present in both
    must have identical doc sets (the re-ranker re-scored the full
    retrieved list); otherwise :class:`DocSetMismatch` reports every
    offending query with its per-query symmetric difference.
    """
    common = sorted(set(retrieved.lists) & set(reranked.lists))
    if not common:
        raise EmptyIntersection("runs share no query ids")
    mismatches = []
    for qid in common:
        diff = retrieved[qid].doc_set ^ reranked[qid].doc_set
        if diff:
            shown = ", ".join(sorted(diff)[:5])
            mismatches.append(f"{qid}: {{{shown}}}" + (" ..." if len(diff) > 5 else ""))
    if mismatches:
        raise DocSetMismatch(
            "doc sets differ between retrieved and re-ranked runs: "
            + "; ".join(mismatches)
        )
    return RerankPair(
        retrieved=RunSet(retrieved.tag, {q: retrieved[q] for q in common}),
        reranked=RunSet(reranked.tag, {q: reranked[q] for q in common}),
    )


def read_corpus_file(path: str | Path) -> dict[str, str]:
    """Read a ``docid<TAB>text`` corpus into a dict."""
    corpus: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as handle:
        for line_no, raw in enumerate(handle, start=1):
            line = raw.rstrip("\n")
            if not line:
                continue
            if "\t" not in line:
                raise MalformedLine("expected docid<TAB>text", line_no)
            doc_id, text = line.split("\t", 1)
            corpus[doc_id] = text
    if not corpus:
        raise EmptyInput(f"corpus file {path} contains no documents")
    return corpus
