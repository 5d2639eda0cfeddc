"""Exception types raised across the package.

Every error that callers are expected to catch derives from
:class:`RankcutError`; plain ``ValueError``/``TypeError`` are reserved for
programming mistakes (bad argument types, violated call contracts).
"""

from __future__ import annotations


class RankcutError(Exception):
    """Base class for all domain errors."""


class MalformedLine(RankcutError):
    """An input line does not match the expected column layout."""

    def __init__(self, message: str, line_no: int | None = None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class DuplicateDoc(RankcutError):
    """The same document appears twice for one query."""


class EmptyInput(RankcutError):
    """An input stream contained no usable records."""


class NegativeGrade(MalformedLine):
    """A relevance grade below zero was encountered."""


class DocSetMismatch(RankcutError):
    """Retrieved and re-ranked runs disagree on the documents of a query."""


class EmptyIntersection(RankcutError):
    """Two runs share no query ids."""


class CutoffOutOfRange(RankcutError):
    """A truncation cut-off k lies outside [0, list depth]."""


class MissingQuery(RankcutError):
    """A prediction or auxiliary file does not cover a required query."""


class EmptyTraining(RankcutError):
    """A training operation received no queries."""


class SupportViolation(RankcutError):
    """A sample lies outside the support of the candidate distribution."""


class DegenerateSample(RankcutError):
    """All samples are identical; no distribution can be fitted."""


class TooFewSamples(RankcutError):
    """Fewer samples than the configured minimum."""


class NoAcceptableFit(RankcutError):
    """No candidate tail threshold passed the goodness-of-fit check."""


class EmptyCorpus(RankcutError):
    """A corpus with zero documents cannot define a vocabulary."""


class MissingDocText(RankcutError):
    """The corpus lacks the text of a document referenced by a run."""


class MissingEmbedding(RankcutError):
    """The embeddings file lacks a required (query, document) pair."""


class ConfigError(RankcutError):
    """An experiment configuration failed validation."""
