"""Vector space model: weighted term-document matrix and cosine/overlap ranking."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .corpus import Corpus, lesson_document_text
from .ranking import RankedList
from .textprep import PreprocessConfig, preprocess


class WeightingScheme(str, Enum):
    TFIDF = "tfidf"
    SUBLINEAR = "sublinear"
    BOOLEAN = "boolean"


class SimilarityKind(str, Enum):
    COSINE = "cosine"
    OVERLAP = "overlap"


class BuildError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class TermDocMatrix:
    vocabulary: dict[str, int]
    doc_ids: tuple[str, ...]
    # terms x documents, dense; corpora here are a few hundred documents
    weights: np.ndarray
    doc_freq: np.ndarray
    scheme: WeightingScheme
    doc_norms: np.ndarray = field(init=False)
    doc_sums: np.ndarray = field(init=False)

    def __post_init__(self):
        self.weights.setflags(write=False)
        object.__setattr__(self, "doc_norms", np.sqrt((self.weights**2).sum(axis=0)))
        object.__setattr__(self, "doc_sums", self.weights.sum(axis=0))

    @property
    def n_docs(self) -> int:
        return len(self.doc_ids)

    @property
    def idf(self) -> np.ndarray:
        return np.log(self.n_docs / self.doc_freq)


def _weigh(tf: np.ndarray, idf: np.ndarray, scheme: WeightingScheme) -> np.ndarray:
    """Apply a weighting scheme to raw counts; ``idf`` broadcasts along the term axis."""
    if scheme is WeightingScheme.TFIDF:
        return tf * idf
    if scheme is WeightingScheme.SUBLINEAR:
        out = np.zeros_like(tf, dtype=float)
        nz = tf > 0
        out[nz] = 1.0 + np.log(tf[nz])
        return out * idf
    if scheme is WeightingScheme.BOOLEAN:
        return (tf > 0).astype(float)
    raise ValueError(f"unknown weighting scheme {scheme!r}")


def build_matrix_from_tokens(
    doc_ids: Sequence[str],
    doc_tokens: Sequence[Sequence[str]],
    scheme: WeightingScheme,
) -> TermDocMatrix:
    if not doc_ids:
        raise BuildError("cannot build a term-document matrix over zero documents")
    scheme = WeightingScheme(scheme)
    terms = sorted({t for toks in doc_tokens for t in toks})
    if not terms:
        raise BuildError("empty vocabulary after preprocessing")
    vocab = {t: i for i, t in enumerate(terms)}
    tf = np.zeros((len(terms), len(doc_ids)))
    for j, toks in enumerate(doc_tokens):
        for term, count in Counter(toks).items():
            tf[vocab[term], j] = count
    df = (tf > 0).sum(axis=1).astype(float)
    idf = np.log(len(doc_ids) / df)
    weights = _weigh(tf, idf[:, None], scheme)
    return TermDocMatrix(vocab, tuple(doc_ids), weights, df, scheme)


def build_matrix(
    corpus: Corpus,
    prep: PreprocessConfig,
    scheme: WeightingScheme,
    stopwords: frozenset[str] | None = None,
) -> TermDocMatrix:
    docs = [preprocess(lesson_document_text(lesson), prep, stopwords) for lesson in corpus.lessons]
    return build_matrix_from_tokens(corpus.lesson_ids, docs, scheme)


def query_vector(query: Sequence[str], matrix: TermDocMatrix, scheme: WeightingScheme | None = None) -> np.ndarray:
    """Weigh query tokens with corpus idf; out-of-vocabulary terms are dropped."""
    scheme = matrix.scheme if scheme is None else WeightingScheme(scheme)
    tf = np.zeros(len(matrix.vocabulary))
    for term, count in Counter(query).items():
        idx = matrix.vocabulary.get(term)
        if idx is not None:
            tf[idx] = count
    return _weigh(tf, matrix.idf, scheme)


def cosine_scores(q: np.ndarray, matrix: TermDocMatrix) -> np.ndarray:
    qnorm = np.sqrt(q @ q)
    if qnorm == 0:
        return np.zeros(matrix.n_docs)
    dots = q @ matrix.weights
    denom = matrix.doc_norms * qnorm
    out = np.zeros(matrix.n_docs)
    ok = denom > 0
    out[ok] = dots[ok] / denom[ok]
    return np.minimum(out, 1.0)


def overlap_scores(q: np.ndarray, matrix: TermDocMatrix) -> np.ndarray:
    qsum = q.sum()
    if qsum <= 0:
        return np.zeros(matrix.n_docs)
    nz = np.flatnonzero(q)
    shared = np.minimum(matrix.weights[nz, :], q[nz, None]).sum(axis=0)
    denom = np.minimum(qsum, matrix.doc_sums)
    out = np.zeros(matrix.n_docs)
    ok = denom > 0
    out[ok] = shared[ok] / denom[ok]
    return np.minimum(out, 1.0)


def vsm_rank(
    query: Sequence[str],
    matrix: TermDocMatrix,
    scheme: WeightingScheme | None = None,
    sim: SimilarityKind = SimilarityKind.COSINE,
) -> RankedList:
    q = query_vector(query, matrix, scheme)
    sim = SimilarityKind(sim)
    scores = cosine_scores(q, matrix) if sim is SimilarityKind.COSINE else overlap_scores(q, matrix)
    return RankedList.from_scores(zip(matrix.doc_ids, scores.tolist()))
