"""Latent semantic indexing over a weighted term-document matrix."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .ranking import RankedList
from .vsm import TermDocMatrix, WeightingScheme, query_vector

log = logging.getLogger(__name__)

TOPIC_COUNTS = (32, 64, 128, 256)

# latent cosines at or below this are numerical noise, not retrievals
SCORE_FLOOR = 1e-10

_warned: set[tuple[int, int]] = set()


@dataclass(frozen=True, eq=False)
class LsiModel:
    k: int
    requested_k: int
    term_space: np.ndarray  # terms x k, orthonormal columns
    singular_values: np.ndarray  # k, non-increasing
    doc_space: np.ndarray  # docs x k
    scheme: WeightingScheme

    @property
    def clamped(self) -> bool:
        return self.k != self.requested_k

    def reconstruct(self) -> np.ndarray:
        return (self.term_space * self.singular_values) @ self.doc_space.T


def dense_svd(weights: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Thin SVD ``A = U diag(s) Vt`` with singular values non-increasing."""
    u, s, vt = np.linalg.svd(weights, full_matrices=False)
    return u, s, vt


def lsi_from_svd(svd, k: int, scheme: WeightingScheme) -> LsiModel:
    if k < 1:
        raise ValueError(f"LSI topic count must be >= 1, got {k}")
    u, s, vt = svd
    k_eff = min(k, len(s))
    if k_eff < k and (k, k_eff) not in _warned:
        _warned.add((k, k_eff))
        log.warning("LSI: requested %d topics but matrix supports at most %d; clamping", k, k_eff)
    return LsiModel(
        k=k_eff,
        requested_k=k,
        term_space=np.ascontiguousarray(u[:, :k_eff]),
        singular_values=s[:k_eff].copy(),
        doc_space=np.ascontiguousarray(vt[:k_eff].T),
        scheme=WeightingScheme(scheme),
    )


def build_lsi(matrix: TermDocMatrix, k: int) -> LsiModel:
    if k < 1:
        raise ValueError(f"LSI topic count must be >= 1, got {k}")
    return lsi_from_svd(dense_svd(np.asarray(matrix.weights)), k, matrix.scheme)


def fold_in(q: np.ndarray, model: LsiModel) -> np.ndarray:
    """Project a term vector into topic space: ``inv(S) U^T q`` over non-zero singular values."""
    s = model.singular_values
    keep = s > _rank_tol(model)
    out = np.zeros(model.k)
    out[keep] = (model.term_space[:, keep].T @ q) / s[keep]
    return out


def _rank_tol(model: LsiModel) -> float:
    s = model.singular_values
    if len(s) == 0 or s[0] == 0:
        return 0.0
    return s[0] * max(model.term_space.shape[0], model.doc_space.shape[0]) * np.finfo(float).eps


def lsi_rank(query: Sequence[str], model: LsiModel, matrix: TermDocMatrix) -> RankedList:
    q = query_vector(query, matrix, model.scheme)
    if not q.any():
        return RankedList()
    # compare in the singular-value-scaled space, where full rank reproduces the VSM cosine ordering
    q_hat = fold_in(q, model) * model.singular_values
    docs = model.doc_space * model.singular_values
    qnorm = np.linalg.norm(q_hat)
    if qnorm == 0:
        return RankedList()
    dnorm = np.linalg.norm(docs, axis=1)
    scores = np.zeros(len(dnorm))
    ok = dnorm > 0
    scores[ok] = (docs[ok] @ q_hat) / (dnorm[ok] * qnorm)
    scores[scores <= SCORE_FLOOR] = 0.0
    return RankedList.from_scores(zip(matrix.doc_ids, np.minimum(scores, 1.0).tolist()))
