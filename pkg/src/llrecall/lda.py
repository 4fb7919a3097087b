"""Latent Dirichlet allocation trained by collapsed Gibbs sampling.

Queries are folded in by Gibbs sampling against the trained topic-word
distributions, and documents are ranked by the inner product of topic
mixtures, i.e. the probability that query and document draw the same topic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .ranking import RankedList

try:
    from numba import njit
except ImportError:  # pragma: no cover - pure-Python fallback, slow
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f

TRAIN_SWEEPS = 500
INFER_SWEEPS = 100
DEFAULT_BETA = 0.01


def default_alpha(k: int) -> float:
    return 50.0 / k


@dataclass(frozen=True, eq=False)
class LdaModel:
    k: int
    vocabulary: dict[str, int]
    doc_ids: tuple[str, ...]
    phi: np.ndarray  # topics x terms
    doc_theta: np.ndarray  # docs x topics
    alpha: float
    beta: float
    seed: int
    iterations: int
    infer_sweeps: int = INFER_SWEEPS


@njit(cache=True)
def _train_sweep(words, docs, z, ndk, nkw, nk, u, alpha, beta, vbeta):
    k_topics = nk.shape[0]
    p = np.empty(k_topics)
    for i in range(words.shape[0]):
        w = words[i]
        d = docs[i]
        old = z[i]
        ndk[d, old] -= 1
        nkw[old, w] -= 1
        nk[old] -= 1
        total = 0.0
        for k in range(k_topics):
            total += (ndk[d, k] + alpha) * (nkw[k, w] + beta) / (nk[k] + vbeta)
            p[k] = total
        target = u[i] * total
        new = k_topics - 1
        for k in range(k_topics):
            if p[k] > target:
                new = k
                break
        z[i] = new
        ndk[d, new] += 1
        nkw[new, w] += 1
        nk[new] += 1


@njit(cache=True)
def _infer_sweep(words, z, nqk, phi, u, alpha):
    k_topics = nqk.shape[0]
    p = np.empty(k_topics)
    for i in range(words.shape[0]):
        w = words[i]
        nqk[z[i]] -= 1
        total = 0.0
        for k in range(k_topics):
            total += phi[k, w] * (nqk[k] + alpha)
            p[k] = total
        target = u[i] * total
        new = k_topics - 1
        for k in range(k_topics):
            if p[k] > target:
                new = k
                break
        z[i] = new
        nqk[new] += 1


def _normalize_rows(a: np.ndarray) -> np.ndarray:
    return a / a.sum(axis=1, keepdims=True)


def build_lda(
    doc_tokens: Sequence[Sequence[str]],
    k: int,
    seed: int,
    *,
    doc_ids: Sequence[str] | None = None,
    alpha: float | None = None,
    beta: float = DEFAULT_BETA,
    iterations: int = TRAIN_SWEEPS,
    infer_sweeps: int = INFER_SWEEPS,
) -> LdaModel:
    if k < 1:
        raise ValueError(f"LDA topic count must be >= 1, got {k}")
    if not any(doc_tokens):
        raise ValueError("LDA needs at least one non-empty document")
    alpha = default_alpha(k) if alpha is None else float(alpha)
    if doc_ids is None:
        doc_ids = [str(i) for i in range(len(doc_tokens))]

    terms = sorted({t for toks in doc_tokens for t in toks})
    vocab = {t: i for i, t in enumerate(terms)}
    n_terms = len(terms)
    words = np.array([vocab[t] for toks in doc_tokens for t in toks], dtype=np.int64)
    docs = np.array([d for d, toks in enumerate(doc_tokens) for _ in toks], dtype=np.int64)

    rng = np.random.default_rng(seed)
    z = rng.integers(0, k, size=len(words)).astype(np.int64)
    ndk = np.zeros((len(doc_tokens), k), dtype=np.int64)
    nkw = np.zeros((k, n_terms), dtype=np.int64)
    np.add.at(ndk, (docs, z), 1)
    np.add.at(nkw, (z, words), 1)
    nk = nkw.sum(axis=1)

    for _ in range(iterations):
        _train_sweep(words, docs, z, ndk, nkw, nk, rng.random(len(words)), alpha, beta, n_terms * beta)

    phi = _normalize_rows(nkw + beta)
    theta = _normalize_rows(ndk + alpha)
    return LdaModel(
        k=k,
        vocabulary=vocab,
        doc_ids=tuple(doc_ids),
        phi=phi,
        doc_theta=theta,
        alpha=alpha,
        beta=beta,
        seed=seed,
        iterations=iterations,
        infer_sweeps=infer_sweeps,
    )


def _query_word_ids(query: Sequence[str], model: LdaModel) -> np.ndarray:
    return np.array([model.vocabulary[t] for t in query if t in model.vocabulary], dtype=np.int64)


def infer_theta(query: Sequence[str], model: LdaModel, seed: int = 0) -> np.ndarray:
    """Topic mixture of an unseen token stream; uniform when nothing is in vocabulary."""
    words = _query_word_ids(query, model)
    if len(words) == 0:
        return np.full(model.k, 1.0 / model.k)
    rng = np.random.default_rng(seed)
    z = rng.integers(0, model.k, size=len(words)).astype(np.int64)
    nqk = np.bincount(z, minlength=model.k).astype(np.int64)
    for _ in range(model.infer_sweeps):
        _infer_sweep(words, z, nqk, model.phi, rng.random(len(words)), model.alpha)
    theta = nqk + model.alpha
    return theta / theta.sum()


def rank_by_theta(theta_q: np.ndarray, doc_theta: np.ndarray, doc_ids: Sequence[str]) -> RankedList:
    scores = np.asarray(doc_theta) @ np.asarray(theta_q)
    return RankedList.from_scores(zip(doc_ids, scores.tolist()))


def lda_rank(query: Sequence[str], model: LdaModel, seed: int = 0) -> RankedList:
    # the uniform fallback would score every document 1/k; an empty query retrieves nothing
    if len(_query_word_ids(query, model)) == 0:
        return RankedList()
    return rank_by_theta(infer_theta(query, model, seed), model.doc_theta, model.doc_ids)
