"""The 88-point classifier grid and a uniform way to build and query each point.

Config ids follow ``model:prep:weighting:similarity:topics`` with ``-`` for
fields a model family does not use, e.g. ``lsi:stemstop:sublinear:cosine:128``
or ``lda:stop:-:condprob:64``.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import threading
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Sequence

import numpy as np

from . import lda as lda_mod
from .corpus import Corpus, QueryArtifact, artifact_query_string, lesson_document_text
from .lsi import TOPIC_COUNTS, LsiModel, dense_svd, lsi_from_svd, lsi_rank
from .ranking import RankedList
from .textprep import PreprocessConfig, all_preprocess_configs, preprocess
from .vsm import SimilarityKind, TermDocMatrix, WeightingScheme, build_matrix_from_tokens, vsm_rank

MODELS = ("vsm", "lsi", "lda")
CONDPROB = "condprob"
CACHE_FORMAT = "llrecall-model"
CACHE_VERSION = 1


class ClassifierBuildError(RuntimeError):
    def __init__(self, config_id: str, cause: Exception):
        super().__init__(f"{config_id}: {cause}")
        self.config_id = config_id


@dataclass(frozen=True)
class ClassifierConfig:
    model: str
    prep: PreprocessConfig
    weighting: WeightingScheme | None = None
    similarity: str = "cosine"
    topics: int | None = None

    def __post_init__(self):
        if self.weighting is not None:
            object.__setattr__(self, "weighting", WeightingScheme(self.weighting))
        _check_family(self)

    @property
    def id(self) -> str:
        return ":".join(
            (
                self.model,
                self.prep.name,
                self.weighting.value if self.weighting else "-",
                self.similarity,
                str(self.topics) if self.topics else "-",
            )
        )

    @classmethod
    def parse(cls, config_id: str) -> "ClassifierConfig":
        parts = config_id.strip().split(":")
        if len(parts) != 5:
            raise ValueError(f"malformed config id {config_id!r}")
        model, prep, weighting, similarity, topics = parts
        try:
            return cls(
                model=model,
                prep=PreprocessConfig.from_name(prep),
                weighting=None if weighting == "-" else WeightingScheme(weighting),
                similarity=similarity,
                topics=None if topics == "-" else int(topics),
            )
        except ValueError as exc:
            raise ValueError(f"invalid config id {config_id!r}: {exc}") from None

    def __str__(self) -> str:
        return self.id


def _check_family(cfg: ClassifierConfig) -> None:
    if cfg.model == "vsm":
        ok = (
            cfg.weighting is not None
            and cfg.similarity in (SimilarityKind.COSINE.value, SimilarityKind.OVERLAP.value)
            and cfg.topics is None
        )
    elif cfg.model == "lsi":
        ok = cfg.weighting is not None and cfg.similarity == "cosine" and cfg.topics in TOPIC_COUNTS
    elif cfg.model == "lda":
        ok = cfg.weighting is None and cfg.similarity == CONDPROB and cfg.topics in TOPIC_COUNTS
    else:
        raise ValueError(f"unknown model {cfg.model!r}")
    if not ok:
        raise ValueError(f"parameters not valid for model {cfg.model!r}")


def enumerate_grid() -> list[ClassifierConfig]:
    configs = []
    schemes = list(WeightingScheme)
    for prep in all_preprocess_configs():
        for scheme in schemes:
            for sim in SimilarityKind:
                configs.append(ClassifierConfig("vsm", prep, scheme, sim.value))
    for prep in all_preprocess_configs():
        for scheme in schemes:
            for k in TOPIC_COUNTS:
                configs.append(ClassifierConfig("lsi", prep, scheme, "cosine", k))
    for prep in all_preprocess_configs():
        for k in TOPIC_COUNTS:
            configs.append(ClassifierConfig("lda", prep, None, CONDPROB, k))
    return configs


@lru_cache(maxsize=1)
def grid_order() -> dict[str, int]:
    """Canonical position of every config id."""
    return {cfg.id: i for i, cfg in enumerate(enumerate_grid())}


@dataclass(frozen=True)
class BuildOptions:
    master_seed: int = 0
    lda_alpha: float | None = None
    lda_beta: float = lda_mod.DEFAULT_BETA
    lda_train_sweeps: int = lda_mod.TRAIN_SWEEPS
    lda_infer_sweeps: int = lda_mod.INFER_SWEEPS
    stopwords: frozenset[str] | None = field(default=None, compare=True)

    def fingerprint(self) -> str:
        payload = {
            "master_seed": self.master_seed,
            "lda_alpha": self.lda_alpha,
            "lda_beta": self.lda_beta,
            "lda_train_sweeps": self.lda_train_sweeps,
            "lda_infer_sweeps": self.lda_infer_sweeps,
            "stopwords": sorted(self.stopwords) if self.stopwords is not None else None,
        }
        return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()[:16]


def derive_seed(*parts) -> int:
    """Order-independent per-task seed from a master seed and string keys."""
    digest = hashlib.sha256(":".join(str(p) for p in parts).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little") & 0x7FFF_FFFF_FFFF_FFFF


# --- shared, memoized building blocks --------------------------------------

@lru_cache(maxsize=16)
def _doc_tokens(corpus: Corpus, prep: PreprocessConfig, stopwords) -> tuple[tuple[str, ...], ...]:
    return tuple(tuple(preprocess(lesson_document_text(l), prep, stopwords)) for l in corpus.lessons)


@lru_cache(maxsize=16)
def _matrix(corpus: Corpus, prep: PreprocessConfig, scheme: WeightingScheme, stopwords) -> TermDocMatrix:
    return build_matrix_from_tokens(corpus.lesson_ids, _doc_tokens(corpus, prep, stopwords), scheme)


@lru_cache(maxsize=4)
def _svd(corpus: Corpus, prep: PreprocessConfig, scheme: WeightingScheme, stopwords):
    return dense_svd(np.asarray(_matrix(corpus, prep, scheme, stopwords).weights))


class Classifier:
    """A built grid point, ready to rank query token streams."""

    def __init__(self, config: ClassifierConfig, matrix=None, lsi=None, lda=None, seed: int = 0, stopwords=None):
        self.config = config
        self.matrix: TermDocMatrix | None = matrix
        self.lsi: LsiModel | None = lsi
        self.lda: lda_mod.LdaModel | None = lda
        self.seed = seed
        self.stopwords = stopwords

    def query_tokens(self, text: str) -> list[str]:
        return preprocess(text, self.config.prep, self.stopwords)

    def rank_tokens(self, tokens: Sequence[str], query_key: str = "") -> RankedList:
        cfg = self.config
        if cfg.model == "vsm":
            return vsm_rank(tokens, self.matrix, cfg.weighting, SimilarityKind(cfg.similarity))
        if cfg.model == "lsi":
            return lsi_rank(tokens, self.lsi, self.matrix)
        return lda_mod.lda_rank(tokens, self.lda, derive_seed(self.seed, query_key))

    def rank_artifact(self, artifact: QueryArtifact) -> RankedList:
        return self.rank_tokens(self.query_tokens(artifact_query_string(artifact)), artifact.id)


def build_classifier(
    config: ClassifierConfig,
    corpus: Corpus,
    options: BuildOptions = BuildOptions(),
    cache_dir: str | Path | None = None,
) -> Classifier:
    try:
        if not corpus.lessons:
            raise ValueError("corpus has no lessons")
        seed = derive_seed(options.master_seed, config.id)
        if cache_dir is not None:
            cached = _load_cached(config, corpus, options, Path(cache_dir), seed)
            if cached is not None:
                return cached
        clf = _build(config, corpus, options, seed)
        if cache_dir is not None:
            _save_cached(clf, corpus, options, Path(cache_dir))
        return clf
    except ClassifierBuildError:
        raise
    except (ValueError, OSError) as exc:
        raise ClassifierBuildError(config.id, exc) from exc


def _build(config: ClassifierConfig, corpus: Corpus, options: BuildOptions, seed: int) -> Classifier:
    sw = options.stopwords
    if config.model == "vsm":
        matrix = _matrix(corpus, config.prep, config.weighting, sw)
        return Classifier(config, matrix=matrix, seed=seed, stopwords=sw)
    if config.model == "lsi":
        matrix = _matrix(corpus, config.prep, config.weighting, sw)
        model = lsi_from_svd(_svd(corpus, config.prep, config.weighting, sw), config.topics, config.weighting)
        return Classifier(config, matrix=matrix, lsi=model, seed=seed, stopwords=sw)
    tokens = _doc_tokens(corpus, config.prep, sw)
    model = lda_mod.build_lda(
        tokens,
        config.topics,
        seed,
        doc_ids=corpus.lesson_ids,
        alpha=options.lda_alpha,
        beta=options.lda_beta,
        iterations=options.lda_train_sweeps,
        infer_sweeps=options.lda_infer_sweeps,
    )
    return Classifier(config, lda=model, seed=seed, stopwords=sw)


_memo: dict[tuple, Classifier] = {}
_memo_lock = threading.Lock()


def run_classifier(
    config: ClassifierConfig,
    corpus: Corpus,
    artifact: QueryArtifact,
    options: BuildOptions = BuildOptions(),
    cache_dir: str | Path | None = None,
) -> RankedList:
    key = (corpus.content_hash, config.id, options)
    with _memo_lock:
        clf = _memo.get(key)
    if clf is None:
        clf = build_classifier(config, corpus, options, cache_dir)
        with _memo_lock:
            if len(_memo) >= 128:
                _memo.clear()
            _memo[key] = clf
    return clf.rank_artifact(artifact)


# --- on-disk cache ----------------------------------------------------------
# <cache>/<corpus-hash>/<config-id>.model is an uncompressed .npz archive.
# Its "meta" entry is a JSON string: format, version, config_id, corpus_hash,
# options fingerprint. A mismatch on any of these means rebuild.

def cache_path(cache_dir: Path, corpus: Corpus, config: ClassifierConfig) -> Path:
    return cache_dir / corpus.content_hash / f"{config.id}.model"


def _meta(config: ClassifierConfig, corpus: Corpus, options: BuildOptions) -> dict:
    return {
        "format": CACHE_FORMAT,
        "version": CACHE_VERSION,
        "config_id": config.id,
        "corpus_hash": corpus.content_hash,
        "options": options.fingerprint(),
    }


def _save_cached(clf: Classifier, corpus: Corpus, options: BuildOptions, cache_dir: Path) -> None:
    arrays: dict[str, np.ndarray] = {
        "meta": np.array(json.dumps(_meta(clf.config, corpus, options), sort_keys=True)),
    }
    if clf.matrix is not None:
        m = clf.matrix
        arrays.update(
            terms=np.array(sorted(m.vocabulary, key=m.vocabulary.get)),
            doc_ids=np.array(m.doc_ids),
            weights=np.asarray(m.weights),
            doc_freq=m.doc_freq,
        )
    if clf.lsi is not None:
        arrays.update(
            lsi_u=clf.lsi.term_space,
            lsi_s=clf.lsi.singular_values,
            lsi_v=clf.lsi.doc_space,
            lsi_requested_k=np.array(clf.lsi.requested_k),
        )
    if clf.lda is not None:
        model = clf.lda
        arrays.update(
            terms=np.array(sorted(model.vocabulary, key=model.vocabulary.get)),
            doc_ids=np.array(model.doc_ids),
            phi=model.phi,
            doc_theta=model.doc_theta,
            lda_params=np.array([model.alpha, model.beta]),
            lda_ints=np.array([model.seed, model.iterations, model.infer_sweeps], dtype=np.int64),
        )
    path = cache_path(cache_dir, corpus, clf.config)
    path.parent.mkdir(parents=True, exist_ok=True)
    # write-then-rename so concurrent workers never see a partial file
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    with os.fdopen(fd, "wb") as fh:
        np.savez(fh, **arrays)
    os.replace(tmp, path)


def _load_cached(config, corpus, options, cache_dir: Path, seed: int) -> Classifier | None:
    path = cache_path(cache_dir, corpus, config)
    if not path.exists():
        return None
    try:
        with np.load(path, allow_pickle=False) as data:
            if json.loads(str(data["meta"])) != _meta(config, corpus, options):
                return None
            arrays = {name: data[name] for name in data.files}
    except (OSError, ValueError, KeyError):
        return None
    vocab = {str(t): i for i, t in enumerate(arrays["terms"])}
    doc_ids = tuple(str(d) for d in arrays["doc_ids"])
    sw = options.stopwords
    if config.model in ("vsm", "lsi"):
        matrix = TermDocMatrix(vocab, doc_ids, arrays["weights"], arrays["doc_freq"], config.weighting)
        lsi = None
        if config.model == "lsi":
            lsi = LsiModel(
                k=len(arrays["lsi_s"]),
                requested_k=int(arrays["lsi_requested_k"]),
                term_space=arrays["lsi_u"],
                singular_values=arrays["lsi_s"],
                doc_space=arrays["lsi_v"],
                scheme=config.weighting,
            )
        return Classifier(config, matrix=matrix, lsi=lsi, seed=seed, stopwords=sw)
    alpha, beta = arrays["lda_params"].tolist()
    model_seed, iterations, infer_sweeps = (int(x) for x in arrays["lda_ints"])
    model = lda_mod.LdaModel(
        k=config.topics,
        vocabulary=vocab,
        doc_ids=doc_ids,
        phi=arrays["phi"],
        doc_theta=arrays["doc_theta"],
        alpha=alpha,
        beta=beta,
        seed=model_seed,
        iterations=iterations,
        infer_sweeps=infer_sweeps,
    )
    return Classifier(config, lda=model, seed=seed, stopwords=sw)
