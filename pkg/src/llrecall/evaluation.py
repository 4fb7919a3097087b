"""Top-K and relative-improvement metrics, hybrid selection and the experiment pipeline."""

from __future__ import annotations

import itertools
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .corpus import Corpus
from .fusion import borda_fuse, score_addition_fuse
from .grid import (
    MODELS,
    BuildOptions,
    ClassifierConfig,
    build_classifier,
    enumerate_grid,
    grid_order,
)
from .ranking import RankedList
from .textprep import all_preprocess_configs

log = logging.getLogger(__name__)

DEFAULT_K = 20


@dataclass(frozen=True)
class EvalConfig:
    k: int = DEFAULT_K
    master_seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"top-K cutoff must be >= 1, got {self.k}")


@dataclass(frozen=True)
class CombinationSpec:
    comb_id: int
    members: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.members)) != len(self.members):
            raise ValueError(f"combination {self.comb_id} has duplicate members")
        if len(self.members) not in (2, 4, 12):
            raise ValueError(f"combination {self.comb_id} has {len(self.members)} members")


@dataclass(frozen=True)
class CombinationResult:
    comb_id: int
    members: tuple[str, ...]
    top_individual: float
    score_addition: float
    ri_score_addition: float  # percent, unrounded
    borda: float
    ri_borda: float


@dataclass
class ExperimentReport:
    k: int
    n_queries: int
    individuals: list[tuple[str, float]]  # canonical grid order
    toppers: list[str]
    rows: list[CombinationResult] = field(default_factory=list)

    def individual(self, config_id: str) -> float:
        return dict(self.individuals)[config_id]


def top_k_accuracy(
    results: Mapping[str, RankedList],
    judgments: Mapping[str, Iterable[str]],
    k: int = DEFAULT_K,
) -> float:
    """Fraction of queries with at least one relevant lesson among the first ``k`` items."""
    if k < 1:
        raise ValueError(f"top-K cutoff must be >= 1, got {k}")
    if not results:
        raise ValueError("top-K accuracy is undefined over zero queries")
    hits = 0
    for artifact_id, ranked in results.items():
        if artifact_id not in judgments:
            raise KeyError(f"no relevance judgments for artifact {artifact_id!r}")
        relevant = judgments[artifact_id]
        if any(doc in relevant for doc in ranked.top(k)):
            hits += 1
    return hits / len(results)


def relative_improvement(p_hybrid: float, p_best_individual: float) -> float:
    """Relative improvement of a hybrid over its best member, in percent."""
    if p_best_individual == 0:
        raise ZeroDivisionError("relative improvement undefined when the best member scores 0")
    return (p_hybrid - p_best_individual) / p_best_individual * 100.0


def round_percent(value: float) -> int:
    """Nearest integer, halves away from zero."""
    return int(math.copysign(math.floor(abs(value) + 0.5), value))


def select_subspace_toppers(individual: Mapping[str, float]) -> list[str]:
    """Best config per (model, preprocessing) subspace; ties go to canonical order.

    Returns 12 ids: four per model, in preprocessing order none, stem, stop, stem+stop.
    """
    order = grid_order()
    missing = set(order) - set(individual)
    if missing:
        raise ValueError(f"missing results for {len(missing)} configs, e.g. {sorted(missing)[0]}")
    toppers = []
    for model in MODELS:
        for prep in all_preprocess_configs():
            candidates = [
                cid for cid in order
                if cid.startswith(f"{model}:{prep.name}:")
            ]
            best = min(candidates, key=lambda cid: (-individual[cid], order[cid]))
            toppers.append(best)
    return toppers


def build_combinations(toppers: Sequence[str]) -> list[CombinationSpec]:
    """Pairs and the quad within each model, then all twelve together."""
    order = grid_order()
    if len(toppers) != 12 or len(set(toppers)) != 12:
        raise ValueError("expected 12 distinct topper config ids")
    unknown = [t for t in toppers if t not in order]
    if unknown:
        raise ValueError(f"unknown config id {unknown[0]!r}")
    canonical = sorted(toppers, key=order.__getitem__)
    by_model = {m: [t for t in canonical if t.startswith(m + ":")] for m in MODELS}
    if any(len(v) != 4 for v in by_model.values()):
        raise ValueError("expected exactly 4 toppers per model")
    groups: list[tuple[str, ...]] = []
    for model in MODELS:
        groups.extend(itertools.combinations(by_model[model], 2))
        groups.append(tuple(by_model[model]))
    groups.append(tuple(canonical))
    return [CombinationSpec(i, members) for i, members in enumerate(groups, 1)]


def evaluate_config(
    config_id: str,
    corpus: Corpus,
    options: BuildOptions,
    cache_dir: str | Path | None = None,
) -> dict[str, RankedList]:
    """Rank every artifact of ``corpus`` with one grid point."""
    clf = build_classifier(ClassifierConfig.parse(config_id), corpus, options, cache_dir)
    return {a.id: clf.rank_artifact(a) for a in corpus.artifacts}


def run_grid(
    corpus: Corpus,
    options: BuildOptions,
    jobs: int = 1,
    cache_dir: str | Path | None = None,
    config_ids: Sequence[str] | None = None,
) -> dict[str, dict[str, RankedList]]:
    ids = [c.id for c in enumerate_grid()] if config_ids is None else list(config_ids)
    if jobs <= 1:
        return {cid: evaluate_config(cid, corpus, options, cache_dir) for cid in ids}
    # heaviest (LDA) first; results are keyed, so completion order is irrelevant
    submit_order = sorted(ids, key=lambda cid: (not cid.startswith("lda"), cid))
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = {cid: pool.submit(evaluate_config, cid, corpus, options, cache_dir) for cid in submit_order}
        return {cid: futures[cid].result() for cid in ids}


def individual_results(
    runs: Mapping[str, Mapping[str, RankedList]],
    corpus: Corpus,
    k: int,
) -> list[tuple[str, float]]:
    order = grid_order()
    return [
        (cid, top_k_accuracy(runs[cid], corpus.judgments, k))
        for cid in sorted(runs, key=lambda c: order.get(c, len(order)))
    ]


def evaluate_combination(
    spec: CombinationSpec,
    runs: Mapping[str, Mapping[str, RankedList]],
    individual: Mapping[str, float],
    corpus: Corpus,
    k: int,
) -> CombinationResult:
    artifact_ids = [a.id for a in corpus.artifacts]
    borda_runs = {}
    scoreadd_runs = {}
    for aid in artifact_ids:
        lists = [runs[m][aid] for m in spec.members]
        borda_runs[aid] = borda_fuse(lists)
        scoreadd_runs[aid] = score_addition_fuse(lists)
    best = max(individual[m] for m in spec.members)
    p_sa = top_k_accuracy(scoreadd_runs, corpus.judgments, k)
    p_borda = top_k_accuracy(borda_runs, corpus.judgments, k)
    return CombinationResult(
        comb_id=spec.comb_id,
        members=spec.members,
        top_individual=best,
        score_addition=p_sa,
        ri_score_addition=relative_improvement(p_sa, best) if best > 0 else 0.0,
        borda=p_borda,
        ri_borda=relative_improvement(p_borda, best) if best > 0 else 0.0,
    )


def run_experiment(
    corpus: Corpus,
    eval_config: EvalConfig = EvalConfig(),
    options: BuildOptions | None = None,
    jobs: int = 1,
    cache_dir: str | Path | None = None,
) -> ExperimentReport:
    if not corpus.artifacts:
        raise ValueError("experiment needs at least one query artifact")
    options = replace(options or BuildOptions(), master_seed=eval_config.master_seed)
    runs = run_grid(corpus, options, jobs=jobs, cache_dir=cache_dir)
    individuals = individual_results(runs, corpus, eval_config.k)
    individual = dict(individuals)
    toppers = select_subspace_toppers(individual)
    report = ExperimentReport(eval_config.k, len(corpus.artifacts), individuals, toppers)
    for spec in build_combinations(toppers):
        try:
            report.rows.append(evaluate_combination(spec, runs, individual, corpus, eval_config.k))
        except (ValueError, KeyError) as exc:
            raise RuntimeError(f"combination {spec.comb_id}: {exc}") from exc
    log.info("experiment done: %d configs, %d combinations", len(individuals), len(report.rows))
    return report

