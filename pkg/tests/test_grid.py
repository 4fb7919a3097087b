import math
from collections import Counter

import pytest

from llrecall.corpus import Corpus, LessonRecord, QueryArtifact
from llrecall.grid import (
    BuildOptions,
    ClassifierBuildError,
    ClassifierConfig,
    build_classifier,
    cache_path,
    derive_seed,
    enumerate_grid,
    run_classifier,
)
from llrecall.textprep import PreprocessConfig


def test_grid_size_and_family_counts():
    grid = enumerate_grid()
    assert len(grid) == 88
    assert Counter(c.model for c in grid) == {"vsm": 24, "lsi": 48, "lda": 16}


def test_grid_ids_unique_and_round_trip():
    grid = enumerate_grid()
    ids = [c.id for c in grid]
    assert len(set(ids)) == 88
    assert all(ClassifierConfig.parse(cid) == c for cid, c in zip(ids, grid))
    assert enumerate_grid() == grid


def test_id_grammar():
    cfg = ClassifierConfig("lsi", PreprocessConfig(True, True), "sublinear", "cosine", 128)
    assert cfg.id == "lsi:stemstop:sublinear:cosine:128"
    assert ClassifierConfig.parse("lda:stop:-:condprob:64").topics == 64
    assert ClassifierConfig.parse("vsm:none:boolean:overlap:-").similarity == "overlap"


@pytest.mark.parametrize(
    "bad",
    ["vsm:none:tfidf:cosine:32", "lsi:none:tfidf:overlap:64", "lda:none:tfidf:condprob:32",
     "lsi:none:tfidf:cosine:100", "bm25:none:tfidf:cosine:-", "vsm:none:tfidf", "vsm:raw:tfidf:cosine:-"],
)
def test_invalid_ids_rejected(bad):
    with pytest.raises(ValueError):
        ClassifierConfig.parse(bad)


def test_empty_artifact_gives_empty_list_for_every_config(toy_corpus, fast_options):
    empty = toy_corpus.artifact("a2")
    for cfg in enumerate_grid():
        assert len(run_classifier(cfg, toy_corpus, empty, fast_options)) == 0, cfg.id


def test_repeat_runs_identical(small_synthetic, fast_options):
    artifact = small_synthetic.artifacts[0]
    for cid in ("vsm:stem:tfidf:overlap:-", "lsi:stop:boolean:cosine:32", "lda:stemstop:-:condprob:32"):
        cfg = ClassifierConfig.parse(cid)
        first = build_classifier(cfg, small_synthetic, fast_options).rank_artifact(artifact)
        second = build_classifier(cfg, small_synthetic, fast_options).rank_artifact(artifact)
        assert first == second
        first.check()


def test_vsm_config_matches_hand_computation(toy_corpus):
    ranked = run_classifier(ClassifierConfig.parse("vsm:none:tfidf:cosine:-"), toy_corpus, toy_corpus.artifact("a1"))
    a, b = math.log(1.5), math.log(3)
    assert ranked.doc_ids == ["d2", "d1", "d3"]
    assert ranked.items[0].score == pytest.approx(2 / math.sqrt(10))
    assert ranked.items[1].score == pytest.approx(math.sqrt(2) * a / math.sqrt(2 * a * a + b * b))


def test_build_error_carries_config_id():
    corpus = Corpus([LessonRecord("L1", "P", context="the of and")], [QueryArtifact("A", "issue", "x")], {})
    cfg = ClassifierConfig.parse("vsm:stop:tfidf:cosine:-")
    with pytest.raises(ClassifierBuildError, match="vsm:stop:tfidf:cosine:-"):
        build_classifier(cfg, corpus)


def test_derived_seeds_are_stable_and_distinct():
    assert derive_seed(0, "lda:none:-:condprob:32") == derive_seed(0, "lda:none:-:condprob:32")
    assert derive_seed(0, "lda:none:-:condprob:32") != derive_seed(1, "lda:none:-:condprob:32")
    assert derive_seed(0, "lda:none:-:condprob:32") != derive_seed(0, "lda:none:-:condprob:64")


@pytest.mark.parametrize("cid", ["vsm:stem:sublinear:overlap:-", "lsi:none:tfidf:cosine:32", "lda:stop:-:condprob:32"])
def test_disk_cache_round_trip(tmp_path, small_synthetic, fast_options, cid):
    cfg = ClassifierConfig.parse(cid)
    fresh = build_classifier(cfg, small_synthetic, fast_options, cache_dir=tmp_path)
    path = cache_path(tmp_path, small_synthetic, cfg)
    assert path.is_file()
    cached = build_classifier(cfg, small_synthetic, fast_options, cache_dir=tmp_path)
    for artifact in small_synthetic.artifacts:
        assert cached.rank_artifact(artifact) == fresh.rank_artifact(artifact)


def test_stale_cache_ignored(tmp_path, small_synthetic, fast_options):
    cfg = ClassifierConfig.parse("lda:none:-:condprob:32")
    build_classifier(cfg, small_synthetic, fast_options, cache_dir=tmp_path)
    other = BuildOptions(master_seed=99, lda_train_sweeps=30, lda_infer_sweeps=10)
    rebuilt = build_classifier(cfg, small_synthetic, other, cache_dir=tmp_path)
    assert rebuilt.lda.seed == derive_seed(99, cfg.id)


def test_corrupt_cache_file_rebuilds(tmp_path, small_synthetic):
    cfg = ClassifierConfig.parse("vsm:none:tfidf:cosine:-")
    path = cache_path(tmp_path, small_synthetic, cfg)
    path.parent.mkdir(parents=True)
    path.write_bytes(b"garbage")
    clf = build_classifier(cfg, small_synthetic, cache_dir=tmp_path)
    assert clf.matrix is not None
