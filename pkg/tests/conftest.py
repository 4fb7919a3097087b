from __future__ import annotations

import pytest

from llrecall.corpus import Corpus, LessonRecord, QueryArtifact
from llrecall.grid import BuildOptions
from llrecall.synthetic import generate_synthetic_corpus


@pytest.fixture
def toy_corpus() -> Corpus:
    lessons = [
        LessonRecord("d1", "P1", context="risk server outage"),
        LessonRecord("d2", "P1", problem="server server budget"),
        LessonRecord("d3", "P2", recommended_actions="budget overrun risk risk"),
    ]
    artifacts = [
        QueryArtifact("a1", "issue", title="server", description="risk"),
        QueryArtifact("a2", "risk", title="", description=""),
    ]
    return Corpus(lessons, artifacts, {"a1": {"d1", "d2"}})


@pytest.fixture(scope="session")
def small_synthetic() -> Corpus:
    return generate_synthetic_corpus(seed=3, n_lessons=40, n_artifacts=10, n_themes=5)


@pytest.fixture
def fast_options() -> BuildOptions:
    return BuildOptions(master_seed=1, lda_train_sweeps=30, lda_infer_sweeps=10)
