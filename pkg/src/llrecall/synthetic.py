"""Planted-relevance synthetic corpora.

Each theme owns a disjoint pool of root words; all themes share a pool of
noise roots and the bundled stopwords. Every lesson and artifact is drawn
from one theme, and an artifact's relevant lessons are exactly those of its
theme. Words carry random inflections so that stemming has work to do.
"""

from __future__ import annotations

import numpy as np

from .corpus import ARTIFACT_KINDS, Corpus, LessonRecord, QueryArtifact
from .textprep import load_stopwords

DEFAULT_LESSONS = 212
DEFAULT_ARTIFACTS = 55
DEFAULT_THEMES = 36
DEFAULT_PROJECTS = 30

THEME_ROOTS = 14
NOISE_ROOTS = 400
SUFFIXES = ("", "", "s", "ing", "ed", "er", "ers")

# share of words drawn from the theme pool, and from the stopword list
LESSON_THEME_RATE = 0.25
QUERY_THEME_RATE = 0.10
STOPWORD_RATE = 0.25

_ONSETS = ("b", "c", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "br", "gr", "pl", "st", "tr")
_NUCLEI = ("a", "e", "i", "o", "u")


def _make_roots(rng: np.random.Generator, n: int, taken: set[str]) -> list[str]:
    roots = []
    while len(roots) < n:
        syllables = int(rng.integers(2, 4))
        word = "".join(_ONSETS[rng.integers(len(_ONSETS))] + _NUCLEI[rng.integers(len(_NUCLEI))] for _ in range(syllables))
        word += _ONSETS[rng.integers(10)]
        if word not in taken:
            taken.add(word)
            roots.append(word)
    return roots


class _TextSource:
    def __init__(self, rng, themes, noise, stopwords, p_theme, p_stop):
        self.rng = rng
        self.themes = themes
        self.noise = noise
        self.stopwords = stopwords
        self.p_theme = p_theme
        self.p_stop = p_stop

    def words(self, theme: int, n: int) -> str:
        out = []
        for _ in range(n):
            u = self.rng.random()
            if u < self.p_stop:
                out.append(self.stopwords[self.rng.integers(len(self.stopwords))])
                continue
            pool = self.themes[theme] if u < self.p_stop + self.p_theme else self.noise
            root = pool[self.rng.integers(len(pool))]
            out.append(root + SUFFIXES[self.rng.integers(len(SUFFIXES))])
        return " ".join(out)


def generate_synthetic_corpus(
    seed: int = 0,
    n_lessons: int = DEFAULT_LESSONS,
    n_artifacts: int = DEFAULT_ARTIFACTS,
    n_themes: int = DEFAULT_THEMES,
    n_projects: int = DEFAULT_PROJECTS,
) -> Corpus:
    if n_lessons < 1 or n_artifacts < 1 or n_themes < 1 or n_projects < 1:
        raise ValueError("lesson, artifact, theme and project counts must all be >= 1")
    if n_themes > n_lessons:
        raise ValueError(f"n_themes ({n_themes}) cannot exceed n_lessons ({n_lessons})")

    rng = np.random.default_rng(seed)
    stopwords = sorted(load_stopwords())
    taken = set(stopwords)
    themes = [_make_roots(rng, THEME_ROOTS, taken) for _ in range(n_themes)]
    noise = _make_roots(rng, NOISE_ROOTS, taken)

    lesson_src = _TextSource(rng, themes, noise, stopwords, LESSON_THEME_RATE, STOPWORD_RATE)
    query_src = _TextSource(rng, themes, noise, stopwords, QUERY_THEME_RATE, STOPWORD_RATE)

    # every theme gets at least one lesson
    lesson_themes = np.arange(n_lessons) % n_themes
    rng.shuffle(lesson_themes)
    width = len(str(n_lessons))
    lessons = []
    for i, theme in enumerate(lesson_themes.tolist()):
        lessons.append(
            LessonRecord(
                id=f"L{i + 1:0{width}d}",
                project_id=f"P{int(rng.integers(n_projects)) + 1:02d}",
                context=lesson_src.words(theme, int(rng.integers(8, 16))),
                problem=lesson_src.words(theme, int(rng.integers(8, 16))),
                recommended_actions=lesson_src.words(theme, int(rng.integers(6, 14))),
            )
        )

    by_theme: dict[int, list[str]] = {}
    for lesson, theme in zip(lessons, lesson_themes.tolist()):
        by_theme.setdefault(theme, []).append(lesson.id)

    width = len(str(n_artifacts))
    artifacts = []
    judgments = {}
    for i in range(n_artifacts):
        theme = int(rng.integers(n_themes))
        artifact = QueryArtifact(
            id=f"A{i + 1:0{width}d}",
            kind=ARTIFACT_KINDS[int(rng.integers(2))],
            title=query_src.words(theme, int(rng.integers(3, 6))),
            description=query_src.words(theme, int(rng.integers(10, 20))),
        )
        artifacts.append(artifact)
        judgments[artifact.id] = frozenset(by_theme[theme])
    return Corpus(tuple(lessons), tuple(artifacts), judgments)
