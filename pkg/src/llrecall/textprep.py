"""Tokenization and the four stemming/stopping preprocessing variants."""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable

from .porter import porter_stem

_SPLIT = re.compile(r"[^0-9a-z]+")


@dataclass(frozen=True, order=True)
class PreprocessConfig:
    stemming: bool = False
    stopping: bool = False

    @property
    def name(self) -> str:
        if self.stemming and self.stopping:
            return "stemstop"
        if self.stemming:
            return "stem"
        if self.stopping:
            return "stop"
        return "none"

    @classmethod
    def from_name(cls, name: str) -> "PreprocessConfig":
        for cfg in all_preprocess_configs():
            if cfg.name == name:
                return cfg
        raise ValueError(f"unknown preprocessing variant {name!r}")


def all_preprocess_configs() -> tuple[PreprocessConfig, ...]:
    """The four variants in fixed order: none, stem, stop, stem+stop."""
    return (
        PreprocessConfig(False, False),
        PreprocessConfig(True, False),
        PreprocessConfig(False, True),
        PreprocessConfig(True, True),
    )


def load_stopwords(path: str | Path | None = None) -> frozenset[str]:
    """Read a one-word-per-line stopword file; the bundled list when ``path`` is None."""
    if path is None:
        return _default_stopwords()
    text = Path(path).read_text(encoding="utf-8")
    return _parse_stopwords(text)


@lru_cache(maxsize=1)
def _default_stopwords() -> frozenset[str]:
    text = resources.files("llrecall.resources").joinpath("stopwords.txt").read_text(encoding="utf-8")
    return _parse_stopwords(text)


def _parse_stopwords(text: str) -> frozenset[str]:
    return frozenset(w.strip().lower() for w in text.splitlines() if w.strip())


def tokenize(text: str) -> list[str]:
    """Lowercase, split on non-alphanumerics, drop 1-char and all-digit tokens."""
    return [t for t in _SPLIT.split(text.lower()) if len(t) >= 2 and not t.isdigit()]


def remove_stopwords(tokens: Iterable[str], stopwords: frozenset[str] | None = None) -> list[str]:
    if stopwords is None:
        stopwords = _default_stopwords()
    return [t for t in tokens if t not in stopwords]


def stem(tokens: Iterable[str]) -> list[str]:
    return [porter_stem(t) for t in tokens]


def preprocess(
    text: str,
    config: PreprocessConfig,
    stopwords: frozenset[str] | None = None,
) -> list[str]:
    """Tokenize, then stop (on surface forms), then stem."""
    tokens = tokenize(text)
    if config.stopping:
        tokens = remove_stopwords(tokens, stopwords)
    if config.stemming:
        tokens = stem(tokens)
    return tokens
