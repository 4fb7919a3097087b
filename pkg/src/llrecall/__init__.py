"""Lessons-learned retrieval with individual and hybrid IR classifiers."""

__version__ = "0.1.0"
