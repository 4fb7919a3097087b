"""Rank fusion: Borda count and score addition over min-max normalized lists."""

from __future__ import annotations

from enum import Enum
from typing import Sequence

from .ranking import RankedItem, RankedList


class FusionMethod(str, Enum):
    BORDA = "borda"
    SCORE_ADDITION = "scoreadd"

    @classmethod
    def parse(cls, value: str) -> "FusionMethod":
        aliases = {"score_addition": cls.SCORE_ADDITION, "scoreaddition": cls.SCORE_ADDITION}
        return aliases.get(value) or cls(value)


def _require_members(lists: Sequence[RankedList]) -> None:
    if len(lists) < 2:
        raise ValueError(f"fusion needs at least 2 member lists, got {len(lists)}")


def borda_fuse(lists: Sequence[RankedList]) -> RankedList:
    """Each member adds ``M_i - rank + 1`` for every document it retrieved."""
    _require_members(lists)
    totals: dict[str, float] = {}
    for ranked in lists:
        m = ranked.m
        for item in ranked:
            totals[item.doc_id] = totals.get(item.doc_id, 0) + (m - item.rank + 1)
    return RankedList.from_scores(totals)


def normalize_scores(ranked: RankedList) -> RankedList:
    """Min-max scale scores into [0, 1]; a constant list maps to all 1.0.

    Ranks and order are kept even though the minimum drops to 0.
    """
    if not ranked.items:
        return ranked
    scores = [it.score for it in ranked]
    lo, hi = min(scores), max(scores)
    if hi == lo:
        return RankedList(tuple(RankedItem(it.doc_id, 1.0, it.rank) for it in ranked))
    span = hi - lo
    return RankedList(tuple(RankedItem(it.doc_id, (it.score - lo) / span, it.rank) for it in ranked))


def score_addition_fuse(lists: Sequence[RankedList]) -> RankedList:
    _require_members(lists)
    totals: dict[str, float] = {}
    for ranked in lists:
        for item in normalize_scores(ranked):
            totals[item.doc_id] = totals.get(item.doc_id, 0.0) + item.score
    return RankedList.from_scores(totals)


def fuse(lists: Sequence[RankedList], method: FusionMethod | str) -> RankedList:
    method = FusionMethod.parse(method) if isinstance(method, str) else method
    if method is FusionMethod.BORDA:
        return borda_fuse(lists)
    return score_addition_fuse(lists)
