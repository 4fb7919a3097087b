from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping


@dataclass(frozen=True)
class RankedItem:
    doc_id: str
    score: float
    rank: int


@dataclass(frozen=True)
class RankedList:
    """Retrieved documents with positive score, best first.

    Order is (score descending, doc_id ascending); ranks run 1..m.
    """

    items: tuple[RankedItem, ...] = ()

    @classmethod
    def from_scores(cls, scores: Mapping[str, float] | Iterable[tuple[str, float]]) -> "RankedList":
        pairs = scores.items() if isinstance(scores, Mapping) else scores
        kept = sorted(((d, float(s)) for d, s in pairs if s > 0), key=lambda p: (-p[1], p[0]))
        return cls(tuple(RankedItem(d, s, i) for i, (d, s) in enumerate(kept, 1)))

    @property
    def m(self) -> int:
        return len(self.items)

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self) -> Iterator[RankedItem]:
        return iter(self.items)

    @property
    def doc_ids(self) -> list[str]:
        return [it.doc_id for it in self.items]

    def scores(self) -> dict[str, float]:
        return {it.doc_id: it.score for it in self.items}

    def top(self, k: int) -> list[str]:
        return [it.doc_id for it in self.items[:k]]

    def check(self) -> None:
        """Raise AssertionError if the list breaks its ordering invariants."""
        for i, it in enumerate(self.items, 1):
            assert it.rank == i, f"rank gap at {i}"
            assert it.score > 0, f"non-positive score for {it.doc_id}"
        for a, b in zip(self.items, self.items[1:]):
            assert (-a.score, a.doc_id) < (-b.score, b.doc_id), f"misordered {a.doc_id}/{b.doc_id}"
