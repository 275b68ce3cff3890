"""Top-k ranking over a metadata-filtered candidate set."""

from __future__ import annotations

from dataclasses import dataclass

from ..corpus.preprocess import preprocess
from .filters import MetadataFilter, apply_metadata_filter
from .indexes import score


@dataclass
class RankedList:
    """Entries sorted by descending score, ties broken by ascending doc id."""

    entries: list[tuple[str, float]]
    k: int

    @property
    def doc_ids(self) -> list[str]:
        return [doc_id for doc_id, _ in self.entries]

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


def rank(scores: dict[str, float], k: int) -> RankedList:
    ordered = sorted(scores.items(), key=lambda e: (-e[1], e[0]))
    return RankedList(entries=ordered[:k], k=k)


def retrieve_top_k(index, query: str, filter: MetadataFilter, k: int) -> RankedList:
    """Filter, score, and rank: every candidate document is ranked, even at
    score zero, so a filter that pins down one document always surfaces it."""
    if k < 1:
        raise ValueError("k must be >= 1")
    candidates = apply_metadata_filter(index.corpus, filter)
    query_stems = [t.stem for t in preprocess(query, index.config)]
    return rank(score(index, query_stems, candidates), k)
