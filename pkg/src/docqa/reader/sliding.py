"""Sliding-window baseline: count question terms near each candidate span."""

from __future__ import annotations

from dataclasses import dataclass

from ..corpus.types import Document, Token
from .spans import Candidate, Span, extract_candidates


@dataclass(frozen=True)
class SlidingWindowConfig:
    max_span_len: int = 15
    window_pad: int = 5
    stopwords: frozenset[str] = frozenset()


def sliding_window_candidate(question_tokens: list[Token], doc: Document, config: SlidingWindowConfig) -> Candidate:
    """Best span by the number of distinct non-stopword question stems found
    in the padded window around it; the count is the candidate score.

    The window is [token_start - pad, token_end + pad] clamped to the
    document, and includes the span itself; pad 0 counts only in-span
    matches.  Ties prefer the shortest span, then the earliest.
    """
    if not doc.tokens:
        raise ValueError("document has no tokens")
    q_stems = {
        t.stem for t in question_tokens if t.surface.lower() not in config.stopwords
    }
    doc_stems = [t.stem for t in doc.tokens]
    n = len(doc_stems)
    best: tuple[int, int, int] | None = None
    best_span: Span | None = None
    for span in extract_candidates(doc, config.max_span_len):
        lo = max(0, span.token_start - config.window_pad)
        hi = min(n - 1, span.token_end + config.window_pad)
        score = sum(1 for s in q_stems if s in doc_stems[lo : hi + 1])
        key = (-score, span.token_end - span.token_start, span.token_start)
        if best is None or key < best:
            best = key
            best_span = span
    return Candidate(span=best_span, score=float(-best[0]))


def sliding_window_answer(question_tokens: list[Token], doc: Document, config: SlidingWindowConfig) -> Span:
    """Span of the best sliding-window candidate."""
    return sliding_window_candidate(question_tokens, doc, config).span
