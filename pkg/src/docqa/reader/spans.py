"""Candidate answer spans over a document's token sequence."""

from __future__ import annotations

from dataclasses import dataclass

from ..corpus.types import Document


@dataclass(frozen=True)
class Span:
    """Inclusive token span; text is the verbatim raw-text slice covering it."""

    doc_id: str
    token_start: int
    token_end: int
    text: str


@dataclass(frozen=True)
class Candidate:
    span: Span
    score: float


def make_span(doc: Document, token_start: int, token_end: int) -> Span:
    text = doc.text[doc.tokens[token_start].char_start : doc.tokens[token_end].char_end]
    return Span(doc_id=doc.id, token_start=token_start, token_end=token_end, text=text)


def extract_candidates(doc: Document, max_span_len: int) -> list[Span]:
    """All contiguous token spans of length 1..max_span_len, shortest first,
    each length group in document order."""
    if max_span_len < 1:
        raise ValueError("max_span_len must be >= 1")
    n = len(doc.tokens)
    out = []
    for length in range(1, min(max_span_len, n) + 1):
        for start in range(n - length + 1):
            out.append(make_span(doc, start, start + length - 1))
    return out
