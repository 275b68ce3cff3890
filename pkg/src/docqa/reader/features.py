"""Hand-crafted lexical features for the span ranker.

The vector layout is versioned; changing the order, the window width, or
any feature definition requires bumping FEATURE_VERSION.
"""

from __future__ import annotations

import math

from ..corpus.types import Document, Token
from .spans import Span

FEATURE_VERSION = 1
N_FEATURES = 11
CONTEXT_WINDOW = 5  # tokens of context on each side for window overlaps

_TEMPORAL = frozenset(
    "january february march april may june july august september october november december "
    "monday tuesday wednesday thursday friday saturday sunday "
    "today yesterday tomorrow year month week day decade century".split()
)


def idf_table(stats) -> dict[str, float]:
    """idf lookup from TermStats, idf = ln(N / n_t)."""
    return {t: math.log(stats.n_docs / n) for t, n in stats.df.items()}


def _has_capitalized(tokens: list[Token]) -> bool:
    return any(t.surface[:1].isupper() for t in tokens)


def _has_digit(tokens: list[Token]) -> bool:
    return any(any(ch.isdigit() for ch in t.surface) for t in tokens)


def _has_temporal(tokens: list[Token]) -> bool:
    return _has_digit(tokens) or any(t.surface.lower() in _TEMPORAL for t in tokens)


def featurize(
    question_tokens: list[Token],
    doc: Document,
    span: Span,
    index_stats: dict[str, float],
    stopwords: frozenset[str] = frozenset(),
) -> list[float]:
    """Fixed-order feature vector for one candidate span.

    question_tokens is the full question token sequence; index_stats is an
    idf lookup (see idf_table).  Layout, version 1:

      0 span length (tokens)
      1 relative position of the span start in the document
      2 distinct-stem overlap between question and span
      3 distinct-stem overlap between question and the padded window
      4 stem-bigram overlap between question and the padded window
      5 summed idf of the span tokens
      6 who-question and span has a capitalized token
      7 when-question and span has a digit or temporal token
      8 where-question and span has a capitalized token
      9 how-many/how-much-question and span has a digit
     10 bias, always 1
    """
    n = len(doc.tokens)
    s, e = span.token_start, span.token_end
    span_tokens = doc.tokens[s : e + 1]
    lo = max(0, s - CONTEXT_WINDOW)
    hi = min(n - 1, e + CONTEXT_WINDOW)
    window_tokens = doc.tokens[lo : hi + 1]

    q_surfaces = [t.surface.lower() for t in question_tokens]
    q_stems = {t.stem for t in question_tokens if t.surface.lower() not in stopwords}
    span_stems = {t.stem for t in span_tokens}
    window_stems = {t.stem for t in window_tokens}

    q_seq = [t.stem for t in question_tokens]
    q_bigrams = {(a, b) for a, b in zip(q_seq, q_seq[1:])}
    w_seq = [t.stem for t in window_tokens]
    w_bigrams = {(a, b) for a, b in zip(w_seq, w_seq[1:])}

    is_who = "who" in q_surfaces
    is_when = "when" in q_surfaces
    is_where = "where" in q_surfaces
    is_howmany = any(
        a == "how" and b in ("many", "much") for a, b in zip(q_surfaces, q_surfaces[1:])
    )

    return [
        float(e - s + 1),
        s / n,
        float(len(q_stems & span_stems)),
        float(len(q_stems & window_stems)),
        float(len(q_bigrams & w_bigrams)),
        sum(index_stats.get(t.stem, 0.0) for t in span_tokens),
        float(is_who and _has_capitalized(span_tokens)),
        float(is_when and _has_temporal(span_tokens)),
        float(is_where and _has_capitalized(span_tokens)),
        float(is_howmany and _has_digit(span_tokens)),
        1.0,
    ]
