"""Tokenization and text preprocessing.

Tokens come from splitting on unicode whitespace and stripping leading and
trailing punctuation (unicode P* categories) off each chunk; chunks that are
all punctuation are dropped.  Offsets always index the original string, so a
token's surface equals text[char_start:char_end] verbatim.
"""

from __future__ import annotations

import re
import unicodedata
from importlib import resources

from .porter import stem as porter_stem
from .types import PreprocessConfig, Token

_CHUNK_RE = re.compile(r"\S+")


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def tokenize(text: str) -> list[tuple[str, int, int]]:
    """Split text into (surface, char_start, char_end) triples."""
    out = []
    for m in _CHUNK_RE.finditer(text):
        chunk = m.group()
        i, j = 0, len(chunk)
        while i < j and _is_punct(chunk[i]):
            i += 1
        while j > i and _is_punct(chunk[j - 1]):
            j -= 1
        if i < j:
            out.append((chunk[i:j], m.start() + i, m.start() + j))
    return out


def analyze(text: str, config: PreprocessConfig) -> tuple[list[Token], list[Token]]:
    """Tokenize once and return (all tokens, stopword-filtered tokens).

    The first list is the reader view (nothing dropped), the second the
    retrieval view.  Tokens are shared between the two lists.
    """
    all_tokens = []
    ir_tokens = []
    for surface, start, end in tokenize(text):
        base = surface.lower() if config.lowercase else surface
        s = porter_stem(base) if config.stemming_enabled else base
        tok = Token(surface=surface, stem=s, char_start=start, char_end=end)
        all_tokens.append(tok)
        if surface.lower() not in config.stopword_list:
            ir_tokens.append(tok)
    return all_tokens, ir_tokens


def preprocess(text: str, config: PreprocessConfig) -> list[Token]:
    """Tokenize, drop stopwords, and stem according to config."""
    return analyze(text, config)[1]


def english_stopwords() -> frozenset[str]:
    """The stopword list shipped with the package."""
    data = resources.files(__package__).joinpath("data/stopwords_en.txt").read_text("utf-8")
    return frozenset(data.split())
