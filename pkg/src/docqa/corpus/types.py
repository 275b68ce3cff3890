"""Core data types for documents, datasets, and preprocessing config."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Token:
    """One token with its stem and character offsets into the raw text."""

    surface: str
    stem: str
    char_start: int
    char_end: int


@dataclass(frozen=True)
class PreprocessConfig:
    """Controls tokenization output.

    lowercase=False keeps surface case in stems and is only meant for
    diagnostics; the rest of the package assumes the default.
    """

    stopword_list: frozenset[str] = frozenset()
    stemming_enabled: bool = True
    lowercase: bool = True


@dataclass(frozen=True)
class FieldKind:
    """Inferred kind of one metadata field.

    kind is one of "categorical", "timestamp", "real"; values holds the
    observed value set for categorical fields and is None otherwise.
    """

    kind: str
    values: frozenset[str] | None = None


@dataclass(frozen=True)
class MetadataSchema:
    fields: dict[str, FieldKind] = field(default_factory=dict)


@dataclass
class Document:
    """A corpus document with both token views.

    tokens is the full sequence (readers need every token so answer spans
    map back to raw text); ir_tokens is the stopword-filtered subsequence
    used by the retrieval indexes.  Both carry stems.
    """

    id: str
    title: str
    text: str
    tokens: list[Token]
    ir_tokens: list[Token]
    metadata: dict[str, str | int | float]


@dataclass
class Corpus:
    documents: list[Document]
    schema: MetadataSchema
    config: PreprocessConfig

    def __post_init__(self) -> None:
        self._by_id = {d.id: d for d in self.documents}

    def __len__(self) -> int:
        return len(self.documents)

    def __iter__(self):
        return iter(self.documents)

    def __contains__(self, doc_id: str) -> bool:
        return doc_id in self._by_id

    def get(self, doc_id: str) -> Document | None:
        return self._by_id.get(doc_id)


@dataclass
class QAPair:
    """One question with its gold answers and supporting document.

    gold_span is a (token_start, token_end) pair into the supporting
    document's full token sequence, inclusive on both ends, or None when
    no aligned span is known (such pairs can be evaluated but not used
    to train span readers).
    """

    question: str
    gold_answers: list[str]
    doc_id: str
    gold_span: tuple[int, int] | None = None
    origin: str = "source"
    id: str = ""


@dataclass
class Dataset:
    pairs: list[QAPair]
    name: str
    fused: bool = False

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)
