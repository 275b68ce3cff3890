"""Metadata filtering applied upstream of retrieval scoring."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..corpus.io import parse_timestamp
from ..corpus.types import Corpus
from ..errors import FilterError


@dataclass(frozen=True)
class ValueClause:
    """Categorical membership: the document's value must be in the set."""

    values: frozenset[str]


@dataclass(frozen=True)
class RangeClause:
    """Inclusive numeric bounds; None leaves that side open.

    For timestamp fields the bounds are epoch seconds.
    """

    lower: float | None = None
    upper: float | None = None


@dataclass(frozen=True)
class MetadataFilter:
    clauses: dict[str, ValueClause | RangeClause] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return bool(self.clauses)


EMPTY_FILTER = MetadataFilter()


def _validate(corpus: Corpus, filter: MetadataFilter) -> None:
    for name, clause in filter.clauses.items():
        kind = corpus.schema.fields.get(name)
        if kind is None:
            raise FilterError(f"filter references unknown metadata field '{name}'")
        if isinstance(clause, ValueClause) and kind.kind != "categorical":
            raise FilterError(f"field '{name}' is {kind.kind}, not categorical")
        if isinstance(clause, RangeClause) and kind.kind == "categorical":
            raise FilterError(f"field '{name}' is categorical, bounds do not apply")


def _satisfies(doc, name: str, clause, kind) -> bool:
    if name not in doc.metadata:
        return False
    value = doc.metadata[name]
    if isinstance(clause, ValueClause):
        return value in clause.values
    if kind.kind == "timestamp":
        number = parse_timestamp(value)
        if number is None:
            return False
    else:
        number = float(value)
    if clause.lower is not None and number < clause.lower:
        return False
    if clause.upper is not None and number > clause.upper:
        return False
    return True


def apply_metadata_filter(corpus: Corpus, filter: MetadataFilter) -> set[str]:
    """Doc ids satisfying every clause (conjunction across fields).

    A document missing a filtered field fails that clause.
    """
    _validate(corpus, filter)
    if not filter.clauses:
        return {doc.id for doc in corpus}
    out = set()
    for doc in corpus:
        if all(
            _satisfies(doc, name, clause, corpus.schema.fields[name])
            for name, clause in filter.clauses.items()
        ):
            out.add(doc.id)
    return out
