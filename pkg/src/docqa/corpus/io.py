"""Corpus and dataset file loading plus metadata schema inference."""

from __future__ import annotations

import json
from datetime import datetime, timezone
from pathlib import Path

from ..errors import CorpusError, DatasetError
from ..evaluation import normalize_answer
from .preprocess import analyze
from .types import Corpus, Dataset, Document, FieldKind, MetadataSchema, PreprocessConfig, QAPair


def parse_timestamp(value: str) -> float | None:
    """Epoch seconds for an ISO-8601 string, or None when not parseable.

    Naive datetimes and bare dates are taken as UTC.
    """
    s = value.strip()
    if s.endswith(("Z", "z")):
        s = s[:-1] + "+00:00"
    try:
        dt = datetime.fromisoformat(s)
    except ValueError:
        return None
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.timestamp()


def _infer_fields(documents: list[Document]) -> MetadataSchema:
    observed: dict[str, list] = {}
    for doc in documents:
        for name, value in doc.metadata.items():
            observed.setdefault(name, []).append(value)
    fields = {}
    for name, values in observed.items():
        numeric = [v for v in values if isinstance(v, (int, float)) and not isinstance(v, bool)]
        strings = [v for v in values if isinstance(v, str)]
        if len(numeric) + len(strings) != len(values):
            raise CorpusError(f"metadata field '{name}' has an unsupported value type")
        if numeric and strings:
            raise CorpusError(f"metadata field '{name}' mixes numbers and strings")
        if numeric:
            fields[name] = FieldKind(kind="real")
        elif all(parse_timestamp(v) is not None for v in strings):
            fields[name] = FieldKind(kind="timestamp")
        else:
            fields[name] = FieldKind(kind="categorical", values=frozenset(strings))
    return MetadataSchema(fields=fields)


def infer_schema(corpus: Corpus) -> MetadataSchema:
    """Infer field kinds from a corpus: numbers are real, ISO-8601 strings
    are timestamps, anything else is categorical over the observed values."""
    return _infer_fields(corpus.documents)


def load_corpus(path: str | Path, config: PreprocessConfig) -> Corpus:
    """Load a line-delimited JSON corpus file and tokenize every document."""
    documents: list[Document] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"{path}: line {lineno}: invalid JSON ({exc.msg})") from None
            if not isinstance(obj, dict):
                raise CorpusError(f"{path}: line {lineno}: expected a JSON object")
            for key in ("id", "title", "text"):
                if not isinstance(obj.get(key), str):
                    raise CorpusError(f"{path}: line {lineno}: missing or non-string '{key}'")
            metadata = obj.get("metadata", {})
            if not isinstance(metadata, dict):
                raise CorpusError(f"{path}: line {lineno}: 'metadata' must be an object")
            for name, value in metadata.items():
                if isinstance(value, bool) or not isinstance(value, (str, int, float)):
                    raise CorpusError(
                        f"{path}: line {lineno}: metadata field '{name}' must be a string or number"
                    )
            if obj["id"] in seen:
                raise CorpusError(f"{path}: line {lineno}: duplicate document id '{obj['id']}'")
            seen.add(obj["id"])
            tokens, ir_tokens = analyze(obj["text"], config)
            documents.append(
                Document(
                    id=obj["id"],
                    title=obj["title"],
                    text=obj["text"],
                    tokens=tokens,
                    ir_tokens=ir_tokens,
                    metadata=dict(metadata),
                )
            )
    return Corpus(documents=documents, schema=_infer_fields(documents), config=config)


def _span_from_char_offset(doc: Document, start_char: int, answers: list[str], label: str) -> tuple[int, int]:
    end_char = start_char + len(answers[0])
    tokens = doc.tokens
    first = next((i for i, t in enumerate(tokens) if t.char_end > start_char), None)
    last = None
    for i in range(len(tokens) - 1, -1, -1):
        if tokens[i].char_start < end_char:
            last = i
            break
    if first is None or last is None or first > last:
        raise DatasetError(f"{label}: answer_start {start_char} does not cover any token")
    covered = doc.text[tokens[first].char_start : tokens[last].char_end]
    norm = normalize_answer(covered)
    if all(normalize_answer(g) != norm for g in answers):
        raise DatasetError(
            f"{label}: span text {covered!r} does not normalize to any gold answer"
        )
    return (first, last)


def find_answer_span(doc: Document, answers: list[str]) -> tuple[int, int] | None:
    """First token span whose covered text normalizes to a gold answer.

    Scanned in (start, end) order; span length is capped a little above the
    gold token count since normalization only ever drops tokens.
    """
    golds = {normalize_answer(g) for g in answers if normalize_answer(g).tokens}
    if not golds:
        return None
    max_len = max(len(g.tokens) for g in golds) + 3
    tokens = doc.tokens
    for s in range(len(tokens)):
        for e in range(s, min(len(tokens), s + max_len)):
            covered = doc.text[tokens[s].char_start : tokens[e].char_end]
            if normalize_answer(covered) in golds:
                return (s, e)
    return None


def load_dataset(path: str | Path, corpus: Corpus, origin: str = "source") -> Dataset:
    """Load a question-answer dataset and resolve gold spans.

    Items carrying answer_start (a character offset locating answers[0] in
    the supporting document) get their span validated against the gold
    answers; otherwise the document is searched and pairs whose answers
    never occur get gold_span=None.
    """
    if origin not in ("source", "target"):
        raise DatasetError(f"origin must be 'source' or 'target', got {origin!r}")
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DatasetError(f"{path}: invalid JSON ({exc.msg})") from None
    if not isinstance(obj, dict) or not isinstance(obj.get("data"), list):
        raise DatasetError(f"{path}: expected an object with a 'data' list")
    name = path.stem
    pairs: list[QAPair] = []
    for i, item in enumerate(obj["data"]):
        label = f"{path}: pair {i}"
        if not isinstance(item, dict) or not isinstance(item.get("question"), str):
            raise DatasetError(f"{label}: missing or non-string 'question'")
        answers = item.get("answers")
        if not isinstance(answers, list) or not answers or not all(isinstance(a, str) for a in answers):
            raise DatasetError(f"{label}: 'answers' must be a non-empty list of strings")
        doc_id = item.get("doc_id")
        if not isinstance(doc_id, str):
            raise DatasetError(f"{label}: missing or non-string 'doc_id'")
        doc = corpus.get(doc_id)
        if doc is None:
            raise DatasetError(f"{label}: unknown doc_id '{doc_id}'")
        start = item.get("answer_start")
        if start is not None:
            if not isinstance(start, int) or isinstance(start, bool):
                raise DatasetError(f"{label}: 'answer_start' must be an integer")
            span = _span_from_char_offset(doc, start, answers, label)
        else:
            span = find_answer_span(doc, answers)
        pid = item.get("id")
        pair_origin = item.get("origin", origin)
        if pair_origin not in ("source", "target"):
            raise DatasetError(f"{label}: origin must be 'source' or 'target', got {pair_origin!r}")
        pairs.append(
            QAPair(
                question=item["question"],
                gold_answers=list(answers),
                doc_id=doc_id,
                gold_span=span,
                origin=pair_origin,
                id=pid if isinstance(pid, str) and pid else f"{name}-{i}",
            )
        )
    return Dataset(pairs=pairs, name=name, fused=bool(obj.get("fused", False)))
