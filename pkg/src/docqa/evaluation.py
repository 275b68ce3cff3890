"""Answer-level metrics, retrieval recall, and McNemar's exact test."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb


@dataclass(frozen=True)
class NormalizedAnswer:
    """Answer text reduced to comparable form: lowercase tokens with
    punctuation and symbol characters stripped and articles removed."""

    tokens: tuple[str, ...]

    @property
    def text(self) -> str:
        return " ".join(self.tokens)


_ARTICLES = frozenset(("a", "an", "the"))


def normalize_answer(text: str) -> NormalizedAnswer:
    """Normalize for comparison.

    Lowercases first, then drops every character that is neither
    alphanumeric nor whitespace (this removes symbols like "$" along with
    punctuation), splits on whitespace, and drops article tokens.
    Idempotent: normalizing the .text of a result is a fixed point.
    """
    lowered = text.lower()
    kept = "".join(ch for ch in lowered if ch.isalnum() or ch.isspace())
    tokens = tuple(t for t in kept.split() if t not in _ARTICLES)
    return NormalizedAnswer(tokens=tokens)


def exact_match(prediction: str, golds: list[str]) -> int:
    """1 iff the normalized prediction equals some normalized gold."""
    if not golds:
        raise ValueError("exact_match requires at least one gold answer")
    pred = normalize_answer(prediction)
    return int(any(normalize_answer(g) == pred for g in golds))


def f1_score(prediction: str, golds: list[str]) -> float:
    """Bag-of-tokens F1 against the best-matching gold.

    Overlap counts tokens with multiplicity.  Both sides normalizing to
    empty scores 1.0; one side empty scores 0.0.
    """
    if not golds:
        raise ValueError("f1_score requires at least one gold answer")
    pred_tokens = normalize_answer(prediction).tokens
    best = 0.0
    for gold in golds:
        gold_tokens = normalize_answer(gold).tokens
        if not pred_tokens and not gold_tokens:
            best = max(best, 1.0)
            continue
        if not pred_tokens or not gold_tokens:
            continue
        overlap = sum((Counter(pred_tokens) & Counter(gold_tokens)).values())
        if overlap == 0:
            continue
        precision = overlap / len(pred_tokens)
        recall = overlap / len(gold_tokens)
        best = max(best, 2 * precision * recall / (precision + recall))
    return best


def recall_at_k(ranked, relevant: set[str], k: int) -> int:
    """1 iff a relevant doc id appears in the first k entries of a ranking.

    ranked may be a RankedList or any iterable of doc ids.
    """
    if not relevant:
        raise ValueError("recall_at_k requires a non-empty relevant set")
    if k < 1:
        raise ValueError("k must be >= 1")
    ids = list(getattr(ranked, "doc_ids", ranked))
    return int(any(d in relevant for d in ids[:k]))


def mcnemar_exact(b: int, c: int) -> float:
    """Exact two-sided binomial McNemar p-value from discordant counts.

    b counts pairs where system A is correct and B wrong, c the reverse.
    p = min(1, 2 * sum_{i<=min(b,c)} C(b+c, i) / 2^(b+c)), computed in
    rational arithmetic.
    """
    if b < 0 or c < 0:
        raise ValueError("discordant counts must be non-negative")
    n = b + c
    if n == 0:
        raise ValueError("mcnemar_exact requires at least one discordant pair")
    tail = sum(comb(n, i) for i in range(min(b, c) + 1))
    p = 2 * Fraction(tail, 2**n)
    return float(min(p, Fraction(1)))


@dataclass
class EvalReport:
    em: float
    f1: float
    recall_at: dict[int, float] = field(default_factory=dict)
    n: int = 0
    per_pair: list[tuple[str, int, float]] = field(default_factory=list)


def _normalized_stream(doc) -> list[str]:
    out: list[str] = []
    for tok in doc.tokens:
        out.extend(normalize_answer(tok.surface).tokens)
    return out


def _contains_subsequence(stream: list[str], needle: tuple[str, ...]) -> bool:
    if not needle:
        return False
    n, m = len(stream), len(needle)
    for i in range(n - m + 1):
        if stream[i : i + m] == list(needle):
            return True
    return False


def relevant_docs(corpus, pair, streams: dict[str, list[str]] | None = None) -> set[str]:
    """Doc ids counted as relevant for a pair: the annotated supporting
    document plus every document containing some gold answer verbatim
    (normalized, contiguous)."""
    golds = [normalize_answer(g).tokens for g in pair.gold_answers]
    out = {pair.doc_id}
    for doc in corpus:
        stream = streams[doc.id] if streams is not None else _normalized_stream(doc)
        if any(_contains_subsequence(stream, g) for g in golds):
            out.add(doc.id)
    return out


def evaluate_system(system, dataset, ks: list[int] | None = None) -> EvalReport:
    """Run a full system over a dataset and aggregate EM, F1, and recall@k.

    system must provide retrieve(question, k) returning a ranking of doc
    ids, answer(question) returning an answer string, and a corpus
    attribute for relevance judgments.
    """
    ks = sorted(ks or [])
    corpus = system.corpus
    streams = {doc.id: _normalized_stream(doc) for doc in corpus}
    per_pair = []
    recall_sums = {k: 0 for k in ks}
    for i, pair in enumerate(dataset):
        pid = pair.id or str(i)
        prediction = system.answer(pair.question)
        em = exact_match(prediction, pair.gold_answers)
        f1 = f1_score(prediction, pair.gold_answers)
        per_pair.append((pid, em, f1))
        if ks:
            ranked = system.retrieve(pair.question, k=max(ks))
            rel = relevant_docs(corpus, pair, streams)
            for k in ks:
                recall_sums[k] += recall_at_k(ranked, rel, k)
    n = len(per_pair)
    return EvalReport(
        em=sum(e for _, e, _ in per_pair) / n if n else 0.0,
        f1=sum(f for _, _, f in per_pair) / n if n else 0.0,
        recall_at={k: recall_sums[k] / n for k in ks} if n else {},
        n=n,
        per_pair=per_pair,
    )


def evaluate_reader(predict, dataset, corpus) -> EvalReport:
    """Evaluate a reader on its annotated documents (no retrieval).

    predict(question, doc) must return an answer string; each pair is
    scored against its own supporting document.
    """
    per_pair = []
    for i, pair in enumerate(dataset):
        pid = pair.id or str(i)
        doc = corpus.get(pair.doc_id)
        if doc is None:
            raise ValueError(f"pair {pid}: unknown doc_id '{pair.doc_id}'")
        prediction = predict(pair.question, doc)
        per_pair.append(
            (pid, exact_match(prediction, pair.gold_answers), f1_score(prediction, pair.gold_answers))
        )
    n = len(per_pair)
    return EvalReport(
        em=sum(e for _, e, _ in per_pair) / n if n else 0.0,
        f1=sum(f for _, _, f in per_pair) / n if n else 0.0,
        recall_at={},
        n=n,
        per_pair=per_pair,
    )
