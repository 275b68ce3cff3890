"""Logistic-regression span ranker over the lexical features."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..corpus.preprocess import analyze
from ..corpus.types import Corpus, Dataset, Document, Token
from ..errors import ModelError
from .features import FEATURE_VERSION, N_FEATURES, featurize, idf_table
from .spans import Candidate, Span, extract_candidates

MODEL_FORMAT_VERSION = 1


@dataclass(frozen=True)
class LogRegConfig:
    lr: float = 0.5
    epochs: int = 200
    l2: float = 1e-4
    neg_per_pos: int = 50
    seed: int = 0
    max_span_len: int = 15


@dataclass
class LogRegModel:
    """Trained ranker; carries everything prediction needs (idf table,
    stopword set, span limit) so scoring matches training exactly."""

    weights: np.ndarray
    seed: int
    max_span_len: int
    stopwords: frozenset[str]
    idf: dict[str, float]
    feature_version: int = FEATURE_VERSION


def _question_tokens(question: str, corpus: Corpus) -> list[Token]:
    return analyze(question, corpus.config)[0]


def _gold_key(span: tuple[int, int]) -> tuple[int, int]:
    return (span[0], span[1])


def _training_set(
    dataset: Dataset,
    corpus: Corpus,
    config: LogRegConfig,
    stopwords: frozenset[str],
    idf: dict[str, float],
) -> tuple[np.ndarray, np.ndarray]:
    rng = random.Random(config.seed)
    rows: list[list[float]] = []
    labels: list[float] = []
    missing = [p.id for p in dataset if p.gold_span is None]
    if missing:
        raise ModelError(f"pairs without gold spans cannot train the ranker: {missing}")
    for pair in dataset:
        doc = corpus.get(pair.doc_id)
        if doc is None:
            raise ModelError(f"pair {pair.id}: unknown doc_id '{pair.doc_id}'")
        q_tokens = _question_tokens(pair.question, corpus)
        candidates = extract_candidates(doc, config.max_span_len)
        gold = _gold_key(pair.gold_span)
        negatives = [c for c in candidates if (c.token_start, c.token_end) != gold]
        if len(negatives) > config.neg_per_pos:
            negatives = rng.sample(negatives, config.neg_per_pos)
        gold_span = next(
            (c for c in candidates if (c.token_start, c.token_end) == gold), None
        )
        if gold_span is None:
            raise ModelError(
                f"pair {pair.id}: gold span {pair.gold_span} exceeds max_span_len {config.max_span_len}"
            )
        rows.append(featurize(q_tokens, doc, gold_span, idf, stopwords))
        labels.append(1.0)
        for c in negatives:
            rows.append(featurize(q_tokens, doc, c, idf, stopwords))
            labels.append(0.0)
    return np.asarray(rows, dtype=np.float64), np.asarray(labels, dtype=np.float64)


def _descend(x: np.ndarray, y: np.ndarray, w: np.ndarray, config: LogRegConfig) -> np.ndarray:
    if not len(x):
        return w
    penalty_mask = np.ones(N_FEATURES)
    penalty_mask[-1] = 0.0  # no penalty on the bias weight
    for _ in range(config.epochs):
        z = np.clip(x @ w, -500, 500)
        p = 1.0 / (1.0 + np.exp(-z))
        grad = x.T @ (p - y) / len(y) + config.l2 * penalty_mask * w
        w = w - config.lr * grad
    return w


def train_logreg(dataset: Dataset, corpus: Corpus, config: LogRegConfig) -> LogRegModel:
    """Binary logistic regression: gold spans positive, sampled non-gold
    candidates negative, full-batch gradient descent on cross-entropy with
    L2 on the non-bias weights.  Deterministic given config.seed."""
    from ..retrieval.indexes import term_stats

    idf = idf_table(term_stats(corpus))
    stopwords = corpus.config.stopword_list
    x, y = _training_set(dataset, corpus, config, stopwords, idf)
    w = _descend(x, y, np.zeros(N_FEATURES, dtype=np.float64), config)
    return LogRegModel(
        weights=w,
        seed=config.seed,
        max_span_len=config.max_span_len,
        stopwords=stopwords,
        idf=idf,
    )


def fine_tune_logreg(
    model: LogRegModel, dataset: Dataset, corpus: Corpus, config: LogRegConfig
) -> LogRegModel:
    """Continue gradient descent from an existing model's weights; the
    feature definition (idf table, stopwords, span cap) stays frozen so
    stage-two examples score exactly like stage-one ones."""
    if config.max_span_len != model.max_span_len:
        raise ModelError(
            f"fine-tune max_span_len {config.max_span_len} does not match the model's {model.max_span_len}"
        )
    x, y = _training_set(dataset, corpus, config, model.stopwords, model.idf)
    w = _descend(x, y, model.weights.copy(), config)
    return LogRegModel(
        weights=w,
        seed=config.seed,
        max_span_len=model.max_span_len,
        stopwords=model.stopwords,
        idf=model.idf,
    )


def logreg_answer(model: LogRegModel, question_tokens: list[Token], doc: Document) -> Candidate:
    """Highest-scoring candidate span; ties prefer shorter, then earlier."""
    if model.feature_version != FEATURE_VERSION:
        raise ModelError(
            f"model feature version {model.feature_version} does not match {FEATURE_VERSION}"
        )
    best: tuple[float, int, int] | None = None
    best_span: Span | None = None
    best_score = 0.0
    for span in extract_candidates(doc, model.max_span_len):
        f = featurize(question_tokens, doc, span, model.idf, model.stopwords)
        z = float(np.clip(np.dot(model.weights, f), -500.0, 500.0))
        score = 1.0 / (1.0 + float(np.exp(-z)))
        key = (-score, span.token_end - span.token_start, span.token_start)
        if best is None or key < best:
            best = key
            best_span = span
            best_score = score
    return Candidate(span=best_span, score=best_score)


def save_logreg(model: LogRegModel, path: str | Path) -> None:
    doc = {
        "format_version": MODEL_FORMAT_VERSION,
        "kind": "logreg",
        "feature_version": model.feature_version,
        "weights": list(model.weights),
        "seed": model.seed,
        "max_span_len": model.max_span_len,
        "stopwords": sorted(model.stopwords),
        "idf": model.idf,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)


def load_logreg(path: str | Path) -> LogRegModel:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("format_version") != MODEL_FORMAT_VERSION or doc.get("kind") != "logreg":
        raise ModelError(f"{path}: not a supported ranker snapshot")
    weights = np.asarray(doc["weights"], dtype=np.float64)
    if doc["feature_version"] != FEATURE_VERSION or weights.shape != (N_FEATURES,):
        raise ModelError(f"{path}: feature layout does not match this build")
    return LogRegModel(
        weights=weights,
        seed=doc["seed"],
        max_span_len=doc["max_span_len"],
        stopwords=frozenset(doc["stopwords"]),
        idf=doc["idf"],
    )
