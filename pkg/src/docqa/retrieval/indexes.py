"""The three retrieval indexes: tf-idf cosine, BM25, hashed bigram tf-idf.

All three score the stemmed, stopword-filtered token view; queries must be
preprocessed with the exact config the corpus was loaded with, which every
index carries (and serializes) for that reason.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from ..corpus.types import Corpus, PreprocessConfig
from ..errors import ModelError
from .hashing import HASH_SPEC, N_BUCKETS, hashed_counts

INDEX_FORMAT_VERSION = 1

BM25_K1 = 1.5
BM25_B = 0.75


@dataclass
class TfIdfVector:
    weights: dict[str, float]
    norm: float


@dataclass
class TermStats:
    n_docs: int
    df: dict[str, int]
    tf_by_doc: dict[str, dict[str, int]]
    doc_len: dict[str, int]
    avg_doc_len: float

    def tf(self, term: str, doc_id: str) -> int:
        return self.tf_by_doc.get(doc_id, {}).get(term, 0)


@dataclass
class VectorSpaceIndex:
    kind = "vector_space"
    corpus: Corpus
    config: PreprocessConfig
    idf: dict[str, float]
    doc_vectors: dict[str, TfIdfVector]


@dataclass
class Bm25Index:
    kind = "bm25"
    corpus: Corpus
    config: PreprocessConfig
    stats: TermStats
    k1: float = BM25_K1
    b: float = BM25_B


@dataclass
class BigramHashIndex:
    kind = "bigram_hashed"
    corpus: Corpus
    config: PreprocessConfig
    bucket_idf: dict[int, float]
    doc_vectors: dict[str, dict[int, float]]
    dims: int = N_BUCKETS
    hash_spec: str = HASH_SPEC


INDEX_KINDS = ("vector_space", "bm25", "bigram_hashed")


def _doc_stems(doc) -> list[str]:
    return [t.stem for t in doc.ir_tokens]


def term_stats(corpus: Corpus) -> TermStats:
    df: dict[str, int] = {}
    tf_by_doc: dict[str, dict[str, int]] = {}
    doc_len: dict[str, int] = {}
    for doc in corpus:
        counts = dict(Counter(_doc_stems(doc)))
        tf_by_doc[doc.id] = counts
        doc_len[doc.id] = len(doc.ir_tokens)
        for term in counts:
            df[term] = df.get(term, 0) + 1
    n = len(corpus)
    avg = sum(doc_len.values()) / n if n else 0.0
    return TermStats(n_docs=n, df=df, tf_by_doc=tf_by_doc, doc_len=doc_len, avg_doc_len=avg)


def build_index(corpus: Corpus, kind: str):
    """Build an immutable index of the requested kind over a corpus."""
    if len(corpus) == 0:
        raise ValueError("cannot build an index over an empty corpus")
    if kind == "vector_space":
        stats = term_stats(corpus)
        idf = {t: math.log(stats.n_docs / n) for t, n in stats.df.items()}
        vectors = {}
        for doc_id, counts in stats.tf_by_doc.items():
            weights = {t: c * idf[t] for t, c in counts.items()}
            norm = math.sqrt(sum(w * w for w in weights.values()))
            vectors[doc_id] = TfIdfVector(weights=weights, norm=norm)
        return VectorSpaceIndex(corpus=corpus, config=corpus.config, idf=idf, doc_vectors=vectors)
    if kind == "bm25":
        return Bm25Index(corpus=corpus, config=corpus.config, stats=term_stats(corpus))
    if kind == "bigram_hashed":
        n = len(corpus)
        bucket_counts: dict[str, dict[int, int]] = {}
        bucket_df: dict[int, int] = {}
        for doc in corpus:
            counts = hashed_counts(_doc_stems(doc))
            bucket_counts[doc.id] = counts
            for b in counts:
                bucket_df[b] = bucket_df.get(b, 0) + 1
        idf = {b: math.log(n / df) for b, df in bucket_df.items()}
        vectors = {
            doc_id: {b: c * idf[b] for b, c in counts.items()}
            for doc_id, counts in bucket_counts.items()
        }
        return BigramHashIndex(corpus=corpus, config=corpus.config, bucket_idf=idf, doc_vectors=vectors)
    raise ValueError(f"unknown index kind {kind!r}; expected one of {INDEX_KINDS}")


def score_cosine(index: VectorSpaceIndex, query_tokens: list[str], candidates: set[str] | None = None) -> dict[str, float]:
    """Cosine similarity between the query tf-idf vector and each document.

    query_tokens are stems from the IR preprocessing; terms outside the
    corpus vocabulary contribute nothing.  Zero-norm vectors score 0.
    """
    qtf = Counter(query_tokens)
    q_weights = {t: c * index.idf[t] for t, c in qtf.items() if t in index.idf}
    q_norm = math.sqrt(sum(w * w for w in q_weights.values()))
    out = {}
    for doc_id, vec in index.doc_vectors.items():
        if candidates is not None and doc_id not in candidates:
            continue
        if q_norm == 0.0 or vec.norm == 0.0:
            out[doc_id] = 0.0
            continue
        dot = sum(w * vec.weights.get(t, 0.0) for t, w in q_weights.items())
        out[doc_id] = dot / (vec.norm * q_norm)
    return out


def score_bm25(index: Bm25Index, query_tokens: list[str], candidates: set[str] | None = None) -> dict[str, float]:
    """Okapi BM25 with IDF(t) = ln((N - n_t + 0.5)/(n_t + 0.5) + 1).

    Query tokens are summed with multiplicity (a stem repeated in the
    question counts twice).
    """
    stats = index.stats
    n = stats.n_docs
    idf = {}
    for t in query_tokens:
        if t not in idf and t in stats.df:
            n_t = stats.df[t]
            idf[t] = math.log((n - n_t + 0.5) / (n_t + 0.5) + 1.0)
    out = {}
    for doc_id, counts in stats.tf_by_doc.items():
        if candidates is not None and doc_id not in candidates:
            continue
        dl = stats.doc_len[doc_id]
        ratio = dl / stats.avg_doc_len if stats.avg_doc_len > 0 else 0.0
        score = 0.0
        for t in query_tokens:
            tf = counts.get(t, 0)
            if tf == 0 or t not in idf:
                continue
            score += idf[t] * tf * (index.k1 + 1.0) / (tf + index.k1 * (1.0 - index.b + index.b * ratio))
        out[doc_id] = score
    return out


def score_bigram(index: BigramHashIndex, query_tokens: list[str], candidates: set[str] | None = None) -> dict[str, float]:
    """Unnormalized dot product between hashed tf-idf vectors."""
    q_weights = {
        b: c * index.bucket_idf[b]
        for b, c in hashed_counts(list(query_tokens)).items()
        if b in index.bucket_idf
    }
    out = {}
    for doc_id, vec in index.doc_vectors.items():
        if candidates is not None and doc_id not in candidates:
            continue
        out[doc_id] = sum(w * vec.get(b, 0.0) for b, w in q_weights.items())
    return out


def score(index, query_tokens: list[str], candidates: set[str] | None = None) -> dict[str, float]:
    """Dispatch to the scoring function matching the index kind."""
    if isinstance(index, VectorSpaceIndex):
        return score_cosine(index, query_tokens, candidates)
    if isinstance(index, Bm25Index):
        return score_bm25(index, query_tokens, candidates)
    if isinstance(index, BigramHashIndex):
        return score_bigram(index, query_tokens, candidates)
    raise ValueError(f"unknown index type {type(index).__name__}")


def _config_dict(config: PreprocessConfig) -> dict:
    return {
        "stopword_list": sorted(config.stopword_list),
        "stemming_enabled": config.stemming_enabled,
        "lowercase": config.lowercase,
    }


def save_index(index, path: str | Path) -> None:
    """Write a JSON snapshot that round-trips exactly via load_index."""
    doc = {
        "format_version": INDEX_FORMAT_VERSION,
        "kind": index.kind,
        "config": _config_dict(index.config),
        "doc_ids": [d.id for d in index.corpus],
    }
    if isinstance(index, VectorSpaceIndex):
        doc["idf"] = index.idf
        doc["doc_vectors"] = {
            i: {"weights": v.weights, "norm": v.norm} for i, v in index.doc_vectors.items()
        }
    elif isinstance(index, Bm25Index):
        doc["k1"] = index.k1
        doc["b"] = index.b
        doc["stats"] = {
            "n_docs": index.stats.n_docs,
            "df": index.stats.df,
            "tf_by_doc": index.stats.tf_by_doc,
            "doc_len": index.stats.doc_len,
            "avg_doc_len": index.stats.avg_doc_len,
        }
    elif isinstance(index, BigramHashIndex):
        doc["hash_spec"] = index.hash_spec
        doc["dims"] = index.dims
        doc["bucket_idf"] = {str(b): w for b, w in index.bucket_idf.items()}
        doc["doc_vectors"] = {
            i: {str(b): w for b, w in vec.items()} for i, vec in index.doc_vectors.items()
        }
    else:
        raise ValueError(f"unknown index type {type(index).__name__}")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)


def load_index(path: str | Path, corpus: Corpus):
    """Load a snapshot and re-bind it to the corpus it was built from.

    The stored preprocessing config and document ids must match the given
    corpus exactly; a different corpus or config is a ModelError.
    """
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("format_version") != INDEX_FORMAT_VERSION:
        raise ModelError(f"unsupported index format version {doc.get('format_version')!r}")
    if doc["config"] != _config_dict(corpus.config):
        raise ModelError("index preprocessing config does not match the corpus config")
    if doc["doc_ids"] != [d.id for d in corpus]:
        raise ModelError("index document ids do not match the corpus")
    kind = doc["kind"]
    config = corpus.config
    if kind == "vector_space":
        return VectorSpaceIndex(
            corpus=corpus,
            config=config,
            idf=doc["idf"],
            doc_vectors={
                i: TfIdfVector(weights=v["weights"], norm=v["norm"])
                for i, v in doc["doc_vectors"].items()
            },
        )
    if kind == "bm25":
        s = doc["stats"]
        return Bm25Index(
            corpus=corpus,
            config=config,
            stats=TermStats(
                n_docs=s["n_docs"],
                df=s["df"],
                tf_by_doc=s["tf_by_doc"],
                doc_len=s["doc_len"],
                avg_doc_len=s["avg_doc_len"],
            ),
            k1=doc["k1"],
            b=doc["b"],
        )
    if kind == "bigram_hashed":
        if doc["hash_spec"] != HASH_SPEC:
            raise ModelError(f"unknown hash spec {doc['hash_spec']!r}")
        return BigramHashIndex(
            corpus=corpus,
            config=config,
            bucket_idf={int(b): w for b, w in doc["bucket_idf"].items()},
            doc_vectors={
                i: {int(b): w for b, w in vec.items()} for i, vec in doc["doc_vectors"].items()
            },
            dims=doc["dims"],
        )
    raise ModelError(f"unknown index kind {kind!r}")
