from .filters import EMPTY_FILTER, MetadataFilter, RangeClause, ValueClause, apply_metadata_filter
from .hashing import HASH_SPEC, N_BUCKETS, bucket, fnv1a_64, hashed_counts
from .indexes import (
    BM25_B,
    BM25_K1,
    BigramHashIndex,
    Bm25Index,
    INDEX_KINDS,
    TermStats,
    term_stats,
    TfIdfVector,
    VectorSpaceIndex,
    build_index,
    load_index,
    save_index,
    score,
    score_bigram,
    score_bm25,
    score_cosine,
)
from .ranking import RankedList, rank, retrieve_top_k

__all__ = [
    "BM25_B",
    "BM25_K1",
    "BigramHashIndex",
    "Bm25Index",
    "EMPTY_FILTER",
    "HASH_SPEC",
    "INDEX_KINDS",
    "MetadataFilter",
    "N_BUCKETS",
    "RangeClause",
    "RankedList",
    "TermStats",
    "TfIdfVector",
    "ValueClause",
    "VectorSpaceIndex",
    "apply_metadata_filter",
    "bucket",
    "build_index",
    "fnv1a_64",
    "hashed_counts",
    "load_index",
    "rank",
    "retrieve_top_k",
    "save_index",
    "score",
    "score_bigram",
    "score_bm25",
    "score_cosine",
    "term_stats",
]
