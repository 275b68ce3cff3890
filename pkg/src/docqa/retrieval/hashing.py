"""Deterministic string hashing for the feature-hashed index.

FNV-1a over the UTF-8 bytes, 64-bit; buckets are the hash modulo 2^20.
Bigram features are the two stems joined by a single space, which cannot
collide with a unigram feature because tokens never contain whitespace.
"""

from __future__ import annotations

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK = 0xFFFFFFFFFFFFFFFF

N_BUCKETS = 2**20

HASH_SPEC = "fnv1a-64/utf-8; bucket = hash mod 2^20; bigram feature = stems joined by one space"


def fnv1a_64(s: str) -> int:
    h = _FNV_OFFSET
    for byte in s.encode("utf-8"):
        h ^= byte
        h = (h * _FNV_PRIME) & _MASK
    return h


def bucket(feature: str) -> int:
    return fnv1a_64(feature) % N_BUCKETS


def hashed_counts(stems: list[str]) -> dict[int, int]:
    """Bucket counts for the unigrams and bigrams of a stem sequence."""
    counts: dict[int, int] = {}
    for s in stems:
        b = bucket(s)
        counts[b] = counts.get(b, 0) + 1
    for a, b_ in zip(stems, stems[1:]):
        h = bucket(a + " " + b_)
        counts[h] = counts.get(h, 0) + 1
    return counts
