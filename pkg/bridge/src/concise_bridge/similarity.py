"""Deterministic sentence similarity: hashed character n-gram cosine.

Not a neural sentence encoder; it is the bridge's dependency-free default.
Scores are symmetric, deterministic, and live in [0, 1] with self-similarity
exactly 1 for non-empty text.
"""
from __future__ import annotations

import hashlib
import math
from collections import Counter

_NGRAM_SIZES = (3, 4, 5)
_BUCKETS = 4096


def _features(text: str) -> Counter:
    padded = f" {' '.join(text.casefold().split())} "
    counts: Counter = Counter()
    for n in _NGRAM_SIZES:
        for i in range(max(0, len(padded) - n + 1)):
            gram = padded[i : i + n]
            digest = hashlib.blake2b(gram.encode("utf-8"), digest_size=4).digest()
            counts[int.from_bytes(digest, "big") % _BUCKETS] += 1
    return counts


def similarity(a: str, b: str) -> float:
    fa, fb = _features(a), _features(b)
    if not fa or not fb:
        return 1.0 if not fa and not fb else 0.0
    dot = sum(count * fb.get(bucket, 0) for bucket, count in fa.items())
    norm = math.sqrt(sum(c * c for c in fa.values())) * math.sqrt(
        sum(c * c for c in fb.values())
    )
    return dot / norm if norm else 0.0
