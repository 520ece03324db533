"""Deterministic feature-hashed bag-of-words embeddings.

The whole engine runs without a model in the loop, so text is embedded with
the classic hashing trick: lowercase alphanumeric tokens are hashed (keyed
blake2b, fixed seed) onto a fixed number of dimensions with a sign hash, the
counts are accumulated, and the result is L2-normalized.  The same text always
produces the same vector, on any machine, across processes — which is what
makes replayed event logs and scenario runs reproducible.
"""

from __future__ import annotations

import hashlib
import re

import numpy as np

DEFAULT_DIMENSION = 256
DEFAULT_HASH_SEED = 1315423911

_TOKEN_RE = re.compile(r"[a-z0-9]+(?:'[a-z0-9]+)?")


def tokenize(text: str) -> list[str]:
    """Lowercase alphanumeric tokens; punctuation never reaches the hasher."""
    return _TOKEN_RE.findall(text.lower())


def _token_hash(token: str, seed: int) -> int:
    key = seed.to_bytes(8, "little")
    digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8, key=key).digest()
    return int.from_bytes(digest, "little")


def hashed_embedding(
    text: str,
    dimension: int = DEFAULT_DIMENSION,
    seed: int = DEFAULT_HASH_SEED,
) -> np.ndarray:
    """Embed ``text`` into a unit vector of ``dimension`` components.

    Each token lands in bucket ``hash % dimension`` with sign taken from a
    separate hash bit, so unrelated texts sit near-orthogonal while shared
    vocabulary pulls vectors together.  Raises ``ValueError`` for text with no
    tokens at all (there is nothing meaningful to normalize).
    """
    if dimension <= 0:
        raise ValueError(f"dimension must be positive, got {dimension}")
    tokens = tokenize(text)
    if not tokens:
        raise ValueError("cannot embed text with no alphanumeric tokens")
    vec = np.zeros(dimension, dtype=np.float64)
    for token in tokens:
        h = _token_hash(token, seed)
        index = h % dimension
        sign = 1.0 if (h >> 63) & 1 else -1.0
        vec[index] += sign
    norm = float(np.linalg.norm(vec))
    if norm == 0.0:
        # Signed counts can cancel exactly (two tokens sharing a bucket with
        # opposite signs); fall back to unsigned counts so the result is usable.
        for token in tokens:
            h = _token_hash(token, seed)
            vec[h % dimension] += 1.0
        norm = float(np.linalg.norm(vec))
    vec /= norm
    vec.setflags(write=False)
    return vec
