"""Semantic memory: distilled facts that outlive their episodic sources.

Facts are created by consolidation (usually just before the source entry is
deleted), carry provenance back to the episodic ids they were distilled from,
and are never decayed — the decay engine only touches the episodic store.
Adding the same text with the same provenance twice is a no-op that returns
the existing fact id.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .embedding import hashed_embedding
from .episodic import SearchHit


@dataclass(frozen=True)
class SemanticFact:
    id: int
    text: str
    source_entry_ids: tuple[int, ...]
    created_turn: int
    embedding: np.ndarray


class SemanticStore:
    def __init__(
        self,
        dimension: int,
        embedder: Optional[Callable[[str], np.ndarray]] = None,
    ):
        if dimension <= 0:
            raise ValueError("dimension must be positive")
        self.dimension = dimension
        self._embedder = embedder or (lambda text: hashed_embedding(text, dimension))
        self._facts: dict[int, SemanticFact] = {}
        self._dedup: dict[tuple[str, tuple[int, ...]], int] = {}
        self._next_id = 0
        self._lock = threading.Lock()

    def add_fact(
        self,
        text: str,
        source_entry_ids: Iterable[int],
        embedding: Optional[np.ndarray] = None,
        created_turn: int = 0,
    ) -> int:
        """Store a fact; returns its id (the existing id on exact duplicates).

        Facts must be nonempty and name at least one source entry.  When no
        embedding is supplied it is computed from the text with the store's
        embedder, which keeps replayed logs byte-for-byte reproducible.
        """
        if not text or not text.strip():
            raise ValueError("fact text must be nonempty")
        sources = tuple(sorted(int(s) for s in source_entry_ids))
        if not sources:
            raise ValueError("a fact needs at least one source entry id")
        key = (text, sources)
        with self._lock:
            existing = self._dedup.get(key)
            if existing is not None:
                return existing
        if embedding is None:
            vec = np.asarray(self._embedder(text), dtype=np.float64)
        else:
            vec = np.asarray(embedding, dtype=np.float64)
        if vec.shape != (self.dimension,):
            raise ValueError(f"embedding shape {vec.shape} != ({self.dimension},)")
        norm = float(np.linalg.norm(vec))
        if norm == 0.0:
            raise ValueError("zero embeddings are not allowed")
        vec = vec / norm
        vec.setflags(write=False)
        with self._lock:
            # Re-check under the lock; another writer may have won the race.
            existing = self._dedup.get(key)
            if existing is not None:
                return existing
            fact_id = self._next_id
            self._next_id += 1
            self._facts[fact_id] = SemanticFact(
                id=fact_id,
                text=text,
                source_entry_ids=sources,
                created_turn=created_turn,
                embedding=vec,
            )
            self._dedup[key] = fact_id
            return fact_id

    def get(self, fact_id: int) -> SemanticFact:
        with self._lock:
            fact = self._facts.get(fact_id)
            if fact is None:
                raise KeyError(f"no fact with id {fact_id}")
            return fact

    def get_all_facts(self) -> list[SemanticFact]:
        """All facts in creation order (ids are assigned sequentially)."""
        with self._lock:
            return [self._facts[i] for i in sorted(self._facts)]

    def query_facts(self, query: np.ndarray, k: int) -> list[SearchHit]:
        """Exact top-k over facts, same ordering contract as the episodic
        store: cosine desc, then newer created_turn, then lower id."""
        if not isinstance(k, int) or k < 0:
            raise ValueError(f"k must be a nonnegative integer, got {k!r}")
        q = np.asarray(query, dtype=np.float64)
        if q.shape != (self.dimension,):
            raise ValueError(f"query shape {q.shape} != ({self.dimension},)")
        qnorm = float(np.linalg.norm(q))
        if qnorm == 0.0:
            raise ValueError("zero query vectors are not allowed")
        q = q / qnorm
        with self._lock:
            if k == 0 or not self._facts:
                return []
            facts = [self._facts[i] for i in sorted(self._facts)]
        # Per-row np.dot keeps identical embeddings at identical scores;
        # batched products don't guarantee that (row-position-dependent
        # reduction order), and ties must break on metadata, not BLAS noise.
        scores = [float(np.dot(f.embedding, q)) for f in facts]
        order = sorted(
            range(len(facts)),
            key=lambda i: (-scores[i], -facts[i].created_turn, facts[i].id),
        )
        return [
            SearchHit(entry_id=facts[i].id, raw_cosine=float(scores[i]), rank=rank)
            for rank, i in enumerate(order[:k], start=1)
        ]

    def __len__(self) -> int:
        return len(self._facts)

    def __contains__(self, fact_id: int) -> bool:
        return fact_id in self._facts
