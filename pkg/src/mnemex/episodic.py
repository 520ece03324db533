"""Episodic memory: the append-heavy store of raw interaction events.

Entries are keyed by monotonically increasing integer ids, stamped with the
store's logical turn counter at insert time, and hold unit-normalized
embeddings.  Search is exhaustive and exact — at desk scale (thousands of
entries) one dot product per entry is both simpler and more trustworthy than
any index, and determinism is a feature: equal similarities break ties toward
the newer entry, then the lower id.

All mutation funnels through this class; readers get defensive copies whose
embedding arrays are shared read-only views.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from .scoring import DEFAULT_N_MAX, MemoryEntry, MemoryKind


@dataclass(frozen=True)
class SearchHit:
    """One ranked result from a similarity query (rank is 1-based)."""

    entry_id: int
    raw_cosine: float
    rank: int


class EpisodicStore:
    def __init__(self, dimension: int, n_max: int = DEFAULT_N_MAX):
        if dimension <= 0:
            raise ValueError("dimension must be positive")
        if not isinstance(n_max, int) or n_max < 1:
            raise ValueError("n_max must be an integer >= 1")
        self.dimension = dimension
        self.n_max = n_max
        self._entries: dict[int, MemoryEntry] = {}
        self._next_id = 0
        self._turn = 0
        self._lock = threading.Lock()
        self.audit: list[dict] = []

    # -- clock ---------------------------------------------------------------

    @property
    def turn(self) -> int:
        return self._turn

    def advance_turn(self, to: Optional[int] = None) -> int:
        """Move the logical clock forward (by one, or to an explicit turn)."""
        with self._lock:
            if to is None:
                self._turn += 1
            else:
                if to < self._turn:
                    raise ValueError(f"cannot move turn backwards: {to} < {self._turn}")
                self._turn = to
            return self._turn

    # -- mutation ------------------------------------------------------------

    def insert(
        self,
        kind: MemoryKind,
        content: str,
        embedding: np.ndarray,
        user_utility: int = 1,
        consolidation_flag: bool = False,
        wall_time: Optional[float] = None,
    ) -> int:
        """Add an entry at the current turn; returns its id.

        The embedding is normalized to unit length here.  Zero vectors are
        rejected rather than silently renormalized — a zero embedding is a
        caller bug, not a degenerate memory.
        """
        kind = MemoryKind(kind)
        if not isinstance(user_utility, int) or not 0 <= user_utility <= self.n_max:
            raise ValueError(
                f"user utility must be an integer in [0, {self.n_max}], got {user_utility!r}"
            )
        vec = np.asarray(embedding, dtype=np.float64)
        if vec.shape != (self.dimension,):
            raise ValueError(f"embedding shape {vec.shape} != ({self.dimension},)")
        norm = float(np.linalg.norm(vec))
        if norm == 0.0:
            raise ValueError("zero embeddings are not allowed")
        vec = vec / norm
        vec.setflags(write=False)
        with self._lock:
            entry_id = self._next_id
            self._next_id += 1
            self._entries[entry_id] = MemoryEntry(
                id=entry_id,
                kind=kind,
                content=content,
                turn=self._turn,
                embedding=vec,
                user_utility=user_utility,
                consolidation_flag=bool(consolidation_flag),
                wall_time=wall_time,
                n_max=self.n_max,
            )
            self.audit.append({"op": "insert", "entry_id": entry_id, "turn": self._turn})
            return entry_id

    def set_user_utility(self, entry_id: int, utility: int) -> MemoryEntry:
        """Re-rate an entry. Only the rating changes; timestamp and content
        are immutable for the entry's whole lifetime."""
        if not isinstance(utility, int) or not 0 <= utility <= self.n_max:
            raise ValueError(
                f"user utility must be an integer in [0, {self.n_max}], got {utility!r}"
            )
        with self._lock:
            entry = self._require(entry_id)
            entry.user_utility = utility
            self.audit.append(
                {"op": "utility_change", "entry_id": entry_id, "value": utility, "turn": self._turn}
            )
            return replace(entry)

    def set_consolidation_flag(self, entry_id: int, flag: bool) -> MemoryEntry:
        with self._lock:
            entry = self._require(entry_id)
            entry.consolidation_flag = bool(flag)
            return replace(entry)

    def delete(self, entry_id: int) -> MemoryEntry:
        with self._lock:
            entry = self._require(entry_id)
            del self._entries[entry_id]
            self.audit.append({"op": "delete", "entry_id": entry_id, "turn": self._turn})
            return entry

    def restore(
        self,
        entry_id: int,
        kind: MemoryKind,
        content: str,
        embedding: np.ndarray,
        turn: int,
        user_utility: int = 1,
        consolidation_flag: bool = False,
        wall_time: Optional[float] = None,
    ) -> None:
        """Recreate an entry exactly as previously recorded (recovery path).

        Unlike :meth:`insert` this takes the id and turn verbatim and moves
        the id counter past them, so a store rebuilt from a snapshot keeps
        handing out fresh ids where the original left off.
        """
        kind = MemoryKind(kind)
        if not isinstance(entry_id, int) or entry_id < 0:
            raise ValueError(f"entry id must be a nonnegative integer, got {entry_id!r}")
        if not isinstance(user_utility, int) or not 0 <= user_utility <= self.n_max:
            raise ValueError(
                f"user utility must be an integer in [0, {self.n_max}], got {user_utility!r}"
            )
        vec = np.asarray(embedding, dtype=np.float64)
        if vec.shape != (self.dimension,):
            raise ValueError(f"embedding shape {vec.shape} != ({self.dimension},)")
        norm = float(np.linalg.norm(vec))
        if norm == 0.0:
            raise ValueError("zero embeddings are not allowed")
        vec = vec / norm
        vec.setflags(write=False)
        with self._lock:
            if entry_id in self._entries:
                raise ValueError(f"entry id {entry_id} already present")
            self._entries[entry_id] = MemoryEntry(
                id=entry_id,
                kind=kind,
                content=content,
                turn=turn,
                embedding=vec,
                user_utility=user_utility,
                consolidation_flag=bool(consolidation_flag),
                wall_time=wall_time,
                n_max=self.n_max,
            )
            self._next_id = max(self._next_id, entry_id + 1)

    @property
    def next_id(self) -> int:
        return self._next_id

    def set_next_id(self, value: int) -> None:
        """Advance the id counter (never backwards); used when a snapshot
        recorded ids beyond the surviving entries."""
        with self._lock:
            if not isinstance(value, int) or value < self._next_id:
                raise ValueError(
                    f"next id can only move forward: {value!r} < {self._next_id}"
                )
            self._next_id = value

    def set_n_max(self, n_max: int) -> None:
        """Change the rating scale. Refused if any stored rating would fall
        outside the new scale — silently clamping would rewrite user intent."""
        if not isinstance(n_max, int) or n_max < 1:
            raise ValueError("n_max must be an integer >= 1")
        with self._lock:
            worst = max((e.user_utility for e in self._entries.values()), default=0)
            if worst > n_max:
                raise ValueError(
                    f"cannot set n_max={n_max}: an entry holds utility {worst}"
                )
            self.n_max = n_max
            for entry in self._entries.values():
                entry.n_max = n_max

    # -- read ----------------------------------------------------------------

    def get(self, entry_id: int) -> MemoryEntry:
        with self._lock:
            return replace(self._require(entry_id))

    def get_all_in_time_order(self) -> list[MemoryEntry]:
        """Snapshot of all entries ordered by (turn, id)."""
        with self._lock:
            ordered = sorted(self._entries.values(), key=lambda e: (e.turn, e.id))
            return [replace(e) for e in ordered]

    def top_k_similar(self, query: np.ndarray, k: int) -> list[SearchHit]:
        """Exact exhaustive top-k by raw cosine.

        Ties break toward the newer entry, then the lower id, so results are
        fully deterministic.  k may exceed the store size; k == 0 is legal and
        returns an empty list.
        """
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
            if k == 0 or not self._entries:
                return []
            entries = list(self._entries.values())
        # One np.dot per row, not a batched matrix product: blocked BLAS
        # kernels can give byte-identical rows *different* floats depending on
        # row position, which would poison the exact tie-break contract.
        scores = [float(np.dot(e.embedding, q)) for e in entries]
        order = sorted(
            range(len(entries)),
            key=lambda i: (-scores[i], -entries[i].turn, entries[i].id),
        )
        return [
            SearchHit(entry_id=entries[i].id, raw_cosine=float(scores[i]), rank=rank)
            for rank, i in enumerate(order[:k], start=1)
        ]

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, entry_id: int) -> bool:
        return entry_id in self._entries

    def _require(self, entry_id: int) -> MemoryEntry:
        entry = self._entries.get(entry_id)
        if entry is None:
            raise KeyError(f"no entry with id {entry_id}")
        return entry
