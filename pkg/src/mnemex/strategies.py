"""Context assembly strategies: what goes in front of the model each turn.

Three ways to build a prompt context from memory:

* SlidingWindow — everything from the last N turns, nothing older.
* BasicRAG     — the window plus exact top-k episodic hits (no decay, the
  retrieval pool only ever grows).
* Hybrid       — semantic facts first, then episodic hits from the decayed
  store, then the window: oldest context first, freshest last.

Bundles carry a whitespace token count (count of maximal non-whitespace runs
over the concatenated item texts) — deliberately model-free so costs are
reproducible anywhere.  When the same entry would appear both via retrieval
and via the window, the window copy wins and the entry appears exactly once.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .episodic import EpisodicStore
from .scoring import DecayConfig, MemoryEntry
from .semantic import SemanticStore

SOURCE_WORKING = "working"
SOURCE_EPISODIC = "episodic"
SOURCE_SEMANTIC = "semantic"


@dataclass(frozen=True)
class SlidingWindow:
    window_turns: int = 10


@dataclass(frozen=True)
class BasicRAG:
    k: int = 5
    window_turns: int = 10


@dataclass(frozen=True)
class Hybrid:
    k_episodic: int = 5
    k_semantic: int = 3
    decay_config: DecayConfig = field(default_factory=DecayConfig)
    window_turns: int = 10


StrategyKind = Union[SlidingWindow, BasicRAG, Hybrid]


@dataclass(frozen=True)
class BundleItem:
    source: str  # one of working / episodic / semantic
    text: str
    turn: int


@dataclass(frozen=True)
class ContextBundle:
    items: tuple[BundleItem, ...]
    token_cost: int


def token_count(text: str) -> int:
    """Whitespace tokens: ``len(text.split())``. Empty/whitespace-only -> 0."""
    return len(text.split())


def _bundle(items: Sequence[BundleItem]) -> ContextBundle:
    cost = sum(token_count(item.text) for item in items)
    return ContextBundle(items=tuple(items), token_cost=cost)


def _window_entries(
    history: Sequence[MemoryEntry], window_turns: int
) -> list[MemoryEntry]:
    """Entries from the most recent ``window_turns`` turns of ``history``,
    anchored at the newest turn present, in (turn, id) order."""
    if window_turns < 0:
        raise ValueError("window_turns must be >= 0")
    if not history or window_turns == 0:
        return []
    anchor = max(entry.turn for entry in history)
    cutoff = anchor - window_turns
    selected = [entry for entry in history if entry.turn > cutoff]
    selected.sort(key=lambda e: (e.turn, e.id))
    return selected


def assemble_sliding_window(
    history: Sequence[MemoryEntry], window_turns: int = 10
) -> ContextBundle:
    """Just the recent window, in time order."""
    items = [
        BundleItem(source=SOURCE_WORKING, text=entry.content, turn=entry.turn)
        for entry in _window_entries(history, window_turns)
    ]
    return _bundle(items)


def assemble_basic_rag(
    store: EpisodicStore,
    query_vector: np.ndarray,
    k: int = 5,
    window_turns: int = 10,
) -> ContextBundle:
    """Recent window plus top-k retrieval extras.

    Hits already inside the window are dropped (window copy wins), so with
    k == 0 this degenerates to the sliding window exactly.  Window items come
    first in time order, then the surviving hits in similarity order.
    """
    history = store.get_all_in_time_order()
    window = _window_entries(history, window_turns)
    window_ids = {entry.id for entry in window}
    items = [
        BundleItem(source=SOURCE_WORKING, text=entry.content, turn=entry.turn)
        for entry in window
    ]
    if k > 0 and len(store) > 0:
        by_id = {entry.id: entry for entry in history}
        for hit in store.top_k_similar(query_vector, k):
            if hit.entry_id in window_ids:
                continue
            entry = by_id[hit.entry_id]
            items.append(
                BundleItem(source=SOURCE_EPISODIC, text=entry.content, turn=entry.turn)
            )
    return _bundle(items)


def assemble_hybrid(
    episodic: EpisodicStore,
    semantic: SemanticStore,
    query_vector: np.ndarray,
    k_episodic: int = 5,
    k_semantic: int = 3,
    window_turns: int = 10,
) -> ContextBundle:
    """Semantic facts, then episodic hits, then the recent window.

    The episodic store is expected to be the post-decay view; this function
    never triggers decay itself.  Dedup matches the RAG rule: an entry that is
    both a retrieval hit and a window member appears once, as a window item.
    """
    history = episodic.get_all_in_time_order()
    window = _window_entries(history, window_turns)
    window_ids = {entry.id for entry in window}

    items: list[BundleItem] = []
    if k_semantic > 0 and len(semantic) > 0:
        for hit in semantic.query_facts(query_vector, k_semantic):
            fact = semantic.get(hit.entry_id)
            items.append(
                BundleItem(
                    source=SOURCE_SEMANTIC, text=fact.text, turn=fact.created_turn
                )
            )
    if k_episodic > 0 and len(episodic) > 0:
        by_id = {entry.id: entry for entry in history}
        for hit in episodic.top_k_similar(query_vector, k_episodic):
            if hit.entry_id in window_ids:
                continue
            entry = by_id[hit.entry_id]
            items.append(
                BundleItem(source=SOURCE_EPISODIC, text=entry.content, turn=entry.turn)
            )
    items.extend(
        BundleItem(source=SOURCE_WORKING, text=entry.content, turn=entry.turn)
        for entry in window
    )
    return _bundle(items)
