"""Core scoring math: how much is a memory worth right now?

Every entry gets a composite utility score built from three bounded
components:

* recency   — exponential decay in elapsed logical turns, ``exp(-rate * dt)``
* relevance — cosine similarity against the current task vector, affinely
  mapped from [-1, 1] onto [0, 1] so it composes with the other terms
* user utility — an explicit integer rating 0..n_max, normalized to [0, 1]

The total is the weighted sum ``alpha * recency + beta * relevance +
gamma * user_utility_norm``.  Ratings at the ends of the scale carry hard
semantics on top of the arithmetic: ``n_max`` pins an entry (never decays),
``0`` marks it for deletion on the next decay run.  Those overrides live in
the decay engine; this module is pure math.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

DEFAULT_ALPHA = 0.3
DEFAULT_BETA = 0.5
DEFAULT_GAMMA = 0.2
DEFAULT_DECAY_RATE = 0.05
DEFAULT_THETA_DECAY = 0.35
DEFAULT_N_MAX = 2
DEFAULT_CADENCE_TURNS = 10


class MemoryKind(str, Enum):
    USER_MESSAGE = "user_message"
    TOOL_CALL = "tool_call"
    AGENT_ACTION = "agent_action"
    OBSERVATION = "observation"


@dataclass
class MemoryEntry:
    """One episodic memory.

    ``embedding`` may be absent only before the entry is enrolled in a store;
    scoring requires it.  ``turn`` is the logical turn index at insert time and
    never changes afterwards.  ``n_max`` records the rating scale the entry was
    enrolled under, so ``pinned`` is derivable without reaching for config.
    """

    id: int
    kind: MemoryKind
    content: str
    turn: int
    embedding: Optional[np.ndarray] = None
    user_utility: int = 1
    consolidation_flag: bool = False
    wall_time: Optional[float] = None
    n_max: int = DEFAULT_N_MAX

    @property
    def pinned(self) -> bool:
        return self.user_utility == self.n_max

    @property
    def forget_marked(self) -> bool:
        return self.user_utility == 0


@dataclass(frozen=True)
class DecayConfig:
    """Weights, rates and thresholds for the scoring/decay machinery.

    Weights must be nonnegative with a positive sum; the decay threshold is
    compared with strict ``<`` (an entry scoring exactly theta_decay
    survives).  ``use_wall_clock`` switches the recency clock from logical
    turns to wall seconds.
    """

    alpha: float = DEFAULT_ALPHA
    beta: float = DEFAULT_BETA
    gamma: float = DEFAULT_GAMMA
    decay_rate: float = DEFAULT_DECAY_RATE
    theta_decay: float = DEFAULT_THETA_DECAY
    n_max: int = DEFAULT_N_MAX
    cadence_turns: int = DEFAULT_CADENCE_TURNS
    use_wall_clock: bool = False

    def __post_init__(self) -> None:
        for name in ("alpha", "beta", "gamma"):
            if not math.isfinite(getattr(self, name)) or getattr(self, name) < 0:
                raise ValueError(f"{name} must be finite and >= 0")
        if self.alpha + self.beta + self.gamma <= 0:
            raise ValueError("at least one of alpha/beta/gamma must be positive")
        if not math.isfinite(self.decay_rate) or self.decay_rate < 0:
            raise ValueError("decay_rate must be finite and >= 0")
        if not math.isfinite(self.theta_decay):
            raise ValueError("theta_decay must be finite")
        if not isinstance(self.n_max, int) or self.n_max < 1:
            raise ValueError("n_max must be an integer >= 1")
        if not isinstance(self.cadence_turns, int) or self.cadence_turns < 1:
            raise ValueError("cadence_turns must be an integer >= 1")

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "gamma": self.gamma,
            "decay_rate": self.decay_rate,
            "theta_decay": self.theta_decay,
            "n_max": self.n_max,
            "cadence_turns": self.cadence_turns,
            "use_wall_clock": self.use_wall_clock,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DecayConfig":
        known = {f: data[f] for f in cls.__dataclass_fields__ if f in data}
        return cls(**known)


@dataclass(frozen=True)
class TaskContext:
    """What the agent is doing right now: task vector + current clock."""

    task_vector: np.ndarray
    current_turn: int
    current_wall_time: Optional[float] = None


@dataclass(frozen=True)
class ScoreBreakdown:
    """Score components for one entry. ``total`` is always the exact weighted
    sum of the three parts — it is computed from them, never stored separately.
    """

    recency: float
    relevance: float
    user_utility_norm: float
    total: float

    def to_dict(self) -> dict:
        return {
            "recency": self.recency,
            "relevance": self.relevance,
            "user_utility_norm": self.user_utility_norm,
            "total": self.total,
        }


def recency(current_time: float, entry_time: float, decay_rate: float) -> float:
    """``exp(-decay_rate * (current_time - entry_time))``.

    Times are logical turns by default (wall seconds in wall-clock mode); the
    entry must not postdate the clock.  Result is in [0, 1]: 1 exactly at zero
    elapsed time or zero rate, and 0 only when the exponent underflows.
    """
    if decay_rate < 0 or not math.isfinite(decay_rate):
        raise ValueError("decay_rate must be finite and >= 0")
    delta = current_time - entry_time
    if delta < 0:
        raise ValueError(
            f"entry time {entry_time} is ahead of current time {current_time}"
        )
    return math.exp(-decay_rate * delta)


def cosine_similarity(a: np.ndarray, b: np.ndarray) -> float:
    """Raw cosine in [-1, 1]. Inputs need not be unit length; zero vectors and
    dimension mismatches are rejected rather than guessed around."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    norm_a = float(np.linalg.norm(a))
    norm_b = float(np.linalg.norm(b))
    if norm_a == 0.0 or norm_b == 0.0:
        raise ValueError("cosine similarity is undefined for zero vectors")
    value = float(np.dot(a, b) / (norm_a * norm_b))
    # Guard against fp drift just past the ends of the legal range.
    return max(-1.0, min(1.0, value))


def relevance(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine mapped onto [0, 1] via (c + 1) / 2, for use inside the score."""
    return (cosine_similarity(a, b) + 1.0) / 2.0


def normalize_user_utility(utility: int, n_max: int) -> float:
    """Map an integer rating 0..n_max onto [0, 1] as ``utility / n_max``."""
    if not isinstance(n_max, int) or n_max < 1:
        raise ValueError("n_max must be an integer >= 1")
    if not isinstance(utility, int) or not 0 <= utility <= n_max:
        raise ValueError(f"user utility must be an integer in [0, {n_max}], got {utility!r}")
    return utility / n_max


def utility_score(
    entry: MemoryEntry, task: TaskContext, config: DecayConfig
) -> ScoreBreakdown:
    """Score one entry against the current task.

    Combines the three components with the configured weights.  The entry must
    be enrolled (embedding present) and its rating must fit the configured
    scale.  In wall-clock mode both the entry and the task context must carry
    wall times.
    """
    if entry.embedding is None:
        raise ValueError(f"entry {entry.id} has no embedding; enroll it first")
    if config.use_wall_clock:
        if entry.wall_time is None or task.current_wall_time is None:
            raise ValueError("wall-clock mode requires wall times on entry and task")
        r = recency(task.current_wall_time, entry.wall_time, config.decay_rate)
    else:
        r = recency(task.current_turn, entry.turn, config.decay_rate)
    e = relevance(entry.embedding, task.task_vector)
    u = normalize_user_utility(entry.user_utility, config.n_max)
    total = config.alpha * r + config.beta * e + config.gamma * u
    return ScoreBreakdown(recency=r, relevance=e, user_utility_norm=u, total=total)
