"""The decay pass: score everything, consolidate what's flagged, drop the rest.

One run scores every episodic entry against the current task context, then
walks the snapshot in time order applying three rules in priority order:

1. pinned entries (rating == n_max) always survive, whatever their score;
2. entries rated 0 are processed as below-threshold on this run no matter
   what they score — "forget" is a command, not a suggestion;
3. everything else survives iff its total score is >= theta_decay (strict
   ``<`` deletes, so an entry sitting exactly at the threshold stays).

A doomed entry whose consolidation flag is set is distilled into the semantic
store *before* deletion; if the summarizer fails, the entry is retained and
the failure is recorded in the report rather than raised — one bad entry must
not abort the sweep.  The report serializes to a stable JSON shape for audit
logs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .consolidate import ExtractiveSummarizer, SummarizerPort, consolidate_entry
from .episodic import EpisodicStore
from .scoring import DecayConfig, ScoreBreakdown, TaskContext, utility_score
from .semantic import SemanticStore


@dataclass
class DecayReport:
    run_turn: int
    scored: list[tuple[int, ScoreBreakdown]]
    deleted_ids: list[int]
    consolidated: list[tuple[int, int]]  # (entry_id, fact_id)
    retained_count: int
    config_snapshot: dict
    errors: list[tuple[int, str]] = field(default_factory=list)
    task_mode: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "run_turn": self.run_turn,
            "scored": [
                {"entry_id": entry_id, **breakdown.to_dict()}
                for entry_id, breakdown in self.scored
            ],
            "deleted_ids": list(self.deleted_ids),
            "consolidated": [
                {"entry_id": entry_id, "fact_id": fact_id}
                for entry_id, fact_id in self.consolidated
            ],
            "retained_count": self.retained_count,
            "config_snapshot": dict(self.config_snapshot),
            "errors": [
                {"entry_id": entry_id, "message": message}
                for entry_id, message in self.errors
            ],
            "task_mode": self.task_mode,
        }


def score_all(
    store: EpisodicStore, task: TaskContext, config: DecayConfig
) -> list[tuple[int, ScoreBreakdown]]:
    """Score every entry (time order). Pure: no store mutation whatsoever."""
    return [
        (entry.id, utility_score(entry, task, config))
        for entry in store.get_all_in_time_order()
    ]


def run_decay(
    store: EpisodicStore,
    semantic: SemanticStore,
    task: TaskContext,
    config: DecayConfig,
    summarizer: Optional[SummarizerPort] = None,
    task_mode: Optional[str] = None,
) -> DecayReport:
    """One full decay pass over a snapshot of the store.

    Scores are computed once against the snapshot; inserts that race the pass
    are untouched.  Running twice back-to-back at the same turn is a no-op the
    second time: every survivor either was pinned or scored >= theta_decay,
    and neither fact changes between the runs.
    """
    summarizer = summarizer or ExtractiveSummarizer()
    snapshot = store.get_all_in_time_order()
    scored = [(entry.id, utility_score(entry, task, config)) for entry in snapshot]
    totals = {entry_id: breakdown.total for entry_id, breakdown in scored}

    deleted_ids: list[int] = []
    consolidated: list[tuple[int, int]] = []
    errors: list[tuple[int, str]] = []
    retained = 0

    for entry in snapshot:
        if entry.user_utility == config.n_max:
            retained += 1
            continue
        forced = entry.user_utility == 0
        doomed = forced or totals[entry.id] < config.theta_decay
        if not doomed:
            retained += 1
            continue
        if entry.consolidation_flag:
            try:
                fact_id = consolidate_entry(
                    entry.id, store, semantic, summarizer, created_turn=task.current_turn
                )
                consolidated.append((entry.id, fact_id))
            except Exception as exc:  # noqa: BLE001 — any failure means "keep it"
                errors.append((entry.id, str(exc)))
                retained += 1
                continue
        store.delete(entry.id)
        deleted_ids.append(entry.id)

    return DecayReport(
        run_turn=task.current_turn,
        scored=scored,
        deleted_ids=deleted_ids,
        consolidated=consolidated,
        retained_count=retained,
        config_snapshot=config.to_dict(),
        errors=errors,
        task_mode=task_mode,
    )


def maybe_run_decay(
    current_turn: int,
    store: EpisodicStore,
    semantic: SemanticStore,
    task: TaskContext,
    config: DecayConfig,
    summarizer: Optional[SummarizerPort] = None,
    task_mode: Optional[str] = None,
) -> Optional[DecayReport]:
    """Run a decay pass iff the cadence divides the turn and the store is
    nonempty; returns None otherwise."""
    if current_turn % config.cadence_turns != 0 or len(store) == 0:
        return None
    return run_decay(store, semantic, task, config, summarizer, task_mode=task_mode)
