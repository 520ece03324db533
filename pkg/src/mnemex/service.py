"""The curation service: timeline, ratings, consolidation, decay — over HTTP.

``MemoryService`` owns the stores, the config, and the audit log; the FastAPI
app in ``create_app`` is a thin adapter that maps its methods onto routes and
its exceptions onto status codes (unknown id -> 404, bad value -> 422, decay
already running -> 409).  All mutations are serialized behind one writer lock
and produce exactly one audit event, so replaying the log from genesis — or
from the latest snapshot — reconstructs the exact same state; embeddings are
always derived from content with the deterministic hasher and never persisted.

Environment: MNEMEX_ADDR (host:port for serving) and MNEMEX_DATA_DIR (where
events.jsonl and snapshot files live).
"""

import hashlib
import json
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

from .consolidate import ExtractiveSummarizer, SummarizerPort, consolidate_entry
from .decay import DecayReport, run_decay
from .embedding import DEFAULT_DIMENSION, hashed_embedding
from .episodic import EpisodicStore
from .persistence import (
    EVENTS_FILENAME,
    EventLog,
    ReplayError,
    iter_events,
    latest_snapshot,
    read_snapshot,
    write_snapshot,
)
from .scoring import DecayConfig, MemoryEntry, MemoryKind, TaskContext, utility_score
from .semantic import SemanticStore

ENV_ADDR = "MNEMEX_ADDR"
ENV_DATA_DIR = "MNEMEX_DATA_DIR"
DEFAULT_ADDR = "127.0.0.1:8750"

CONTENT_PREVIEW_CHARS = 120

TASK_MODE_LAST_USER = "last_user_message"
TASK_MODE_CHARTER = "charter"
DEFAULT_TASK_CHARTER = (
    "Long-running project assistant tracking decisions, facts and follow-ups."
)


class DecayInProgress(Exception):
    """A decay run is already holding the decay lock."""


@dataclass(frozen=True)
class ServiceConfig:
    decay: DecayConfig = field(default_factory=DecayConfig)
    dimension: int = DEFAULT_DIMENSION
    task_mode: str = TASK_MODE_LAST_USER
    task_charter: str = DEFAULT_TASK_CHARTER

    def __post_init__(self) -> None:
        if self.dimension <= 0:
            raise ValueError("dimension must be positive")
        if self.task_mode not in (TASK_MODE_LAST_USER, TASK_MODE_CHARTER):
            raise ValueError(f"unknown task_mode {self.task_mode!r}")
        if not self.task_charter.strip():
            raise ValueError("task_charter must be nonempty")

    def to_dict(self) -> dict:
        return {
            **self.decay.to_dict(),
            "dimension": self.dimension,
            "task_mode": self.task_mode,
            "task_charter": self.task_charter,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ServiceConfig":
        return cls(
            decay=DecayConfig.from_dict(data),
            dimension=int(data.get("dimension", DEFAULT_DIMENSION)),
            task_mode=data.get("task_mode", TASK_MODE_LAST_USER),
            task_charter=data.get("task_charter", DEFAULT_TASK_CHARTER),
        )


class MemoryService:
    """Stores + config + audit log behind one writer lock."""

    def __init__(
        self,
        data_dir: Optional[Union[str, Path]] = None,
        config: Optional[ServiceConfig] = None,
        summarizer: Optional[SummarizerPort] = None,
    ):
        self.config = config or ServiceConfig()
        self.summarizer = summarizer or ExtractiveSummarizer()
        self._writer_lock = threading.RLock()
        self._decay_lock = threading.Lock()
        self.episodic = EpisodicStore(self.config.dimension, n_max=self.config.decay.n_max)
        self.semantic = SemanticStore(self.config.dimension)
        self.counters = {"decay_runs": 0, "deletions": 0, "consolidations": 0}
        self._last_user_entry_id: Optional[int] = None
        self.log: Optional[EventLog] = None
        if data_dir is not None:
            data_dir = Path(data_dir)
            self._recover(data_dir)
            self.log = EventLog(data_dir)
            if self.log.sequence == 0:
                # Genesis event: the log must be self-describing, so a replay
                # from scratch starts from the same config the live service did.
                self._append("config_change", {"config": self.config.to_dict()})

    # ------------------------------------------------------------------
    # recovery: snapshot + log fold
    # ------------------------------------------------------------------

    def _recover(self, data_dir: Path) -> None:
        after = 0
        snapshot = latest_snapshot(data_dir)
        if snapshot is not None:
            seq, state = read_snapshot(snapshot[1])
            self._load_state(state)
            after = seq
        log_path = data_dir / EVENTS_FILENAME
        if log_path.exists():
            for event, _offset, _line in iter_events(log_path, after_sequence=after):
                self._apply_event(event)
        elif after > 0:
            raise ReplayError(
                f"snapshot at sequence {after} but no {EVENTS_FILENAME} beside it"
            )

    def _apply_event(self, event: dict) -> None:
        """One step of the replay fold. Mirrors exactly what the live
        mutation paths do to state — minus logging, validation theater and
        summarizers (facts replay from recorded text, never recomputed)."""
        kind = event["kind"]
        payload = event["payload"]
        if kind == "turn_advance":
            self.episodic.advance_turn(to=int(payload["turn"]))
        elif kind == "insert":
            self._ingest_entry(
                entry_id=int(payload["entry_id"]),
                kind=MemoryKind(payload["entry_kind"]),
                content=payload["content"],
                user_utility=int(payload["user_utility"]),
                consolidation_flag=bool(payload["consolidation_flag"]),
                turn=int(event["turn"]),
            )
        elif kind == "utility_change":
            self.episodic.set_user_utility(int(payload["entry_id"]), int(payload["value"]))
        elif kind == "delete":
            self.episodic.delete(int(payload["entry_id"]))
            self.counters["deletions"] += 1
        elif kind == "consolidate":
            self._ingest_fact(payload)
            self.episodic.set_user_utility(int(payload["entry_id"]), 0)
            self.counters["consolidations"] += 1
        elif kind == "decay_run":
            for item in payload["consolidated"]:
                self._ingest_fact(item)
                self.counters["consolidations"] += 1
            for entry_id in payload["deleted_ids"]:
                self.episodic.delete(int(entry_id))
                self.counters["deletions"] += 1
            self.counters["decay_runs"] += 1
        elif kind == "config_change":
            self._apply_config(ServiceConfig.from_dict(payload["config"]))
        else:  # pragma: no cover — iter_events already rejects unknown kinds
            raise ReplayError(f"unknown event kind {kind!r}")

    def _ingest_entry(
        self,
        entry_id: int,
        kind: MemoryKind,
        content: str,
        user_utility: int,
        consolidation_flag: bool,
        turn: int,
    ) -> None:
        if turn != self.episodic.turn:
            raise ReplayError(
                f"insert event for entry {entry_id} at turn {turn} does not "
                f"match store turn {self.episodic.turn}"
            )
        assigned = self.episodic.insert(
            kind,
            content,
            hashed_embedding(content, self.config.dimension),
            user_utility=user_utility,
            consolidation_flag=consolidation_flag,
        )
        if assigned != entry_id:
            raise ReplayError(
                f"replay assigned entry id {assigned}, log says {entry_id}"
            )
        if kind is MemoryKind.USER_MESSAGE:
            self._last_user_entry_id = assigned

    def _ingest_fact(self, payload: dict) -> None:
        assigned = self.semantic.add_fact(
            payload["text"],
            [int(s) for s in payload["source_entry_ids"]],
            created_turn=int(payload["created_turn"]),
        )
        if assigned != int(payload["fact_id"]):
            raise ReplayError(
                f"replay assigned fact id {assigned}, log says {payload['fact_id']}"
            )

    def _apply_config(self, new: ServiceConfig) -> None:
        if new.dimension != self.config.dimension:
            if len(self.episodic) or len(self.semantic):
                raise ValueError("dimension is fixed once the store holds data")
            turn, next_id = self.episodic.turn, self.episodic.next_id
            self.episodic = EpisodicStore(new.dimension, n_max=new.decay.n_max)
            self.episodic.advance_turn(to=turn)
            self.episodic.set_next_id(next_id)
            self.semantic = SemanticStore(new.dimension)
        else:
            self.episodic.set_n_max(new.decay.n_max)
        self.config = new

    # ------------------------------------------------------------------
    # task vector
    # ------------------------------------------------------------------

    def _task_context(self) -> tuple[TaskContext, str]:
        """Current task vector + which mode actually supplied it."""
        mode = self.config.task_mode
        if mode == TASK_MODE_LAST_USER and self._last_user_entry_id is not None:
            try:
                entry = self.episodic.get(self._last_user_entry_id)
                return (
                    TaskContext(entry.embedding, self.episodic.turn),
                    TASK_MODE_LAST_USER,
                )
            except KeyError:
                pass  # the last user message has been decayed away
        vector = hashed_embedding(self.config.task_charter, self.config.dimension)
        return TaskContext(vector, self.episodic.turn), TASK_MODE_CHARTER

    # ------------------------------------------------------------------
    # mutations (each appends exactly one audit event)
    # ------------------------------------------------------------------

    def _append(self, kind: str, payload: dict) -> None:
        if self.log is not None:
            self.log.append(kind, self.episodic.turn, payload)

    def advance_turn(self, to: Optional[int] = None) -> int:
        with self._writer_lock:
            turn = self.episodic.advance_turn(to=to)
            self._append("turn_advance", {"turn": turn})
            return turn

    def insert_entry(
        self,
        kind: Union[str, MemoryKind],
        content: str,
        user_utility: int = 1,
        consolidation_flag: bool = False,
    ) -> dict:
        if not content or not content.strip():
            raise ValueError("content must be nonempty")
        kind = MemoryKind(kind)
        with self._writer_lock:
            embedding = hashed_embedding(content, self.config.dimension)
            entry_id = self.episodic.insert(
                kind, content, embedding,
                user_utility=user_utility,
                consolidation_flag=consolidation_flag,
            )
            if kind is MemoryKind.USER_MESSAGE:
                self._last_user_entry_id = entry_id
            self._append(
                "insert",
                {
                    "entry_id": entry_id,
                    "entry_kind": kind.value,
                    "content": content,
                    "user_utility": user_utility,
                    "consolidation_flag": bool(consolidation_flag),
                },
            )
            return self._node(self.episodic.get(entry_id))

    def set_utility(self, entry_id: int, value: int) -> dict:
        with self._writer_lock:
            entry = self.episodic.set_user_utility(entry_id, value)
            self._append("utility_change", {"entry_id": entry_id, "value": value})
            return self._node(entry)

    def consolidate(self, entry_id: int) -> dict:
        """Distill an entry to a fact, then mark the entry forgotten (rating 0)
        so the next decay run clears it once its fact is preserved."""
        with self._writer_lock:
            fact_id = consolidate_entry(
                entry_id, self.episodic, self.semantic, self.summarizer,
                created_turn=self.episodic.turn,
            )
            self.episodic.set_user_utility(entry_id, 0)
            fact = self.semantic.get(fact_id)
            self.counters["consolidations"] += 1
            self._append(
                "consolidate",
                {
                    "entry_id": entry_id,
                    "fact_id": fact_id,
                    "text": fact.text,
                    "source_entry_ids": list(fact.source_entry_ids),
                    "created_turn": fact.created_turn,
                },
            )
            return {"entry_id": entry_id, "fact_id": fact_id, "text": fact.text}

    def run_decay_once(self) -> DecayReport:
        """One decay pass; refuses to overlap with itself (HTTP 409)."""
        if not self._decay_lock.acquire(blocking=False):
            raise DecayInProgress("a decay run is already in progress")
        try:
            with self._writer_lock:
                task, mode = self._task_context()
                report = run_decay(
                    self.episodic, self.semantic, task, self.config.decay,
                    self.summarizer, task_mode=mode,
                )
                self.counters["decay_runs"] += 1
                self.counters["deletions"] += len(report.deleted_ids)
                self.counters["consolidations"] += len(report.consolidated)
                payload = report.to_dict()
                # Replay needs the fact texts, not just the id pairs.
                payload["consolidated"] = [
                    {
                        "entry_id": entry_id,
                        "fact_id": fact_id,
                        "text": self.semantic.get(fact_id).text,
                        "source_entry_ids": list(self.semantic.get(fact_id).source_entry_ids),
                        "created_turn": self.semantic.get(fact_id).created_turn,
                    }
                    for entry_id, fact_id in report.consolidated
                ]
                self._append("decay_run", payload)
                return report
        finally:
            self._decay_lock.release()

    def update_config(self, changes: dict) -> dict:
        """Apply a partial config update; validation failures leave state
        untouched and surface as 422."""
        with self._writer_lock:
            merged = {**self.config.to_dict(), **changes}
            new = ServiceConfig.from_dict(merged)
            self._apply_config(new)
            self._append("config_change", {"config": self.config.to_dict()})
            return self.config.to_dict()

    # ------------------------------------------------------------------
    # reads (never mutate; safe to hash state around them)
    # ------------------------------------------------------------------

    def _node(self, entry: MemoryEntry, task: Optional[TaskContext] = None,
              mode: Optional[str] = None) -> dict:
        if task is None:
            task, mode = self._task_context()
        breakdown = utility_score(entry, task, self.config.decay)
        if entry.user_utility == self.config.decay.n_max:
            status = "pinned"
        elif entry.user_utility == 0:
            status = "forget_marked"
        elif breakdown.total < self.config.decay.theta_decay:
            status = "decay_flagged"
        else:
            status = "retained"
        return {
            "entry_id": entry.id,
            "turn": entry.turn,
            "kind": entry.kind.value,
            "content_preview": entry.content[:CONTENT_PREVIEW_CHARS],
            "user_utility": entry.user_utility,
            "consolidation_flag": entry.consolidation_flag,
            "score": breakdown.to_dict(),
            "status": status,
        }

    def timeline(self) -> list[dict]:
        """Every entry in time order, scored against the current task."""
        with self._writer_lock:
            task, mode = self._task_context()
            return [
                self._node(entry, task, mode)
                for entry in self.episodic.get_all_in_time_order()
            ]

    def entry_detail(self, entry_id: int) -> dict:
        with self._writer_lock:
            entry = self.episodic.get(entry_id)
            node = self._node(entry)
            node["content"] = entry.content
            return node

    def semantic_facts(self) -> list[dict]:
        return [
            {
                "fact_id": fact.id,
                "text": fact.text,
                "source_entry_ids": list(fact.source_entry_ids),
                "created_turn": fact.created_turn,
            }
            for fact in self.semantic.get_all_facts()
        ]

    def metrics(self) -> dict:
        with self._writer_lock:
            return {
                "entry_count": len(self.episodic),
                "fact_count": len(self.semantic),
                "turn": self.episodic.turn,
                "decay_runs": self.counters["decay_runs"],
                "deletions_total": self.counters["deletions"],
                "consolidations_total": self.counters["consolidations"],
                "event_count": self.log.sequence if self.log else 0,
            }

    def get_config(self) -> dict:
        return self.config.to_dict()

    # ------------------------------------------------------------------
    # state serialization (snapshots, replay equality)
    # ------------------------------------------------------------------

    def state_dict(self) -> dict:
        """Canonical state: everything replay must reproduce, nothing more.
        Embeddings are omitted — they are pure functions of content."""
        with self._writer_lock:
            entries = [
                {
                    "id": e.id,
                    "kind": e.kind.value,
                    "content": e.content,
                    "turn": e.turn,
                    "user_utility": e.user_utility,
                    "consolidation_flag": e.consolidation_flag,
                }
                for e in self.episodic.get_all_in_time_order()
            ]
            facts = [
                {
                    "id": f.id,
                    "text": f.text,
                    "source_entry_ids": list(f.source_entry_ids),
                    "created_turn": f.created_turn,
                }
                for f in self.semantic.get_all_facts()
            ]
            return {
                "turn": self.episodic.turn,
                "next_entry_id": self.episodic.next_id,
                "entries": sorted(entries, key=lambda e: e["id"]),
                "facts": facts,
                "config": self.config.to_dict(),
                "counters": dict(sorted(self.counters.items())),
                "last_user_entry_id": self._last_user_entry_id,
            }

    def state_json(self) -> str:
        return json.dumps(self.state_dict(), sort_keys=True, indent=2) + "\n"

    def state_hash(self) -> str:
        return hashlib.sha256(self.state_json().encode("utf-8")).hexdigest()

    def _load_state(self, state: dict) -> None:
        self.config = ServiceConfig.from_dict(state["config"])
        self.episodic = EpisodicStore(self.config.dimension, n_max=self.config.decay.n_max)
        self.semantic = SemanticStore(self.config.dimension)
        for item in state["entries"]:
            self.episodic.restore(
                entry_id=int(item["id"]),
                kind=MemoryKind(item["kind"]),
                content=item["content"],
                embedding=hashed_embedding(item["content"], self.config.dimension),
                turn=int(item["turn"]),
                user_utility=int(item["user_utility"]),
                consolidation_flag=bool(item["consolidation_flag"]),
            )
        self.episodic.set_next_id(int(state["next_entry_id"]))
        for item in state["facts"]:
            self._ingest_fact(
                {
                    "text": item["text"],
                    "source_entry_ids": item["source_entry_ids"],
                    "created_turn": item["created_turn"],
                    "fact_id": item["id"],
                }
            )
        self.episodic.advance_turn(to=int(state["turn"]))
        self.counters = dict(state["counters"])
        last = state.get("last_user_entry_id")
        self._last_user_entry_id = None if last is None else int(last)

    def save_snapshot(self) -> Path:
        if self.log is None:
            raise ValueError("snapshots need a data_dir-backed service")
        with self._writer_lock:
            return write_snapshot(self.log.data_dir, self.log.sequence, self.state_dict())


def replay_service(
    data_dir: Union[str, Path],
    summarizer: Optional[SummarizerPort] = None,
    from_snapshot: bool = True,
) -> MemoryService:
    """Rebuild a service from disk. ``from_snapshot=False`` forces a full
    fold from genesis, ignoring snapshot files (used to verify equality)."""
    data_dir = Path(data_dir)
    service = MemoryService(config=None, summarizer=summarizer)
    if from_snapshot:
        service._recover(data_dir)
    else:
        log_path = data_dir / EVENTS_FILENAME
        if log_path.exists():
            for event, _offset, _line in iter_events(log_path):
                service._apply_event(event)
    service.log = EventLog(data_dir)
    return service


# ---------------------------------------------------------------------------
# HTTP adapter
# ---------------------------------------------------------------------------


def create_app(service: MemoryService):
    """Wrap a MemoryService in a FastAPI app (imported lazily so library use
    never needs the HTTP stack)."""
    from fastapi import FastAPI, HTTPException
    from fastapi.middleware.cors import CORSMiddleware
    from fastapi.responses import JSONResponse
    from pydantic import BaseModel

    class EntryBody(BaseModel):
        kind: str
        content: str
        user_utility: int = 1
        consolidation_flag: bool = False

    class UtilityBody(BaseModel):
        value: int

    class AdvanceBody(BaseModel):
        to: Optional[int] = None

    app = FastAPI(title="mnemex", version="0.1.0")
    # The curation UI is served as static files from whatever port is handy,
    # so the API must answer cross-origin requests. Single-user local tool,
    # no credentials — a blanket allow is appropriate here.
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    app.state.service = service

    @app.exception_handler(KeyError)
    async def missing(_, exc: KeyError):
        return JSONResponse(status_code=404, content={"detail": str(exc.args[0])})

    @app.exception_handler(ValueError)
    async def invalid(_, exc: ValueError):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.exception_handler(DecayInProgress)
    async def busy(_, exc: DecayInProgress):
        return JSONResponse(status_code=409, content={"detail": str(exc)})

    @app.get("/timeline")
    def get_timeline():
        return service.timeline()

    @app.get("/entries/{entry_id}")
    def get_entry(entry_id: int):
        return service.entry_detail(entry_id)

    @app.post("/entries", status_code=201)
    def post_entry(body: EntryBody):
        return service.insert_entry(
            kind=body.kind,
            content=body.content,
            user_utility=body.user_utility,
            consolidation_flag=body.consolidation_flag,
        )

    @app.post("/entries/{entry_id}/utility")
    def post_utility(entry_id: int, body: UtilityBody):
        return service.set_utility(entry_id, body.value)

    @app.post("/entries/{entry_id}/consolidate")
    def post_consolidate(entry_id: int):
        return service.consolidate(entry_id)

    @app.post("/decay/run")
    def post_decay():
        return service.run_decay_once().to_dict()

    @app.post("/turns/advance")
    def post_advance(body: AdvanceBody):
        return {"turn": service.advance_turn(to=body.to)}

    @app.get("/semantic")
    def get_semantic():
        return service.semantic_facts()

    @app.get("/metrics")
    def get_metrics():
        return service.metrics()

    @app.get("/config")
    def get_config():
        return service.get_config()

    @app.put("/config")
    def put_config(body: dict):
        return service.update_config(body)

    return app
