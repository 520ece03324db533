"""Audit-event persistence: a JSON-Lines log plus snapshot files.

Every mutation appends exactly one event line
``{"sequence_number": n, "turn": t, "kind": k, "payload": {...}}`` with a
gapless, strictly increasing sequence number starting at 1.  State recovery
is a left fold over the log; snapshot files (``snapshot-{seq}.json``) only
shortcut the fold's starting point, they never carry information the log
doesn't.

Corruption is refused loudly: a line that fails to parse — including a
truncated final line — raises ReplayError naming the line number and byte
offset, as does any sequence gap.
"""

from __future__ import annotations

import json
import os
import re
import threading
from pathlib import Path
from typing import Iterator, Optional, Union

EVENTS_FILENAME = "events.jsonl"
SNAPSHOT_RE = re.compile(r"^snapshot-(\d+)\.json$")

EVENT_KINDS = frozenset(
    {
        "insert",
        "utility_change",
        "delete",
        "consolidate",
        "decay_run",
        "turn_advance",
        "config_change",
    }
)


class ReplayError(Exception):
    """The event log cannot be replayed; carries the failure position."""

    def __init__(self, message: str, line_number: Optional[int] = None,
                 byte_offset: Optional[int] = None):
        super().__init__(message)
        self.line_number = line_number
        self.byte_offset = byte_offset


class EventLog:
    """Append-only writer over ``<data_dir>/events.jsonl``."""

    def __init__(self, data_dir: Union[str, Path]):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.path = self.data_dir / EVENTS_FILENAME
        self._lock = threading.Lock()
        self._sequence = self._last_sequence_on_disk()

    @property
    def sequence(self) -> int:
        return self._sequence

    def _last_sequence_on_disk(self) -> int:
        last = 0
        if self.path.exists():
            for event, _offset, _line in iter_events(self.path):
                last = event["sequence_number"]
        return last

    def append(self, kind: str, turn: int, payload: dict) -> int:
        """Write one event and flush it; returns its sequence number."""
        if kind not in EVENT_KINDS:
            raise ValueError(f"unknown event kind {kind!r}")
        with self._lock:
            self._sequence += 1
            event = {
                "sequence_number": self._sequence,
                "turn": turn,
                "kind": kind,
                "payload": payload,
            }
            line = json.dumps(event, sort_keys=True, separators=(",", ":"))
            with self.path.open("a", encoding="utf-8") as fh:
                fh.write(line + "\n")
                fh.flush()
                os.fsync(fh.fileno())
            return self._sequence


def iter_events(
    path: Union[str, Path], after_sequence: int = 0
) -> Iterator[tuple[dict, int, int]]:
    """Yield ``(event, byte_offset, line_number)`` from a log file in order.

    Enforces the envelope shape and the gapless sequence contract; any
    malformed or truncated line aborts with ReplayError.  ``after_sequence``
    skips events at or below that sequence number (still validating order).
    A missing file is an empty log: the file only appears on first append.
    """
    path = Path(path)
    if not path.exists():
        if after_sequence > 0:
            raise ReplayError(
                f"log ends at sequence 0, cannot resume from {after_sequence}"
            )
        return
    offset = 0
    expected = None
    with path.open("rb") as fh:
        for line_number, raw in enumerate(fh, start=1):
            line_offset = offset
            offset += len(raw)
            text = raw.decode("utf-8", errors="replace")
            if not raw.endswith(b"\n"):
                # Final line without newline: accept only if it parses whole.
                try:
                    event = json.loads(text)
                except json.JSONDecodeError as exc:
                    raise ReplayError(
                        f"truncated event at line {line_number}, byte offset "
                        f"{line_offset}: {exc.msg}",
                        line_number=line_number,
                        byte_offset=line_offset,
                    ) from exc
            else:
                if not text.strip():
                    raise ReplayError(
                        f"blank line in event log at line {line_number}, "
                        f"byte offset {line_offset}",
                        line_number=line_number,
                        byte_offset=line_offset,
                    )
                try:
                    event = json.loads(text)
                except json.JSONDecodeError as exc:
                    raise ReplayError(
                        f"corrupt event at line {line_number}, byte offset "
                        f"{line_offset}: {exc.msg}",
                        line_number=line_number,
                        byte_offset=line_offset,
                    ) from exc
            if (
                not isinstance(event, dict)
                or not isinstance(event.get("sequence_number"), int)
                or event.get("kind") not in EVENT_KINDS
                or not isinstance(event.get("payload"), dict)
                or not isinstance(event.get("turn"), int)
            ):
                raise ReplayError(
                    f"malformed event envelope at line {line_number}, "
                    f"byte offset {line_offset}",
                    line_number=line_number,
                    byte_offset=line_offset,
                )
            seq = event["sequence_number"]
            if expected is None:
                if seq != 1:
                    raise ReplayError(
                        f"event log must start at sequence 1, found {seq}",
                        line_number=line_number,
                        byte_offset=line_offset,
                    )
                expected = seq
            if seq != expected:
                raise ReplayError(
                    f"sequence gap at line {line_number}: expected "
                    f"{expected}, found {seq}",
                    line_number=line_number,
                    byte_offset=line_offset,
                )
            expected = seq + 1
            if seq > after_sequence:
                yield event, line_offset, line_number
    last = 0 if expected is None else expected - 1
    if after_sequence > last:
        raise ReplayError(
            f"log ends at sequence {last}, cannot resume from {after_sequence}"
        )


def latest_snapshot(data_dir: Union[str, Path]) -> Optional[tuple[int, Path]]:
    """(sequence_number, path) of the newest snapshot file, or None."""
    data_dir = Path(data_dir)
    best: Optional[tuple[int, Path]] = None
    if not data_dir.is_dir():
        return None
    for child in data_dir.iterdir():
        match = SNAPSHOT_RE.match(child.name)
        if match:
            seq = int(match.group(1))
            if best is None or seq > best[0]:
                best = (seq, child)
    return best


def write_snapshot(data_dir: Union[str, Path], sequence: int, state: dict) -> Path:
    """Write ``snapshot-{seq}.json`` atomically (write + rename)."""
    data_dir = Path(data_dir)
    data_dir.mkdir(parents=True, exist_ok=True)
    path = data_dir / f"snapshot-{sequence:08d}.json"
    payload = {"sequence_number": sequence, "state": state}
    tmp = path.with_suffix(".json.tmp")
    tmp.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    tmp.replace(path)
    return path


def read_snapshot(path: Union[str, Path]) -> tuple[int, dict]:
    data = json.loads(Path(path).read_text())
    if not isinstance(data, dict) or "sequence_number" not in data or "state" not in data:
        raise ReplayError(f"snapshot file {path} is malformed")
    return int(data["sequence_number"]), data["state"]
