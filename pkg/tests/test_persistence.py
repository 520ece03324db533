"""Event log and snapshots.  The contract that matters: append-only JSON
lines, gapless sequence from 1, and any corruption surfaces as a ReplayError
that names where (line and byte offset) — never as silently skipped data."""

import json

import pytest

from mnemex.persistence import (
    EVENTS_FILENAME,
    EventLog,
    ReplayError,
    iter_events,
    latest_snapshot,
    read_snapshot,
    write_snapshot,
)


def _log_with(tmp_path, n):
    log = EventLog(tmp_path)
    for i in range(1, n + 1):
        log.append("insert", turn=i, payload={"entry_id": i - 1, "content": f"e{i}"})
    return log


def test_append_assigns_gapless_sequence(tmp_path):
    log = _log_with(tmp_path, 3)
    assert log.sequence == 3
    events = [e for e, _, _ in iter_events(log.path)]
    assert [e["sequence_number"] for e in events] == [1, 2, 3]
    assert events[0]["kind"] == "insert"
    assert events[0]["payload"]["content"] == "e1"


def test_one_json_object_per_line(tmp_path):
    log = _log_with(tmp_path, 2)
    lines = log.path.read_text().splitlines()
    assert len(lines) == 2
    for line in lines:
        json.loads(line)  # every line parses in isolation


def test_reopening_resumes_sequence(tmp_path):
    _log_with(tmp_path, 4)
    log = EventLog(tmp_path)
    assert log.sequence == 4
    log.append("turn_advance", turn=9, payload={"turn": 9})
    assert log.sequence == 5


def test_unknown_kind_rejected_on_append(tmp_path):
    log = EventLog(tmp_path)
    with pytest.raises(ValueError):
        log.append("reticulate", turn=0, payload={})


def test_empty_log_yields_nothing(tmp_path):
    log = EventLog(tmp_path)
    assert list(iter_events(log.path)) == []


def test_missing_file_yields_nothing(tmp_path):
    assert list(iter_events(tmp_path / EVENTS_FILENAME)) == []


def test_corrupt_middle_line_reports_position(tmp_path):
    log = _log_with(tmp_path, 3)
    lines = log.path.read_bytes().splitlines(keepends=True)
    garbage = b'{"sequence_number": 2, "kind": oops\n'
    log.path.write_bytes(lines[0] + garbage + lines[2])
    with pytest.raises(ReplayError) as excinfo:
        list(iter_events(log.path))
    assert excinfo.value.line_number == 2
    assert excinfo.value.byte_offset == len(lines[0])


def test_truncated_final_line_reports_byte_offset(tmp_path):
    log = _log_with(tmp_path, 2)
    data = log.path.read_bytes()
    cut = data[:-10]  # knock the tail off the final event
    log.path.write_bytes(cut)
    with pytest.raises(ReplayError) as excinfo:
        list(iter_events(log.path))
    first_line_len = data.splitlines(keepends=True)[0]
    assert excinfo.value.byte_offset == len(first_line_len)
    assert excinfo.value.line_number == 2


def test_blank_line_rejected(tmp_path):
    log = _log_with(tmp_path, 2)
    lines = log.path.read_bytes().splitlines(keepends=True)
    log.path.write_bytes(lines[0] + b"\n" + lines[1])
    with pytest.raises(ReplayError):
        list(iter_events(log.path))


def test_sequence_gap_detected(tmp_path):
    log = _log_with(tmp_path, 3)
    lines = log.path.read_bytes().splitlines(keepends=True)
    log.path.write_bytes(lines[0] + lines[2])  # drop sequence 2
    with pytest.raises(ReplayError) as excinfo:
        list(iter_events(log.path))
    assert "gap" in str(excinfo.value)


def test_log_must_start_at_one(tmp_path):
    log = _log_with(tmp_path, 2)
    lines = log.path.read_bytes().splitlines(keepends=True)
    log.path.write_bytes(lines[1])
    with pytest.raises(ReplayError):
        list(iter_events(log.path))


def test_after_sequence_skips_but_still_validates(tmp_path):
    log = _log_with(tmp_path, 5)
    events = [e for e, _, _ in iter_events(log.path, after_sequence=3)]
    assert [e["sequence_number"] for e in events] == [4, 5]


def test_resume_past_end_is_an_error(tmp_path):
    log = _log_with(tmp_path, 2)
    with pytest.raises(ReplayError):
        list(iter_events(log.path, after_sequence=7))


def test_envelope_shape_enforced(tmp_path):
    path = tmp_path / EVENTS_FILENAME
    path.write_text('{"sequence_number": 1, "kind": "insert"}\n')  # no turn/payload
    with pytest.raises(ReplayError):
        list(iter_events(path))


# -- snapshots -------------------------------------------------------------------


def test_snapshot_round_trip(tmp_path):
    state = {"turn": 5, "entries": [{"id": 0}], "nested": {"a": [1, 2]}}
    path = write_snapshot(tmp_path, 12, state)
    assert path.name == "snapshot-00000012.json"
    seq, loaded = read_snapshot(path)
    assert seq == 12
    assert loaded == state


def test_latest_snapshot_picks_highest_sequence(tmp_path):
    write_snapshot(tmp_path, 3, {"x": 1})
    write_snapshot(tmp_path, 11, {"x": 2})
    write_snapshot(tmp_path, 7, {"x": 3})
    found = latest_snapshot(tmp_path)
    assert found is not None
    seq, path = found
    assert seq == 11
    assert path.name == "snapshot-00000011.json"


def test_latest_snapshot_none_when_absent(tmp_path):
    assert latest_snapshot(tmp_path) is None


def test_snapshot_write_leaves_no_temp_files(tmp_path):
    write_snapshot(tmp_path, 1, {"x": 1})
    names = [p.name for p in tmp_path.iterdir()]
    assert names == ["snapshot-00000001.json"]
