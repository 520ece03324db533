"""Consolidation: distill episodic entries into compact semantic facts.

The default summarizer is purely extractive — the first sentence of each
entry, joined with "; ", truncated at a sentence boundary once the output
budget is hit.  It never invents a token, which keeps the whole pipeline
deterministic and auditable.  An LLM-backed summarizer can be plugged in
behind the same port but stays disabled unless explicitly configured; nothing
in the engine or the tests depends on it.
"""

from __future__ import annotations

import json
import re
import urllib.request
from dataclasses import dataclass
from typing import Optional, Protocol, Sequence

from .episodic import EpisodicStore
from .scoring import MemoryEntry
from .semantic import SemanticStore

DEFAULT_MAX_OUTPUT_CHARS = 280

# A sentence ends at '.', '!' or '?' followed by whitespace or end-of-text.
_SENTENCE_END_RE = re.compile(r"[.!?](?=\s|$)")


class SummarizerPort(Protocol):
    def summarize(self, entries: Sequence[MemoryEntry]) -> str: ...


def first_sentence(text: str) -> str:
    """The first sentence of ``text`` (terminator included), or the whole
    stripped text when no terminator exists."""
    stripped = text.strip()
    match = _SENTENCE_END_RE.search(stripped)
    if match is None:
        return stripped
    return stripped[: match.end()]


def summarize_extractive(
    entries: Sequence[MemoryEntry],
    max_output_chars: int = DEFAULT_MAX_OUTPUT_CHARS,
) -> str:
    """First sentence of each entry, '; '-joined, within ``max_output_chars``.

    Truncation drops whole trailing sentences rather than cutting mid-token.
    Degenerate case: if even the first sentence overruns the budget, it is cut
    back to the last whole word that fits (still substring-derived — the
    output never contains a token absent from the inputs).
    """
    if not entries:
        raise ValueError("cannot summarize an empty entry list")
    if max_output_chars < 1:
        raise ValueError("max_output_chars must be >= 1")
    sentences = []
    for entry in entries:
        if not entry.content or not entry.content.strip():
            raise ValueError(f"entry {entry.id} has empty content")
        sentences.append(first_sentence(entry.content))
    out = sentences[0]
    for sentence in sentences[1:]:
        candidate = f"{out}; {sentence}"
        if len(candidate) > max_output_chars:
            break
        out = candidate
    if len(out) > max_output_chars:
        cut = out[:max_output_chars]
        # Back off to a word boundary, but only if the cut actually split a
        # token (a cut landing exactly on a space keeps the whole prefix).
        if not cut.endswith(" ") and out[len(cut)] != " " and " " in cut:
            cut = cut[: cut.rfind(" ")]
        out = cut.rstrip() or out[:max_output_chars]
    return out


@dataclass(frozen=True)
class ExtractiveSummarizer:
    max_output_chars: int = DEFAULT_MAX_OUTPUT_CHARS

    def summarize(self, entries: Sequence[MemoryEntry]) -> str:
        return summarize_extractive(entries, self.max_output_chars)


@dataclass(frozen=True)
class LlmSummarizerConfig:
    endpoint: str = ""
    model: str = ""
    prompt_template: str = "Summarize the following notes in one sentence:\n{notes}"
    timeout_seconds: float = 10.0


class LlmSummarizer:
    """HTTP-backed summarizer behind the same port. Disabled by default:
    calling it without an endpoint raises instead of quietly degrading."""

    def __init__(self, config: Optional[LlmSummarizerConfig] = None):
        self.config = config or LlmSummarizerConfig()

    def summarize(self, entries: Sequence[MemoryEntry]) -> str:
        if not self.config.endpoint:
            raise RuntimeError(
                "LlmSummarizer is not configured; set an endpoint or use "
                "ExtractiveSummarizer"
            )
        notes = "\n".join(e.content for e in entries)
        body = json.dumps(
            {"model": self.config.model,
             "prompt": self.config.prompt_template.format(notes=notes)}
        ).encode("utf-8")
        request = urllib.request.Request(
            self.config.endpoint, data=body,
            headers={"Content-Type": "application/json"},
        )
        with urllib.request.urlopen(request, timeout=self.config.timeout_seconds) as resp:
            payload = json.loads(resp.read().decode("utf-8"))
        text = payload.get("summary", "")
        if not text:
            raise RuntimeError("LLM summarizer returned an empty summary")
        return text


def consolidate_entry(
    entry_id: int,
    episodic: EpisodicStore,
    semantic: SemanticStore,
    summarizer: Optional[SummarizerPort] = None,
    created_turn: Optional[int] = None,
) -> int:
    """Distill one episodic entry into a semantic fact; returns the fact id.

    The entry itself is left in place — whether it subsequently gets deleted
    (decay) or down-rated (curation UI) is the caller's policy, not ours.
    Consolidating the same entry twice dedups to the same fact id.
    """
    entry = episodic.get(entry_id)  # raises KeyError for unknown ids
    summarizer = summarizer or ExtractiveSummarizer()
    text = summarizer.summarize([entry])
    if not text or not text.strip():
        raise ValueError(f"summarizer produced empty text for entry {entry_id}")
    turn = episodic.turn if created_turn is None else created_turn
    return semantic.add_fact(text, [entry_id], created_turn=turn)
