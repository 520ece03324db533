"""Deterministic simulation harness: curves and scripted scenario runs.

Two unrelated kinds of "simulation" live here on purpose, because they share
config and export plumbing:

* Closed-form performance curves for three memory regimes (keep-everything,
  fixed baseline, hybrid with decay), exported as (turn, value) series.
* A scripted multi-turn scenario run where a deterministic rule-based agent
  answers probe questions purely from its assembled context bundle.  No model
  sits in the loop, so the memory strategy is the only causal factor and
  identical seeds reproduce identical reports byte for byte.

The scripted agent's rule: answer a probe with the most recent *value*
statement for the probed key visible anywhere in the bundle; if no value
statement is visible, answer with the most recent visible distractor (scored
as a contradiction); otherwise abstain.  An answer is correct iff it equals
the newest value introduced at or before the probe turn.
"""

from __future__ import annotations

import csv
import json
import math
import random
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence, Union

from .consolidate import ExtractiveSummarizer, consolidate_entry
from .decay import maybe_run_decay
from .embedding import DEFAULT_DIMENSION, hashed_embedding
from .episodic import EpisodicStore
from .scoring import DecayConfig, MemoryKind, TaskContext
from .semantic import SemanticStore
from .strategies import (
    BasicRAG,
    ContextBundle,
    Hybrid,
    SlidingWindow,
    StrategyKind,
    assemble_basic_rag,
    assemble_hybrid,
    assemble_sliding_window,
)

SCENARIO_SCHEMA_VERSION = 1

# ---------------------------------------------------------------------------
# performance curves
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SimConfig:
    """Parameters for the closed-form curves.

    Each exported series has ``turns + 1`` points (t = 0 .. turns inclusive).
    ``all_add`` evaluates ``100 * base * exp(-rate * t)`` under its clamp;
    ``hybrid`` applies the drift recurrence ``s += (1 - s) * drift`` t times
    starting from ``base``; ``fixed`` is a flat baseline.
    """

    turns: int = 500
    avg_base_success: float = 0.80
    decay_rate: float = 0.0005
    hybrid_drift: float = 0.0003
    all_add_clamp: tuple[float, float] = (70.0, 90.0)
    hybrid_clamp: tuple[float, float] = (80.0, 94.0)

    def __post_init__(self) -> None:
        if self.turns < 0:
            raise ValueError("turns must be >= 0")
        if not 0.0 <= self.avg_base_success <= 1.0:
            raise ValueError("avg_base_success must be in [0, 1]")
        for name in ("decay_rate", "hybrid_drift"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        for name in ("all_add_clamp", "hybrid_clamp"):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise ValueError(f"{name} bounds are inverted")


def _clamp(value: float, bounds: tuple[float, float]) -> float:
    lo, hi = bounds
    return min(hi, max(lo, value))


def simulate_all_add_curve(config: SimConfig = SimConfig()) -> list[tuple[int, float]]:
    """Success curve for a memory that keeps everything: clutter compounds,
    so success decays exponentially, floored/capped by the clamp."""
    points = []
    for t in range(config.turns + 1):
        raw = config.avg_base_success * math.exp(-config.decay_rate * t) * 100.0
        points.append((t, _clamp(raw, config.all_add_clamp)))
    return points


def simulate_hybrid_curve(config: SimConfig = SimConfig()) -> list[tuple[int, float]]:
    """Success curve for the curated hybrid memory: a small per-turn drift
    toward perfect recall, compounding from the base rate."""
    points = [(0, _clamp(config.avg_base_success * 100.0, config.hybrid_clamp))]
    current = config.avg_base_success
    for t in range(1, config.turns + 1):
        current = current + (1.0 - current) * config.hybrid_drift
        points.append((t, _clamp(current * 100.0, config.hybrid_clamp)))
    return points


def simulate_fixed_curve(config: SimConfig = SimConfig()) -> list[tuple[int, float]]:
    """Flat baseline: a fixed-size memory neither silts up nor improves."""
    value = config.avg_base_success * 100.0
    return [(t, value) for t in range(config.turns + 1)]


CURVE_GENERATORS = {
    "all_add": simulate_all_add_curve,
    "fixed": simulate_fixed_curve,
    "hybrid": simulate_hybrid_curve,
}

# Some legacy illustrations of these curves float around with hand-placed
# interior coordinates (e.g. 82 at t=50 or 94 at t=500 on charts); the
# generators above are the formulas of record and the CSVs reflect them
# exactly.  Recorded here so every export manifest states it.
CURVE_MANIFEST_NOTE = (
    "Series are generated from the formulas in SimConfig's docstring; "
    "hand-placed coordinates seen on legacy illustrations of these curves "
    "(e.g. 82 at t=50, 94 at t=500) do not match the formulas and are not "
    "produced here."
)


def export_curves(config: SimConfig, out_dir: Union[str, Path]) -> list[Path]:
    """Write all_add.csv / fixed.csv / hybrid.csv plus a manifest JSON.

    Each CSV has a header row and ``turns + 1`` data rows of (turn, value).
    Returns the paths written.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, generator in CURVE_GENERATORS.items():
        path = out / f"{name}.csv"
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["turn", "success_percent"])
            for turn, value in generator(config):
                writer.writerow([turn, f"{value:.6f}"])
        written.append(path)
    manifest = {
        "turns": config.turns,
        "avg_base_success": config.avg_base_success,
        "decay_rate": config.decay_rate,
        "hybrid_drift": config.hybrid_drift,
        "all_add_clamp": list(config.all_add_clamp),
        "hybrid_clamp": list(config.hybrid_clamp),
        "series": sorted(CURVE_GENERATORS),
        "rows_per_series": config.turns + 1,
        "note": CURVE_MANIFEST_NOTE,
    }
    manifest_path = out / "curves_manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    written.append(manifest_path)
    return written


# ---------------------------------------------------------------------------
# scripted scenarios
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScenarioFact:
    introduced_turn: int
    key: str
    value: str
    distractor_values: tuple[str, ...] = ()
    distractor_turns: Optional[tuple[int, ...]] = None
    consolidate_on_decay: bool = True


@dataclass(frozen=True)
class ScenarioProbe:
    probe_turn: int
    key: str


@dataclass(frozen=True)
class ScenarioFeedback:
    """A curation action aimed at one scripted statement.

    ``statement`` selects the fact's own value statement or one of its
    distractors; ``fact_index`` picks among facts sharing a key (0-based, in
    introduction order); ``index`` picks the distractor.
    """

    turn: int
    action: str  # pin | forget | consolidate
    key: str
    statement: str = "value"  # value | distractor
    fact_index: int = 0
    index: int = 0


class ScenarioError(ValueError):
    """A scenario file failed validation."""


@dataclass(frozen=True)
class Scenario:
    turns: int
    seed: int
    facts: tuple[ScenarioFact, ...]
    probes: tuple[ScenarioProbe, ...]
    feedback_events: tuple[ScenarioFeedback, ...] = ()
    distractor_gap: int = 20
    hybrid_decay_overrides: dict = field(default_factory=dict)
    schema_version: int = SCENARIO_SCHEMA_VERSION

    # -- construction / validation -------------------------------------

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        if self.schema_version != SCENARIO_SCHEMA_VERSION:
            raise ScenarioError(
                f"unsupported schema_version {self.schema_version}; "
                f"this build reads version {SCENARIO_SCHEMA_VERSION}"
            )
        if self.turns < 1:
            raise ScenarioError("turns must be >= 1")
        if self.distractor_gap < 1:
            raise ScenarioError("distractor_gap must be >= 1")
        facts_by_key: dict[str, list[ScenarioFact]] = {}
        for fact in self.facts:
            if not re.fullmatch(r"[a-z][a-z0-9_]*", fact.key):
                raise ScenarioError(f"bad key {fact.key!r}: lowercase words only")
            if not 1 <= fact.introduced_turn <= self.turns:
                raise ScenarioError(
                    f"fact {fact.key!r} introduced at turn {fact.introduced_turn}, "
                    f"outside 1..{self.turns}"
                )
            if fact.value in fact.distractor_values:
                raise ScenarioError(
                    f"fact {fact.key!r}: value {fact.value!r} duplicated in distractors"
                )
            if fact.distractor_turns is not None and len(fact.distractor_turns) != len(
                fact.distractor_values
            ):
                raise ScenarioError(
                    f"fact {fact.key!r}: distractor_turns length mismatch"
                )
            for turn in self.distractor_schedule(fact):
                if not fact.introduced_turn < turn <= self.turns:
                    raise ScenarioError(
                        f"fact {fact.key!r}: distractor turn {turn} outside "
                        f"({fact.introduced_turn}, {self.turns}]"
                    )
            facts_by_key.setdefault(fact.key, []).append(fact)
        for key, group in facts_by_key.items():
            values = [f.value for f in group]
            if len(set(values)) != len(values):
                raise ScenarioError(f"key {key!r} reuses a value")
            distractors = {d for f in group for d in f.distractor_values}
            if distractors & set(values):
                raise ScenarioError(f"key {key!r}: a distractor equals a value")
        for probe in self.probes:
            group = facts_by_key.get(probe.key)
            if not group:
                raise ScenarioError(f"probe references unknown key {probe.key!r}")
            first = min(f.introduced_turn for f in group)
            if not first < probe.probe_turn <= self.turns:
                raise ScenarioError(
                    f"probe for {probe.key!r} at turn {probe.probe_turn} must fall in "
                    f"({first}, {self.turns}]"
                )
        for fb in self.feedback_events:
            if fb.action not in ("pin", "forget", "consolidate"):
                raise ScenarioError(f"unknown feedback action {fb.action!r}")
            if fb.statement not in ("value", "distractor"):
                raise ScenarioError(f"unknown feedback statement {fb.statement!r}")
            group = facts_by_key.get(fb.key)
            if not group or not 0 <= fb.fact_index < len(group):
                raise ScenarioError(
                    f"feedback references unknown fact {fb.key!r}[{fb.fact_index}]"
                )
            fact = group[fb.fact_index]
            if fb.statement == "value":
                stated = fact.introduced_turn
            else:
                schedule = self.distractor_schedule(fact)
                if not 0 <= fb.index < len(schedule):
                    raise ScenarioError(
                        f"feedback references missing distractor {fb.index} "
                        f"of {fb.key!r}"
                    )
                stated = schedule[fb.index]
            if not stated <= fb.turn <= self.turns:
                raise ScenarioError(
                    f"feedback at turn {fb.turn} precedes its statement (turn {stated})"
                )

    def distractor_schedule(self, fact: ScenarioFact) -> tuple[int, ...]:
        """Turns on which a fact's distractors are uttered: explicit turns if
        the fact carries them, else introduced_turn + (j+1) * distractor_gap."""
        if fact.distractor_turns is not None:
            return fact.distractor_turns
        return tuple(
            fact.introduced_turn + (j + 1) * self.distractor_gap
            for j in range(len(fact.distractor_values))
        )

    def truth(self, key: str, turn: int) -> str:
        """The newest value introduced for ``key`` at or before ``turn``."""
        best = None
        for fact in self.facts:
            if fact.key == key and fact.introduced_turn <= turn:
                if best is None or fact.introduced_turn > best.introduced_turn:
                    best = fact
        if best is None:
            raise ScenarioError(f"no value for key {key!r} at turn {turn}")
        return best.value

    # -- (de)serialization ----------------------------------------------

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "turns": self.turns,
            "seed": self.seed,
            "distractor_gap": self.distractor_gap,
            "hybrid_decay_overrides": dict(self.hybrid_decay_overrides),
            "facts": [
                {
                    "introduced_turn": f.introduced_turn,
                    "key": f.key,
                    "value": f.value,
                    "distractor_values": list(f.distractor_values),
                    **(
                        {"distractor_turns": list(f.distractor_turns)}
                        if f.distractor_turns is not None
                        else {}
                    ),
                    "consolidate_on_decay": f.consolidate_on_decay,
                }
                for f in self.facts
            ],
            "probes": [
                {"probe_turn": p.probe_turn, "key": p.key} for p in self.probes
            ],
            "feedback_events": [
                {
                    "turn": fb.turn,
                    "action": fb.action,
                    "key": fb.key,
                    "statement": fb.statement,
                    "fact_index": fb.fact_index,
                    "index": fb.index,
                }
                for fb in self.feedback_events
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Scenario":
        try:
            facts = tuple(
                ScenarioFact(
                    introduced_turn=int(f["introduced_turn"]),
                    key=str(f["key"]),
                    value=str(f["value"]),
                    distractor_values=tuple(str(d) for d in f.get("distractor_values", [])),
                    distractor_turns=(
                        tuple(int(t) for t in f["distractor_turns"])
                        if f.get("distractor_turns") is not None
                        else None
                    ),
                    consolidate_on_decay=bool(f.get("consolidate_on_decay", True)),
                )
                for f in data["facts"]
            )
            probes = tuple(
                ScenarioProbe(probe_turn=int(p["probe_turn"]), key=str(p["key"]))
                for p in data["probes"]
            )
            feedback = tuple(
                ScenarioFeedback(
                    turn=int(fb["turn"]),
                    action=str(fb["action"]),
                    key=str(fb["key"]),
                    statement=str(fb.get("statement", "value")),
                    fact_index=int(fb.get("fact_index", 0)),
                    index=int(fb.get("index", 0)),
                )
                for fb in data.get("feedback_events", [])
            )
            return cls(
                schema_version=int(data.get("schema_version", -1)),
                turns=int(data["turns"]),
                seed=int(data.get("seed", 0)),
                distractor_gap=int(data.get("distractor_gap", 20)),
                hybrid_decay_overrides=dict(data.get("hybrid_decay_overrides", {})),
                facts=facts,
                probes=probes,
                feedback_events=feedback,
            )
        except (KeyError, TypeError) as exc:
            raise ScenarioError(f"malformed scenario: {exc}") from exc

    def hybrid_strategy(self, window_turns: int = 10) -> Hybrid:
        """The Hybrid strategy this scenario's feedback schedule was tuned
        for: package defaults with the scenario's decay overrides applied."""
        config = DecayConfig.from_dict(
            {**DecayConfig().to_dict(), **self.hybrid_decay_overrides}
        )
        return Hybrid(decay_config=config, window_turns=window_turns)


def load_scenario(path: Union[str, Path]) -> Scenario:
    raw = Path(path).read_text()
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"scenario file {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ScenarioError(f"scenario file {path} must hold a JSON object")
    return Scenario.from_dict(data)


def canonical_scenario() -> Scenario:
    """The versioned scenario fixture shipped with the package."""
    data = json.loads(
        resources.files("mnemex").joinpath("scenarios/canonical.json").read_text()
    )
    return Scenario.from_dict(data)


def canonical_scenario_path() -> Path:
    """Filesystem path of the shipped canonical scenario (for the CLI)."""
    return Path(str(resources.files("mnemex").joinpath("scenarios/canonical.json")))


# ---------------------------------------------------------------------------
# the scripted run itself
# ---------------------------------------------------------------------------

_FILLER_TEMPLATES: dict[MemoryKind, tuple[str, ...]] = {
    MemoryKind.USER_MESSAGE: (
        "Morning sync went fine, nothing blocking on my end today.",
        "Could you file the notes from the earlier discussion somewhere safe?",
        "No new requests right now, keep going with the current plan.",
        "Quick check-in: everything still on track for this week?",
    ),
    MemoryKind.TOOL_CALL: (
        "Ran the nightly verification pass {a}: {b} warnings, zero failures, logs archived.",
        "Executed housekeeping job {a} across {b} modules without incident.",
    ),
    MemoryKind.OBSERVATION: (
        "Background job {a} finished after {b} seconds with a clean exit code.",
        "Queue depth held steady near {b} during measurement interval {a}.",
    ),
    MemoryKind.AGENT_ACTION: (
        "Drafted a short recap of recent activity and filed it under running notes.",
        "Reorganized the working notes and archived {a} stale reminders.",
    ),
}

# Turn t without scheduled events gets one filler whose kind cycles so a user
# message shows up every fourth turn (turn 1 included — the task vector must
# exist from the first turn).
_FILLER_KIND_CYCLE = (
    MemoryKind.AGENT_ACTION,
    MemoryKind.USER_MESSAGE,
    MemoryKind.TOOL_CALL,
    MemoryKind.OBSERVATION,
)


@dataclass(frozen=True)
class _ScriptEvent:
    kind: MemoryKind
    text: str
    # ("value", key, fact_index) / ("distractor", key, fact_index, j) / None
    label: Optional[tuple] = None
    consolidation_flag: bool = False


def _statement_text(key: str, value: str) -> str:
    return f"The {key} is {value}."


def _probe_text(key: str) -> str:
    return f"What is the {key}? Please restate the {key}."


def compile_script(scenario: Scenario) -> dict[int, list[_ScriptEvent]]:
    """Expand a scenario into per-turn events, filler included.

    Deterministic: filler text comes from an RNG seeded with scenario.seed,
    and scheduled events are emitted in a fixed order (facts before
    distractors before probes within a turn).
    """
    rng = random.Random(scenario.seed)
    script: dict[int, list[_ScriptEvent]] = {t: [] for t in range(1, scenario.turns + 1)}

    facts_by_key: dict[str, list[ScenarioFact]] = {}
    for fact in scenario.facts:
        facts_by_key.setdefault(fact.key, []).append(fact)

    for key in sorted(facts_by_key):
        for fact_index, fact in enumerate(facts_by_key[key]):
            script[fact.introduced_turn].append(
                _ScriptEvent(
                    kind=MemoryKind.USER_MESSAGE,
                    text=_statement_text(fact.key, fact.value),
                    label=("value", fact.key, fact_index),
                    consolidation_flag=fact.consolidate_on_decay,
                )
            )
            for j, turn in enumerate(scenario.distractor_schedule(fact)):
                script[turn].append(
                    _ScriptEvent(
                        kind=MemoryKind.OBSERVATION,
                        text=_statement_text(fact.key, fact.distractor_values[j]),
                        label=("distractor", fact.key, fact_index, j),
                    )
                )

    for probe in scenario.probes:
        script[probe.probe_turn].append(
            _ScriptEvent(kind=MemoryKind.USER_MESSAGE, text=_probe_text(probe.key))
        )

    for turn in range(1, scenario.turns + 1):
        if script[turn]:
            continue
        kind = _FILLER_KIND_CYCLE[turn % 4]
        template = rng.choice(_FILLER_TEMPLATES[kind])
        text = template.format(a=rng.randint(100, 999), b=rng.randint(2, 60))
        script[turn].append(_ScriptEvent(kind=kind, text=text))
    return script


@dataclass(frozen=True)
class ProbeOutcome:
    turn: int
    key: str
    expected: str
    answer: Optional[str]
    outcome: str  # correct | contradiction | abstain

    def to_dict(self) -> dict:
        return {
            "turn": self.turn,
            "key": self.key,
            "expected": self.expected,
            "answer": self.answer,
            "outcome": self.outcome,
        }


@dataclass
class MetricsReport:
    strategy: str
    strategy_params: dict
    probe_count: int
    correct_count: int
    contradiction_count: int
    abstain_count: int
    task_completion_rate: float  # percent
    contradiction_rate: float  # percent
    abstain_rate: float  # percent
    avg_token_cost: float
    episodic_size_over_time: list[int]
    decay_runs: int
    feedback_applied: int
    feedback_skipped: int
    probe_outcomes: list[ProbeOutcome]
    config: dict

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy,
            "strategy_params": self.strategy_params,
            "probe_count": self.probe_count,
            "correct_count": self.correct_count,
            "contradiction_count": self.contradiction_count,
            "abstain_count": self.abstain_count,
            "task_completion_rate": self.task_completion_rate,
            "contradiction_rate": self.contradiction_rate,
            "abstain_rate": self.abstain_rate,
            "avg_token_cost": self.avg_token_cost,
            "episodic_size_over_time": list(self.episodic_size_over_time),
            "decay_runs": self.decay_runs,
            "feedback_applied": self.feedback_applied,
            "feedback_skipped": self.feedback_skipped,
            "probe_outcomes": [o.to_dict() for o in self.probe_outcomes],
            "config": self.config,
        }

    def scalar_row(self) -> dict:
        return {
            "strategy": self.strategy,
            "task_completion_rate": round(self.task_completion_rate, 4),
            "avg_token_cost": round(self.avg_token_cost, 4),
            "contradiction_rate": round(self.contradiction_rate, 4),
            "abstain_rate": round(self.abstain_rate, 4),
            "probe_count": self.probe_count,
            "decay_runs": self.decay_runs,
            "final_episodic_size": (
                self.episodic_size_over_time[-1] if self.episodic_size_over_time else 0
            ),
        }


def strategy_name(strategy: StrategyKind) -> str:
    if isinstance(strategy, SlidingWindow):
        return "sliding_window"
    if isinstance(strategy, BasicRAG):
        return "basic_rag"
    if isinstance(strategy, Hybrid):
        return "hybrid"
    raise TypeError(f"unknown strategy {strategy!r}")


def _strategy_params(strategy: StrategyKind) -> dict:
    if isinstance(strategy, SlidingWindow):
        return {"window_turns": strategy.window_turns}
    if isinstance(strategy, BasicRAG):
        return {"k": strategy.k, "window_turns": strategy.window_turns}
    if isinstance(strategy, Hybrid):
        return {
            "k_episodic": strategy.k_episodic,
            "k_semantic": strategy.k_semantic,
            "window_turns": strategy.window_turns,
            "decay_config": strategy.decay_config.to_dict(),
        }
    raise TypeError(f"unknown strategy {strategy!r}")


def _extract_statements(
    bundle: ContextBundle, key: str
) -> list[tuple[int, int, str]]:
    """(turn, bundle position, stated token) for every '<key> is <token>'
    match in the bundle, probe questions excluded by construction."""
    pattern = re.compile(rf"\b{re.escape(key)}\s+is\s+([a-z0-9]+)")
    found = []
    for position, item in enumerate(bundle.items):
        match = pattern.search(item.text.lower())
        if match:
            found.append((item.turn, position, match.group(1)))
    return found


def _answer_probe(
    bundle: ContextBundle, scenario: Scenario, key: str, turn: int
) -> ProbeOutcome:
    values = {
        fact.value.lower() for fact in scenario.facts if fact.key == key
    }
    distractors = {
        d.lower() for fact in scenario.facts if fact.key == key
        for d in fact.distractor_values
    }
    expected = scenario.truth(key, turn).lower()
    value_hits: list[tuple[int, int, str]] = []
    distractor_hits: list[tuple[int, int, str]] = []
    for stated_turn, position, token in _extract_statements(bundle, key):
        if token in values:
            value_hits.append((stated_turn, position, token))
        elif token in distractors:
            distractor_hits.append((stated_turn, position, token))
    if value_hits:
        answer = max(value_hits)[2]
        outcome = "correct" if answer == expected else "contradiction"
    elif distractor_hits:
        answer = max(distractor_hits)[2]
        outcome = "contradiction"
    else:
        answer = None
        outcome = "abstain"
    return ProbeOutcome(turn=turn, key=key, expected=expected, answer=answer, outcome=outcome)


def run_scenario(
    scenario: Scenario,
    strategy: StrategyKind,
    dimension: int = DEFAULT_DIMENSION,
) -> MetricsReport:
    """Run one strategy through the scripted scenario.

    Per turn: insert the scheduled events, apply curation feedback and the
    decay cadence (Hybrid only), assemble the strategy's bundle against the
    most recent user message, then answer any probes from that bundle alone.
    Token cost is averaged over all turns, not just probe turns.
    """
    script = compile_script(scenario)
    is_hybrid = isinstance(strategy, Hybrid)
    n_max = strategy.decay_config.n_max if is_hybrid else DecayConfig().n_max
    store = EpisodicStore(dimension, n_max=n_max)
    semantic = SemanticStore(dimension)
    summarizer = ExtractiveSummarizer()

    feedback_by_turn: dict[int, list[ScenarioFeedback]] = {}
    for fb in scenario.feedback_events:
        feedback_by_turn.setdefault(fb.turn, []).append(fb)
    probes_by_turn: dict[int, list[ScenarioProbe]] = {}
    for probe in scenario.probes:
        probes_by_turn.setdefault(probe.probe_turn, []).append(probe)

    statement_ids: dict[tuple, int] = {}
    last_user_vector = None
    token_costs: list[int] = []
    sizes: list[int] = []
    outcomes: list[ProbeOutcome] = []
    decay_runs = 0
    feedback_applied = 0
    feedback_skipped = 0

    for turn in range(1, scenario.turns + 1):
        store.advance_turn(to=turn)
        for event in script[turn]:
            vector = hashed_embedding(event.text, dimension)
            entry_id = store.insert(
                event.kind,
                event.text,
                vector,
                user_utility=1,
                consolidation_flag=event.consolidation_flag and is_hybrid,
            )
            if event.label is not None:
                statement_ids[event.label] = entry_id
            if event.kind is MemoryKind.USER_MESSAGE:
                last_user_vector = vector

        if is_hybrid:
            for fb in feedback_by_turn.get(turn, ()):
                label = (
                    ("value", fb.key, fb.fact_index)
                    if fb.statement == "value"
                    else ("distractor", fb.key, fb.fact_index, fb.index)
                )
                entry_id = statement_ids.get(label)
                if entry_id is None or entry_id not in store:
                    feedback_skipped += 1
                    continue
                if fb.action == "pin":
                    store.set_user_utility(entry_id, n_max)
                elif fb.action == "forget":
                    store.set_user_utility(entry_id, 0)
                else:  # consolidate
                    consolidate_entry(
                        entry_id, store, semantic, summarizer, created_turn=turn
                    )
                    store.set_user_utility(entry_id, 0)
                feedback_applied += 1
            task = TaskContext(task_vector=last_user_vector, current_turn=turn)
            report = maybe_run_decay(
                turn, store, semantic, task, strategy.decay_config,
                summarizer, task_mode="last_user_message",
            )
            if report is not None:
                decay_runs += 1

        if isinstance(strategy, SlidingWindow):
            bundle = assemble_sliding_window(
                store.get_all_in_time_order(), strategy.window_turns
            )
        elif isinstance(strategy, BasicRAG):
            bundle = assemble_basic_rag(
                store, last_user_vector, strategy.k, strategy.window_turns
            )
        else:
            bundle = assemble_hybrid(
                store, semantic, last_user_vector,
                strategy.k_episodic, strategy.k_semantic, strategy.window_turns,
            )
        token_costs.append(bundle.token_cost)
        sizes.append(len(store))

        for probe in probes_by_turn.get(turn, ()):
            outcomes.append(_answer_probe(bundle, scenario, probe.key, turn))

    probe_count = len(outcomes)
    correct = sum(1 for o in outcomes if o.outcome == "correct")
    contradiction = sum(1 for o in outcomes if o.outcome == "contradiction")
    abstain = sum(1 for o in outcomes if o.outcome == "abstain")
    as_rate = lambda n: (100.0 * n / probe_count) if probe_count else 0.0  # noqa: E731

    return MetricsReport(
        strategy=strategy_name(strategy),
        strategy_params=_strategy_params(strategy),
        probe_count=probe_count,
        correct_count=correct,
        contradiction_count=contradiction,
        abstain_count=abstain,
        task_completion_rate=as_rate(correct),
        contradiction_rate=as_rate(contradiction),
        abstain_rate=as_rate(abstain),
        avg_token_cost=(sum(token_costs) / len(token_costs)) if token_costs else 0.0,
        episodic_size_over_time=sizes,
        decay_runs=decay_runs,
        feedback_applied=feedback_applied,
        feedback_skipped=feedback_skipped,
        probe_outcomes=outcomes,
        config={
            "scenario_seed": scenario.seed,
            "scenario_turns": scenario.turns,
            "dimension": dimension,
            "task_vector_mode": "last_user_message",
        },
    )


def default_strategies(scenario: Scenario) -> list[StrategyKind]:
    """The three comparison strategies at their documented defaults, with the
    scenario's hybrid decay overrides applied."""
    return [SlidingWindow(), BasicRAG(), scenario.hybrid_strategy()]


def compare_strategies(
    scenario: Scenario,
    strategies: Optional[Sequence[StrategyKind]] = None,
    dimension: int = DEFAULT_DIMENSION,
) -> list[MetricsReport]:
    """Run every strategy on identical scripts and fresh stores."""
    chosen = list(strategies) if strategies is not None else default_strategies(scenario)
    return [run_scenario(scenario, strategy, dimension) for strategy in chosen]


SCALAR_COLUMNS = [
    "strategy",
    "task_completion_rate",
    "avg_token_cost",
    "contradiction_rate",
    "abstain_rate",
    "probe_count",
    "decay_runs",
    "final_episodic_size",
]


def export_reports_csv(reports: Sequence[MetricsReport], path: Union[str, Path]) -> Path:
    """One row per strategy, scalar metrics only."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=SCALAR_COLUMNS)
        writer.writeheader()
        for report in reports:
            writer.writerow(report.scalar_row())
    return path


def export_reports_json(reports: Sequence[MetricsReport], path: Union[str, Path]) -> Path:
    """Full reports, series included, in a stable key order."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {"reports": [report.to_dict() for report in reports]}
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return path
