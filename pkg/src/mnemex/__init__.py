"""mnemex: hybrid episodic/semantic memory with utility-scored decay.

The pieces compose bottom-up: scoring math -> episodic/semantic stores ->
decay engine + consolidation -> context assembly strategies -> simulation
harness -> curation HTTP service -> CLI.  Everything is deterministic by
construction (hash embeddings, seeded scripts, exact search), so identical
inputs give identical outputs everywhere.
"""

from .consolidate import (
    ExtractiveSummarizer,
    LlmSummarizer,
    LlmSummarizerConfig,
    SummarizerPort,
    consolidate_entry,
    first_sentence,
    summarize_extractive,
)
from .decay import DecayReport, maybe_run_decay, run_decay, score_all
from .embedding import DEFAULT_DIMENSION, hashed_embedding, tokenize
from .episodic import EpisodicStore, SearchHit
from .persistence import EventLog, ReplayError, iter_events, latest_snapshot, read_snapshot, write_snapshot
from .scoring import (
    DecayConfig,
    MemoryEntry,
    MemoryKind,
    ScoreBreakdown,
    TaskContext,
    cosine_similarity,
    normalize_user_utility,
    recency,
    relevance,
    utility_score,
)
from .semantic import SemanticFact, SemanticStore
from .service import (
    DecayInProgress,
    MemoryService,
    ServiceConfig,
    create_app,
    replay_service,
)
from .simulate import (
    CURVE_GENERATORS,
    MetricsReport,
    Scenario,
    ScenarioError,
    ScenarioFact,
    ScenarioFeedback,
    ScenarioProbe,
    SimConfig,
    canonical_scenario,
    canonical_scenario_path,
    compare_strategies,
    export_curves,
    export_reports_csv,
    export_reports_json,
    load_scenario,
    run_scenario,
    simulate_all_add_curve,
    simulate_fixed_curve,
    simulate_hybrid_curve,
)
from .strategies import (
    BasicRAG,
    BundleItem,
    ContextBundle,
    Hybrid,
    SlidingWindow,
    StrategyKind,
    assemble_basic_rag,
    assemble_hybrid,
    assemble_sliding_window,
    token_count,
)

__version__ = "0.1.0"

__all__ = [
    "BasicRAG",
    "BundleItem",
    "CURVE_GENERATORS",
    "ContextBundle",
    "DecayConfig",
    "DecayInProgress",
    "DecayReport",
    "DEFAULT_DIMENSION",
    "EpisodicStore",
    "EventLog",
    "ExtractiveSummarizer",
    "Hybrid",
    "LlmSummarizer",
    "LlmSummarizerConfig",
    "MemoryEntry",
    "MemoryKind",
    "MemoryService",
    "MetricsReport",
    "ReplayError",
    "Scenario",
    "ScenarioError",
    "ScenarioFact",
    "ScenarioFeedback",
    "ScenarioProbe",
    "ScoreBreakdown",
    "SearchHit",
    "SemanticFact",
    "SemanticStore",
    "ServiceConfig",
    "SimConfig",
    "SlidingWindow",
    "StrategyKind",
    "SummarizerPort",
    "TaskContext",
    "assemble_basic_rag",
    "assemble_hybrid",
    "assemble_sliding_window",
    "canonical_scenario",
    "canonical_scenario_path",
    "compare_strategies",
    "consolidate_entry",
    "cosine_similarity",
    "create_app",
    "export_curves",
    "export_reports_csv",
    "export_reports_json",
    "first_sentence",
    "hashed_embedding",
    "iter_events",
    "latest_snapshot",
    "load_scenario",
    "maybe_run_decay",
    "normalize_user_utility",
    "read_snapshot",
    "recency",
    "relevance",
    "replay_service",
    "run_decay",
    "run_scenario",
    "score_all",
    "write_snapshot",
    "simulate_all_add_curve",
    "simulate_fixed_curve",
    "simulate_hybrid_curve",
    "summarize_extractive",
    "token_count",
    "tokenize",
    "utility_score",
]
