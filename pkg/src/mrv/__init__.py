"""Deterministic post-consensus ordering layer over committed DAGs.

The engine turns a replayable committed-output stream (rounds of canonical
vertices plus delivered execution slices) into slice-local total orders:
creator-level visibility accumulates per round, each unit settles at a
quorum or at the observation cap, same-slice pairs freeze a four-way
verdict over their post-coexistence window, and sealed slices are
linearized through cycle condensation with a deterministic completion key.
A seeded simulator produces adversarial streams and a brute-force reference
evaluation recomputes every decision from first principles.
"""

from .comparator import PairRecord, PairTracker, Verdict, evaluate_pair
from .dag import AufMeta, DagStore, compute_digest, completion_key, make_auf
from .engine import EngineReport, OrderingEngine, run_engine
from .eventlog import (
    EventLogWriter,
    RoundCommitted,
    RunConfig,
    SliceDelivered,
    StreamValidator,
    load_event_log,
    save_event_log,
    validate_stream,
)
from .linearizer import (
    PrecedenceGraph,
    SliceOrder,
    build_precedence_graph,
    condense_and_linearize,
    slice_sealing_time,
)
from .metrics import RunMetrics, compute_metrics, run_experiment
from .oracle import OracleReport, diff_reports, oracle_evaluate
from .output import OutputLogWriter, load_output_log
from .scenarios import CATALOG, targeted_scenario
from .simulator import (
    ConflictInjector,
    Honest,
    SelectiveParents,
    SimPlan,
    SplitMix64,
    WithholdRounds,
    generate,
)
from .visibility import VisibilityProfile, VisibilityTracker

__version__ = "0.1.0"

__all__ = [
    "AufMeta", "CATALOG", "ConflictInjector", "DagStore", "EngineReport",
    "EventLogWriter", "Honest", "OracleReport", "OrderingEngine",
    "OutputLogWriter", "PairRecord", "PairTracker", "PrecedenceGraph",
    "RoundCommitted", "RunConfig", "RunMetrics", "SelectiveParents",
    "SimPlan", "SliceDelivered", "SliceOrder", "SplitMix64",
    "StreamValidator", "Verdict", "VisibilityProfile", "VisibilityTracker",
    "WithholdRounds", "build_precedence_graph", "compute_digest",
    "completion_key", "compute_metrics", "condense_and_linearize",
    "diff_reports", "evaluate_pair", "generate", "load_event_log",
    "load_output_log", "make_auf", "oracle_evaluate", "run_engine",
    "run_experiment", "save_event_log", "slice_sealing_time",
    "targeted_scenario", "validate_stream",
]
