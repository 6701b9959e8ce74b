"""Run metrics: a canonical summary record plus segregated wall-clock timings.

The canonical part holds integers only and is a pure function of the event
log and config, so determinism checks can byte-compare it. Wall-clock
figures live in a separate timing mapping that never enters the canonical
record.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .comparator import Verdict
from .engine import EngineReport, OrderingEngine
from .errors import InvalidLog, MrvError
from .eventlog import Event, RunConfig, encode_record
from .linearizer import SliceOrder
from .oracle import diff_reports, oracle_evaluate

_VERDICT_FIELDS = {
    Verdict.EDGE_FORWARD: "edges",
    Verdict.EDGE_BACKWARD: "edges",
    Verdict.ABSTAIN_TRUNCATED: "abstain_truncated",
    Verdict.ABSTAIN_CONFLICT: "abstain_conflict",
    Verdict.ABSTAIN_NO_SIGNAL: "abstain_no_signal",
}


@dataclass
class RunMetrics:
    canonical: dict
    timing: dict

    def record_bytes(self) -> bytes:
        return encode_record(self.canonical)


def preserved_enforceable(order: SliceOrder) -> int:
    position = {d: i for i, d in enumerate(order.ordered)}
    return sum(1 for a, b in order.enforceable_svp
               if position[a] < position[b])


def compute_metrics(report: EngineReport, timings: Optional[dict] = None
                    ) -> RunMetrics:
    counts = {"edges": 0, "abstain_truncated": 0, "abstain_conflict": 0,
              "abstain_no_signal": 0}
    for verdict in report.verdicts.values():
        counts[_VERDICT_FIELDS[verdict]] += 1

    mature_members = 0
    settled_members = 0
    delivered = 0
    for members in report.slices.values():
        delivered += len(members)
        for d in members:
            stop = report.stops.get(d)
            if stop is not None:
                settled_members += 1
                mature_members += int(stop[1])

    delay_total = 0
    delay_max = 0
    enforceable = 0
    preserved = 0
    for order in report.orders:
        members = report.slices[order.slice_index]
        sealing = max(report.stops[d][0] for d in members)
        max_birth = max(report.births[d] for d in members)
        delay = sealing - max_birth
        delay_total += delay
        delay_max = max(delay_max, delay)
        enforceable += len(order.enforceable_svp)
        preserved += preserved_enforceable(order)

    canonical = {
        "kind": "metrics",
        "n": report.config.n,
        "f": report.config.f,
        "w_max": report.config.w_max,
        "seed": report.config.seed,
        "rounds": report.last_round + 1,
        "aufs_committed": report.committed,
        "aufs_delivered": delivered,
        "slices_delivered": len(report.slices),
        "slices_sealed": len(report.orders),
        "pair_evaluations": len(report.verdicts),
        "mature_members": mature_members,
        "settled_members": settled_members,
        "sealing_delay_total": delay_total,
        "sealing_delay_max": delay_max,
        "enforceable_edges": enforceable,
        "preserved_edges": preserved,
        **counts,
    }
    timing = dict(timings or {})
    timing["total"] = sum(timing.values())
    return RunMetrics(canonical, timing)


@dataclass
class ExperimentResult:
    metrics: RunMetrics
    report: EngineReport
    orders: list[SliceOrder]
    discrepancies: list[str]


def run_experiment(config: RunConfig, events: Iterable[Event],
                   verify: bool = True,
                   on_sealed=None) -> ExperimentResult:
    """Replay a stream through the engine, derive metrics, optionally
    cross-check every decision against the reference evaluation."""
    events = list(events)
    engine = OrderingEngine(config, on_sealed=on_sealed)
    try:
        report = engine.run(events)
    except MrvError as exc:
        raise InvalidLog(str(exc)) from exc
    metrics = compute_metrics(report, engine.timings)
    discrepancies: list[str] = []
    if verify:
        discrepancies = diff_reports(report, oracle_evaluate(config, events))
    return ExperimentResult(metrics, report, report.orders, discrepancies)
