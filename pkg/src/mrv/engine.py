"""Online ordering engine driven by the committed-output event stream.

Processing one committed round: record visibility counts for every active
unit, settle stopping rounds, freeze pair verdicts whose horizons are now
covered, then seal and emit any delivered slice whose sealing round the
frontier has reached. Per-slice state is released at sealing, so active
state stays bounded by the observation cap plus undelivered units.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

from .comparator import PairRecord, PairTracker, Verdict
from .dag import AufMeta, DagStore, Digest, Round, completion_key
from .errors import (
    DuplicateSliceMember,
    MalformedEvent,
    UnknownDigest,
    UnknownSliceMember,
)
from .eventlog import Event, RoundCommitted, RunConfig, SliceDelivered
from .linearizer import SliceOrder, build_precedence_graph, condense_and_linearize
from .visibility import VisibilityTracker


@dataclass
class EngineReport:
    """Everything the engine decided, accumulated for verification and metrics.

    The engine itself releases per-slice state at sealing; this collector is
    what comparisons against the reference evaluation diff.
    """

    config: RunConfig
    committed: int = 0
    last_round: Round = -1
    births: dict[Digest, Round] = field(default_factory=dict)
    creators: dict[Digest, int] = field(default_factory=dict)
    stops: dict[Digest, tuple[Round, bool]] = field(default_factory=dict)
    verdicts: dict[tuple[Digest, Digest], Verdict] = field(default_factory=dict)
    slices: dict[int, tuple[Digest, ...]] = field(default_factory=dict)
    orders: list[SliceOrder] = field(default_factory=list)

    def orders_by_index(self) -> dict[int, SliceOrder]:
        return {order.slice_index: order for order in self.orders}

    def pending_indices(self) -> list[int]:
        sealed = {order.slice_index for order in self.orders}
        return sorted(set(self.slices) - sealed)


@dataclass
class _SliceState:
    index: int
    members: tuple[Digest, ...]  # completion-key order
    delivered_at: Round
    unsettled: int
    seal_round: Round  # max settled member stop round so far


class OrderingEngine:
    """One replica's deterministic interpretation of a committed stream."""

    def __init__(self, config: RunConfig,
                 on_sealed: Optional[Callable[[SliceOrder], None]] = None) -> None:
        self.config = config
        self.on_sealed = on_sealed
        self.store = DagStore()
        self.visibility = VisibilityTracker(config)
        self.pairs = PairTracker(config)
        self.pending: dict[int, _SliceState] = {}
        self.delivered: set[Digest] = set()
        self.next_slice_index = 0
        self._sealed_buffer: dict[int, SliceOrder] = {}
        self._next_emit = 0
        self.report = EngineReport(config)
        self.timings = {"visibility": 0.0, "settle": 0.0, "pairs": 0.0,
                        "seal": 0.0}

    # -- event application ----------------------------------------------

    def apply(self, event: Event) -> list[SliceOrder]:
        """Apply one event; returns slice orders emitted by it."""
        if isinstance(event, RoundCommitted):
            return self._apply_round(event)
        if isinstance(event, SliceDelivered):
            return self._apply_slice(event)
        raise MalformedEvent(f"unsupported event {event!r}")

    def run(self, events: Iterable[Event]) -> EngineReport:
        for event in events:
            self.apply(event)
        return self.report

    def _apply_round(self, event: RoundCommitted) -> list[SliceOrder]:
        previous = -1
        for meta in event.canonical:
            if meta.round != event.round:
                raise MalformedEvent("vertex round differs from event round")
            if not 0 <= meta.creator < self.config.n:
                raise MalformedEvent(f"creator {meta.creator} out of range")
            if meta.creator <= previous:
                raise MalformedEvent(
                    "canonical vertices must be sorted by creator")
            previous = meta.creator
            if event.round > 0 and len(meta.parents) < self.config.quorum:
                raise MalformedEvent(
                    f"certified vertex needs >= {self.config.quorum} parents")
        t0 = time.perf_counter()
        for meta in event.canonical:
            self.store.insert_vertex(meta)
            self.report.births[meta.digest] = meta.round
            self.report.creators[meta.digest] = meta.creator
        self.store.advance_frontier(event.round)
        self.visibility.on_round_committed(event.round, event.canonical,
                                           self.store)
        self.report.committed += len(event.canonical)
        self.report.last_round = event.round
        t1 = time.perf_counter()
        settled = self.visibility.settle_stopping_times(event.round)
        for digest in settled:
            profile = self.visibility.profiles[digest]
            self.report.stops[digest] = (profile.stop_round, profile.mature)
            if profile.slice_index is not None:
                state = self.pending[profile.slice_index]
                state.unsettled -= 1
                state.seal_round = max(state.seal_round, profile.stop_round)
        t2 = time.perf_counter()
        for digest in settled:
            frozen = self.pairs.on_stopping_settled(
                digest, self.visibility.profiles)
            for rec in frozen:
                self.report.verdicts[(rec.a, rec.b)] = rec.verdict
        t3 = time.perf_counter()
        emitted = self.seal_ready_slices(event.round)
        t4 = time.perf_counter()
        self.timings["visibility"] += t1 - t0
        self.timings["settle"] += t2 - t1
        self.timings["pairs"] += t3 - t2
        self.timings["seal"] += t4 - t3
        return emitted

    def _apply_slice(self, event: SliceDelivered) -> list[SliceOrder]:
        if event.index != self.next_slice_index:
            raise MalformedEvent(
                f"expected slice index {self.next_slice_index}, "
                f"got {event.index}")
        if not event.members:
            raise MalformedEvent("empty slice")
        metas: list[AufMeta] = []
        seen: set[Digest] = set()
        for d in event.members:
            if d in seen or d in self.delivered:
                raise DuplicateSliceMember(d.hex())
            seen.add(d)
            try:
                metas.append(self.store.get(d))
            except UnknownDigest:
                raise UnknownSliceMember(d.hex()) from None
        metas.sort(key=completion_key)
        t0 = time.perf_counter()
        unsettled = 0
        seal_round = -1
        for meta in metas:
            profile = self.visibility.assign_slice(meta.digest, event.index)
            if profile.stop_round is None:
                unsettled += 1
            else:
                seal_round = max(seal_round, profile.stop_round)
        state = _SliceState(event.index, tuple(m.digest for m in metas),
                            delivered_at=self.store.frontier,
                            unsettled=unsettled, seal_round=seal_round)
        self.pending[event.index] = state
        self.delivered.update(state.members)
        self.report.slices[event.index] = state.members
        self.next_slice_index += 1
        frozen = self.pairs.register_slice(event.index, metas,
                                           self.visibility.profiles)
        for rec in frozen:
            self.report.verdicts[(rec.a, rec.b)] = rec.verdict
        t1 = time.perf_counter()
        emitted = self.seal_ready_slices(self.store.frontier)
        t2 = time.perf_counter()
        self.timings["pairs"] += t1 - t0
        self.timings["seal"] += t2 - t1
        return emitted

    # -- sealing ----------------------------------------------------------

    def seal_ready_slices(self, frontier: Round) -> list[SliceOrder]:
        """Seal every delivered slice the frontier covers; emit in index order.

        A slice whose sealing round arrives while an earlier slice is still
        open is sealed (and its state released) immediately, but its order
        is buffered so the emitted sequence follows delivery order.
        """
        for index in sorted(self.pending):
            state = self.pending[index]
            if state.unsettled or frontier < state.seal_round:
                continue
            self._seal(state)
        emitted: list[SliceOrder] = []
        while self._next_emit in self._sealed_buffer:
            order = self._sealed_buffer.pop(self._next_emit)
            if self.on_sealed is not None:
                self.on_sealed(order)
            emitted.append(order)
            self._next_emit += 1
        return emitted

    def _seal(self, state: _SliceState) -> None:
        metas = [self.store.get(d) for d in state.members]
        keys = {m.digest: completion_key(m) for m in metas}
        verdicts = self.pairs.verdicts_for_slice(state.index)
        graph = build_precedence_graph(metas, self.store, verdicts)
        sealed_at = max(state.seal_round, state.delivered_at)
        order = condense_and_linearize(graph, keys.__getitem__, state.index,
                                       sealed_at)
        self.visibility.release(state.members)
        self.pairs.drop_slice(state.index)
        del self.pending[state.index]
        self.report.orders.append(order)
        self._sealed_buffer[state.index] = order

    # -- queries ---------------------------------------------------------

    def pairwise_verdict(self, a: Digest, b: Digest) -> Verdict:
        return self.pairs.pairwise_verdict(a, b, self.visibility.profiles)

    def visibility_count(self, x: Digest, t: Round) -> int:
        return self.visibility.visibility(x, t)

    def freeze_ready_pairs(self, frontier: Round) -> list[PairRecord]:
        frozen = self.pairs.freeze_ready_pairs(frontier,
                                               self.visibility.profiles)
        for rec in frozen:
            self.report.verdicts[(rec.a, rec.b)] = rec.verdict
        return frozen

    def active_state_size(self) -> int:
        return self.visibility.active_count() + self.pairs.unfrozen_count()


def run_engine(config: RunConfig, events: Iterable[Event],
               on_sealed: Optional[Callable[[SliceOrder], None]] = None
               ) -> EngineReport:
    engine = OrderingEngine(config, on_sealed=on_sealed)
    return engine.run(events)
