"""Pairwise verdicts from post-coexistence visibility windows.

A pair is compared exactly once, at the first frontier covering both
stopping rounds, and the verdict never changes afterwards. An edge is
issued only for an unopposed strong signal: some round in the window where
one side's creator-level visibility exceeds the other's by more than any
set of f creators could fabricate, with no opposing strong round anywhere
in the window. Everything else is an explicit abstention.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Optional, Sequence

from .dag import AufMeta, Digest, Round, completion_key
from .errors import HorizonNotReached, UnknownAuf, UnsettledStoppingTime
from .eventlog import RunConfig
from .visibility import VisibilityProfile


class Verdict(Enum):
    EDGE_FORWARD = "edge_forward"          # first argument precedes
    EDGE_BACKWARD = "edge_backward"        # second argument precedes
    ABSTAIN_TRUNCATED = "abstain_truncated"
    ABSTAIN_CONFLICT = "abstain_conflict"
    ABSTAIN_NO_SIGNAL = "abstain_no_signal"


EDGE_VERDICTS = (Verdict.EDGE_FORWARD, Verdict.EDGE_BACKWARD)


def evaluate_pair(threshold: int, prof_a: VisibilityProfile,
                  prof_b: VisibilityProfile) -> Verdict:
    """Four-way verdict for (a, b); EDGE_FORWARD means a precedes b.

    Requires both stopping rounds settled and counts recorded through the
    pair horizon. The scan window starts strictly after the coexistence
    round: the later birth round itself can only see one side.
    """
    if prof_a.stop_round is None or prof_b.stop_round is None:
        raise UnsettledStoppingTime(
            f"{prof_a.target.hex()[:12]} / {prof_b.target.hex()[:12]}")
    horizon = max(prof_a.stop_round, prof_b.stop_round)
    if prof_a.last_recorded() < horizon or prof_b.last_recorded() < horizon:
        raise HorizonNotReached(f"horizon {horizon} not yet covered")
    if not (prof_a.mature and prof_b.mature):
        return Verdict.ABSTAIN_TRUNCATED
    coexist = max(prof_a.birth_round, prof_b.birth_round)
    counts_a = prof_a.counts
    counts_b = prof_b.counts
    base_a = prof_a.birth_round
    base_b = prof_b.birth_round
    pos = neg = False
    for t in range(coexist + 1, horizon + 1):
        delta = counts_a[t - base_a] - counts_b[t - base_b]
        if delta >= threshold:
            pos = True
        elif delta <= -threshold:
            neg = True
    if pos and not neg:
        return Verdict.EDGE_FORWARD
    if neg and not pos:
        return Verdict.EDGE_BACKWARD
    if pos and neg:
        return Verdict.ABSTAIN_CONFLICT
    return Verdict.ABSTAIN_NO_SIGNAL


@dataclass(slots=True, eq=False)
class PairRecord:
    """Frozen comparison state for one same-slice pair, key-ordered a < b."""

    a: Digest
    b: Digest
    slice_index: int
    coexist_round: Round
    horizon: Optional[Round] = None
    verdict: Optional[Verdict] = None


class PairTracker:
    """Same-slice pair enumeration, eager freezing, and per-slice release."""

    def __init__(self, config: RunConfig) -> None:
        self.config = config
        self.by_slice: dict[int, list[PairRecord]] = {}
        self._pending_by_member: dict[Digest, set[PairRecord]] = {}

    def register_slice(self, slice_index: int, metas: Sequence[AufMeta],
                       profiles: Mapping[Digest, VisibilityProfile]
                       ) -> list[PairRecord]:
        """Enumerate all unordered pairs of a delivered slice.

        Pairs whose stopping rounds are both already settled freeze
        immediately; the remainder freeze as settlement arrives. Returns
        the pairs frozen during registration.
        """
        ordered = sorted(metas, key=completion_key)
        records: list[PairRecord] = []
        for i, ma in enumerate(ordered):
            for mb in ordered[i + 1:]:
                records.append(PairRecord(
                    ma.digest, mb.digest, slice_index,
                    coexist_round=max(ma.round, mb.round)))
        self.by_slice[slice_index] = records
        frozen: list[PairRecord] = []
        threshold = self.config.signal_threshold
        for rec in records:
            pa = profiles[rec.a]
            pb = profiles[rec.b]
            if pa.stop_round is not None and pb.stop_round is not None:
                self._freeze(rec, pa, pb, threshold)
                frozen.append(rec)
            else:
                self._pending_by_member.setdefault(rec.a, set()).add(rec)
                self._pending_by_member.setdefault(rec.b, set()).add(rec)
        return frozen

    def on_stopping_settled(self, digest: Digest,
                            profiles: Mapping[Digest, VisibilityProfile]
                            ) -> list[PairRecord]:
        """Freeze every pending pair of `digest` whose partner has settled."""
        pending = self._pending_by_member.get(digest)
        if not pending:
            return []
        threshold = self.config.signal_threshold
        frozen: list[PairRecord] = []
        for rec in list(pending):
            pa = profiles[rec.a]
            pb = profiles[rec.b]
            if pa.stop_round is None or pb.stop_round is None:
                continue
            self._freeze(rec, pa, pb, threshold)
            frozen.append(rec)
            self._pending_by_member[rec.a].discard(rec)
            self._pending_by_member[rec.b].discard(rec)
        if not self._pending_by_member.get(digest):
            self._pending_by_member.pop(digest, None)
        return frozen

    def _freeze(self, rec: PairRecord, pa: VisibilityProfile,
                pb: VisibilityProfile, threshold: int) -> None:
        rec.horizon = max(pa.stop_round, pb.stop_round)
        rec.verdict = evaluate_pair(threshold, pa, pb)

    def freeze_ready_pairs(self, frontier: Round,
                           profiles: Mapping[Digest, VisibilityProfile]
                           ) -> list[PairRecord]:
        """Freeze every unfrozen pair whose horizon the frontier covers.

        The event loop freezes eagerly at settlement, which provably covers
        every horizon at or before the frontier, so after event processing
        this sweep is a no-op; it exists as the direct form of the contract.
        """
        threshold = self.config.signal_threshold
        frozen: list[PairRecord] = []
        for records in self.by_slice.values():
            for rec in records:
                if rec.verdict is not None:
                    continue
                pa = profiles[rec.a]
                pb = profiles[rec.b]
                if pa.stop_round is None or pb.stop_round is None:
                    continue
                if frontier < max(pa.stop_round, pb.stop_round):
                    continue
                self._freeze(rec, pa, pb, threshold)
                self._pending_by_member.get(rec.a, set()).discard(rec)
                self._pending_by_member.get(rec.b, set()).discard(rec)
                frozen.append(rec)
        return frozen

    def pairwise_verdict(self, a: Digest, b: Digest,
                         profiles: Mapping[Digest, VisibilityProfile]) -> Verdict:
        """Evaluate (a, b) directly in argument order; does not freeze."""
        try:
            pa = profiles[a]
            pb = profiles[b]
        except KeyError as exc:
            raise UnknownAuf(exc.args[0].hex()) from None
        return evaluate_pair(self.config.signal_threshold, pa, pb)

    def verdicts_for_slice(self, slice_index: int
                           ) -> dict[tuple[Digest, Digest], Optional[Verdict]]:
        return {(rec.a, rec.b): rec.verdict
                for rec in self.by_slice.get(slice_index, [])}

    def unfrozen_count(self) -> int:
        return sum(1 for records in self.by_slice.values()
                   for rec in records if rec.verdict is None)

    def drop_slice(self, slice_index: int) -> None:
        for rec in self.by_slice.pop(slice_index, []):
            self._pending_by_member.get(rec.a, set()).discard(rec)
            self._pending_by_member.get(rec.b, set()).discard(rec)


def directed_edge(rec: PairRecord) -> Optional[tuple[Digest, Digest]]:
    """Directed precedence pair for an edge verdict, None for abstentions."""
    if rec.verdict is Verdict.EDGE_FORWARD:
        return (rec.a, rec.b)
    if rec.verdict is Verdict.EDGE_BACKWARD:
        return (rec.b, rec.a)
    return None
