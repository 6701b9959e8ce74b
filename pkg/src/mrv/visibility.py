"""Incremental creator-level visibility tracking and stopping-round settlement.

For each active unit X the tracker records, per committed round t, how many
distinct creators' canonical round-t vertices contain X in their reflexive
ancestor closure. A unit settles when that count first reaches the quorum
(mature) or when the observation cap expires (immature). Counting continues
past settlement because a partner's later horizon may still need the values;
state is released only when the unit's slice is sealed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .dag import AufMeta, DagStore, Digest, Round
from .errors import FrontierSkew, RoundNotRecorded, UnknownAuf
from .eventlog import RunConfig


@dataclass
class VisibilityProfile:
    target: Digest
    birth_round: Round
    counts: list[int] = field(default_factory=lambda: [0])  # counts[i] = round birth+i
    stop_round: Optional[Round] = None
    mature: Optional[bool] = None
    slice_index: Optional[int] = None

    def last_recorded(self) -> Round:
        return self.birth_round + len(self.counts) - 1

    def count_at(self, t: Round) -> int:
        if t < self.birth_round or t > self.last_recorded():
            raise RoundNotRecorded(
                f"round {t} outside [{self.birth_round}, {self.last_recorded()}]")
        return self.counts[t - self.birth_round]


class VisibilityTracker:
    """Active-set counting driven by the advancing committed frontier."""

    def __init__(self, config: RunConfig) -> None:
        self.config = config
        self.profiles: dict[Digest, VisibilityProfile] = {}
        self.last_round: Round = -1

    def on_round_committed(self, round_: Round, canonical: Sequence[AufMeta],
                           store: DagStore) -> None:
        """Record this round's visibility counts for every active unit.

        Each canonical vertex contributes at most one unit of visibility to
        each target it reaches, so counts are per creator, not per path.
        """
        if round_ != self.last_round + 1:
            raise FrontierSkew(
                f"expected round {self.last_round + 1}, got {round_}")
        self.last_round = round_
        for profile in self.profiles.values():
            profile.counts.append(0)
        for meta in canonical:
            self.profiles[meta.digest] = VisibilityProfile(meta.digest, round_)
        if not self.profiles:
            return
        floor = min(p.birth_round for p in self.profiles.values())
        for meta in canonical:
            for digest in store.bounded_ancestors(meta.digest, floor):
                profile = self.profiles.get(digest)
                if profile is not None:
                    profile.counts[round_ - profile.birth_round] += 1

    def settle_stopping_times(self, round_: Round) -> list[Digest]:
        """Fix stopping rounds for units that hit quorum or the cap at `round_`.

        The quorum branch wins at the cap boundary: a unit reaching quorum in
        the very round its window expires settles mature.
        """
        quorum = self.config.quorum
        w_max = self.config.w_max
        newly: list[Digest] = []
        for digest, profile in self.profiles.items():
            if profile.stop_round is not None:
                continue
            if profile.counts[round_ - profile.birth_round] >= quorum:
                profile.stop_round = round_
                profile.mature = True
                newly.append(digest)
            elif round_ >= profile.birth_round + w_max:
                profile.stop_round = profile.birth_round + w_max
                profile.mature = False
                newly.append(digest)
        return newly

    def visibility(self, x: Digest, t: Round) -> int:
        profile = self.profiles.get(x)
        if profile is None:
            raise UnknownAuf(x.hex())
        return profile.count_at(t)

    def assign_slice(self, x: Digest, slice_index: int) -> VisibilityProfile:
        profile = self.profiles.get(x)
        if profile is None:
            raise UnknownAuf(x.hex())
        profile.slice_index = slice_index
        return profile

    def release(self, digests: Iterable[Digest]) -> None:
        for d in digests:
            self.profiles.pop(d, None)

    def active_count(self) -> int:
        return len(self.profiles)
