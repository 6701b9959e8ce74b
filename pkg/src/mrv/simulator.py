"""Seeded committed-stream generator with pluggable creator strategies.

Honest creators emit one vertex per round referencing a quorum or more of
the previous round; every wave a round-robin leader commits, delivering its
not-yet-delivered causal history as the next slice. Up to f creators may
follow adversarial strategies that withhold vertices or pick parents
selectively; everything they can do still flows through the committed
structure, which is the only input the ordering layer reads.

Randomness comes from SplitMix64, a tiny published 64-bit generator, so a
plan's byte-identical stream can be regenerated by any implementation of
the same algorithm.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence, Union

from .dag import AufMeta, DagStore, Digest, completion_key, make_auf
from .errors import InfeasiblePlan
from .eventlog import Event, RoundCommitted, RunConfig, SliceDelivered

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """SplitMix64: state advances by the golden-gamma constant, output is a
    xor-shift-multiply mix of the new state. Public-domain algorithm."""

    def __init__(self, seed: int) -> None:
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def below(self, bound: int) -> int:
        """Uniform integer in [0, bound) by rejection of the biased tail."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        limit = _MASK64 - (_MASK64 + 1) % bound
        while True:
            value = self.next_u64()
            if value <= limit:
                return value % bound

    def chance(self, probability: float) -> bool:
        return self.next_u64() < probability * (_MASK64 + 1)

    def sample(self, items: Sequence, k: int) -> list:
        """k distinct items via a partial Fisher-Yates pass; order-stable."""
        pool = list(items)
        if k > len(pool):
            raise ValueError("sample larger than population")
        for i in range(k):
            j = i + self.below(len(pool) - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]


# --- strategies ---------------------------------------------------------------

@dataclass(frozen=True)
class Honest:
    pass


@dataclass(frozen=True)
class WithholdRounds:
    """Skip emitting a vertex with the given per-round probability."""

    probability: float


@dataclass(frozen=True)
class SelectiveParents:
    """Reference favored creators' vertices, never shunned creators' own."""

    favored: frozenset[int] = frozenset()
    shunned: frozenset[int] = frozenset()


@dataclass(frozen=True)
class ConflictInjector:
    """Alternate favoring one target creator while shunning the other."""

    target_a: int
    target_b: int


Strategy = Union[Honest, WithholdRounds, SelectiveParents, ConflictInjector]

HONEST = Honest()


@dataclass(frozen=True)
class SimPlan:
    """One reproducible run: protocol constants plus generator shape."""

    config: RunConfig
    rounds: int
    wave_length: int
    strategies: Mapping[int, Strategy] = field(default_factory=dict)
    thin: bool = False  # honest creators reference exactly a quorum

    def __post_init__(self) -> None:
        if self.wave_length < 1:
            raise InfeasiblePlan("wave_length must be at least 1")
        if self.rounds < self.wave_length:
            raise InfeasiblePlan("need at least one full wave of rounds")
        byzantine = [c for c, s in self.strategies.items()
                     if not isinstance(s, Honest)]
        if len(byzantine) > self.config.f:
            raise InfeasiblePlan(
                f"{len(byzantine)} non-honest creators exceed f={self.config.f}")
        for c in self.strategies:
            if not 0 <= c < self.config.n:
                raise InfeasiblePlan(f"creator {c} out of range")


def _select_parents(strategy: Strategy, available: Sequence[AufMeta],
                    config: RunConfig, rng: SplitMix64, round_: int,
                    thin: bool) -> list[Digest]:
    quorum = config.quorum
    if isinstance(strategy, ConflictInjector):
        favored, shunned = ((strategy.target_a, strategy.target_b)
                            if round_ % 2 == 0
                            else (strategy.target_b, strategy.target_a))
        strategy = SelectiveParents(frozenset({favored}), frozenset({shunned}))
    if isinstance(strategy, SelectiveParents):
        favored = [m.digest for m in available if m.creator in strategy.favored]
        pool = [m.digest for m in available
                if m.creator not in strategy.favored
                and m.creator not in strategy.shunned]
        if len(favored) + len(pool) < quorum:
            raise InfeasiblePlan(
                f"round {round_}: only {len(favored) + len(pool)} admissible "
                f"parents, need {quorum}")
        fill = rng.sample(pool, max(0, quorum - len(favored)))
        return favored + fill
    digests = [m.digest for m in available]
    if thin and len(digests) > quorum:
        return rng.sample(digests, quorum)
    return digests


def generate(plan: SimPlan) -> list[Event]:
    """Deterministic event stream for a plan; identical plans, identical bytes."""
    config = plan.config
    rng = SplitMix64(config.seed)
    store = DagStore()
    events: list[Event] = []

    genesis = tuple(make_auf(c, 0, (), 64 + rng.below(1985))
                    for c in range(config.n))
    for meta in genesis:
        store.insert_vertex(meta)
    store.advance_frontier(0)
    events.append(RoundCommitted(0, genesis))
    previous: list[AufMeta] = list(genesis)

    delivered: set[Digest] = set()
    slice_index = 0
    wave_number = 0
    total_rounds = plan.rounds + config.w_max
    for round_ in range(1, total_rounds + 1):
        if len(previous) < config.quorum:
            raise InfeasiblePlan(
                f"round {round_}: only {len(previous)} prior vertices for a "
                f"quorum of {config.quorum}")
        metas = []
        for creator in range(config.n):
            strategy = plan.strategies.get(creator, HONEST)
            if isinstance(strategy, WithholdRounds) and rng.chance(
                    strategy.probability):
                continue
            parents = _select_parents(strategy, previous, config, rng, round_,
                                      plan.thin)
            metas.append(make_auf(creator, round_, parents,
                                  64 + rng.below(1985)))
        canonical = tuple(metas)
        events.append(RoundCommitted(round_, canonical))
        for meta in canonical:
            store.insert_vertex(meta)
        store.advance_frontier(round_)
        previous = list(canonical)

        if round_ % plan.wave_length == 0 and round_ <= plan.rounds:
            wave_number += 1
            leader_creator = (wave_number - 1) % config.n
            leader = store.canonical_at(leader_creator, round_)
            if leader is None:
                continue  # leader withheld; this wave commits nothing
            members = store.bounded_ancestors(leader, 0) - delivered
            if not members:
                continue
            ordered = tuple(sorted(members,
                                   key=lambda d: completion_key(store.get(d))))
            events.append(SliceDelivered(slice_index, ordered))
            delivered.update(members)
            slice_index += 1
    return events
