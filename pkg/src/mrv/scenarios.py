"""Hand-built minimal event streams, each exhibiting one boundary condition.

Catalog:

  empty-window           Both members of a pair stop at their own birth round,
                         so the post-coexistence window is empty and the
                         verdict is no-signal. Only reachable when the quorum
                         is 1 (f = 0): with a larger quorum the later-born
                         unit always stops strictly after the coexistence
                         round, since a unit's birth-round visibility is
                         exactly 1.
  exact-f-delta          Window deltas peak at exactly f, one short of the
                         certification threshold: no-signal.
  conflict               Strong signals in both directions inside one window:
                         abstain-conflict. Needs committee slack (n = 10,
                         f = 1): a side must lose all carriers in one round,
                         which is impossible when every quorum of parents
                         overlaps every carrier set.
  immature               Members capped before reaching quorum visibility:
                         abstain-truncated. Empty committed rounds starve
                         the counts.
  svp-vs-causal          A three-member slice where two evidence edges close
                         a cycle through a hard causal edge. The cycle is
                         absorbed into one component, no evidence edge is
                         enforceable, and causal order still wins inside.
                         A direct two-member evidence-versus-causal cycle is
                         unconstructible from committed structure: an
                         ancestor's visibility dominates its descendant's at
                         every round, so the comparator can never point
                         against ancestry.
  three-cycle            Three evidence edges forming a cycle with no causal
                         edges; one component ordered purely by the
                         completion key, zero enforceable edges. Built on
                         staggered births so each pair's window sees only
                         its own signal.
  signal-at-coexistence  The only strong delta sits exactly on the
                         coexistence round, which the window excludes:
                         no-signal. Distinguishes the strict window start
                         from an off-by-one scan.

Every stream passes full contract validation; expected outcomes are pinned
by the test suite through both the engine and the reference evaluation.
"""

from __future__ import annotations

from .dag import AufMeta, completion_key, make_auf
from .errors import UnknownScenario
from .eventlog import Event, RoundCommitted, RunConfig, SliceDelivered


class StreamBuilder:
    """Compose a stream by naming vertices (creator, round)."""

    def __init__(self, config: RunConfig) -> None:
        self.config = config
        self.events: list[Event] = []
        self.metas: dict[tuple[int, int], AufMeta] = {}
        self._slice_index = 0

    def genesis(self) -> None:
        metas = tuple(make_auf(c, 0) for c in range(self.config.n))
        for meta in metas:
            self.metas[(meta.creator, 0)] = meta
        self.events.append(RoundCommitted(0, metas))

    def round(self, round_: int, parents_by_creator: dict) -> None:
        metas = []
        for creator in sorted(parents_by_creator):
            parents = [self.metas[ref].digest
                       for ref in parents_by_creator[creator]]
            meta = make_auf(creator, round_, parents)
            self.metas[(creator, round_)] = meta
            metas.append(meta)
        self.events.append(RoundCommitted(round_, tuple(metas)))

    def empty_round(self, round_: int) -> None:
        self.events.append(RoundCommitted(round_, ()))

    def deliver(self, refs: list) -> None:
        metas = sorted((self.metas[ref] for ref in refs), key=completion_key)
        self.events.append(SliceDelivered(
            self._slice_index, tuple(m.digest for m in metas)))
        self._slice_index += 1

    def build(self) -> tuple[RunConfig, list[Event]]:
        return self.config, self.events


def _empty_window() -> tuple[RunConfig, list[Event]]:
    b = StreamBuilder(RunConfig(n=2, f=0, w_max=2, seed=0))
    b.genesis()
    b.deliver([(0, 0), (1, 0)])
    b.round(1, {0: [(0, 0), (1, 0)], 1: [(0, 0), (1, 0)]})
    return b.build()


def _exact_f_delta() -> tuple[RunConfig, list[Event]]:
    b = StreamBuilder(RunConfig(n=4, f=1, w_max=2, seed=0))
    b.genesis()
    b.round(1, {0: [(0, 0), (1, 0), (2, 0)],
                1: [(1, 0), (2, 0), (3, 0)],
                2: [(0, 0), (1, 0), (2, 0)],
                3: [(1, 0), (2, 0), (3, 0)]})
    b.deliver([(0, 1), (1, 1)])
    b.round(2, {0: [(0, 1), (1, 1), (2, 1)],
                1: [(0, 1), (1, 1), (2, 1)],
                2: [(0, 1), (1, 1), (3, 1)],
                3: [(0, 1), (2, 1), (3, 1)]})
    return b.build()


def _conflict() -> tuple[RunConfig, list[Event]]:
    b = StreamBuilder(RunConfig(n=10, f=1, w_max=6, seed=0))
    b.genesis()
    b.round(1, {0: [(0, 0), (1, 0), (2, 0)],
                1: [(1, 0), (2, 0), (3, 0)],
                **{c: [(4, 0), (5, 0), (6, 0)] for c in range(2, 10)}})
    b.deliver([(0, 1), (1, 1)])
    b.round(2, {0: [(0, 1), (4, 1), (5, 1)],
                1: [(1, 1), (4, 1), (5, 1)],
                2: [(0, 1), (4, 1), (5, 1)],
                3: [(0, 1), (4, 1), (5, 1)],
                **{c: [(4, 1), (5, 1), (6, 1)] for c in range(4, 10)}})
    b.round(3, {0: [(0, 2), (4, 2), (5, 2)],
                1: [(1, 2), (4, 2), (5, 2)],
                2: [(2, 2), (4, 2), (5, 2)],
                3: [(3, 2), (4, 2), (5, 2)],
                **{c: [(4, 2), (5, 2), (6, 2)] for c in range(4, 10)}})
    b.round(4, {0: [(6, 3), (7, 3), (8, 3)],
                1: [(1, 3), (4, 3), (5, 3)],
                2: [(6, 3), (7, 3), (8, 3)],
                3: [(6, 3), (7, 3), (8, 3)],
                4: [(1, 3), (5, 3), (6, 3)],
                5: [(1, 3), (6, 3), (7, 3)],
                **{c: [(6, 3), (7, 3), (8, 3)] for c in range(6, 10)}})
    return b.build()


def _immature() -> tuple[RunConfig, list[Event]]:
    b = StreamBuilder(RunConfig(n=4, f=1, w_max=2, seed=0))
    b.genesis()
    b.deliver([(0, 0), (1, 0)])
    b.empty_round(1)
    b.empty_round(2)
    return b.build()


def _svp_vs_causal() -> tuple[RunConfig, list[Event]]:
    b = StreamBuilder(RunConfig(n=10, f=1, w_max=4, seed=0))
    b.genesis()
    b.round(1, {1: [(1, 0), (2, 0), (3, 0)],
                **{c: [(4, 0), (5, 0), (6, 0)]
                   for c in range(10) if c != 1}})
    b.round(2, {0: [(2, 1), (3, 1), (4, 1)],
                1: [(1, 1), (4, 1), (5, 1)],
                **{c: [(4, 1), (5, 1), (6, 1)] for c in range(2, 10)}})
    b.round(3, {0: [(0, 2), (4, 2), (5, 2)],
                1: [(1, 2), (4, 2), (5, 2)],
                2: [(0, 2), (4, 2), (5, 2)],
                3: [(0, 2), (4, 2), (5, 2)],
                **{c: [(4, 2), (5, 2), (6, 2)] for c in range(4, 10)}})
    b.round(4, {0: [(0, 3), (5, 3), (6, 3)],
                1: [(1, 3), (5, 3), (6, 3)],
                2: [(2, 3), (5, 3), (6, 3)],
                3: [(3, 3), (5, 3), (6, 3)],
                4: [(1, 3), (5, 3), (6, 3)],
                5: [(5, 3), (6, 3), (7, 3)],
                6: [(6, 3), (7, 3), (8, 3)],
                7: [(1, 3), (6, 3), (7, 3)],
                8: [(1, 3), (7, 3), (8, 3)],
                9: [(7, 3), (8, 3), (9, 3)]})
    b.deliver([(0, 2), (1, 1), (4, 4)])
    b.round(5, {0: [(0, 4), (5, 4), (6, 4)],
                1: [(5, 4), (6, 4), (9, 4)],
                2: [(5, 4), (6, 4), (9, 4)],
                3: [(5, 4), (6, 4), (9, 4)],
                4: [(4, 4), (5, 4), (6, 4)],
                5: [(4, 4), (5, 4), (6, 4)],
                6: [(4, 4), (6, 4), (9, 4)],
                7: [(5, 4), (6, 4), (9, 4)],
                8: [(5, 4), (6, 4), (9, 4)],
                9: [(5, 4), (6, 4), (9, 4)]})
    return b.build()


def _three_cycle() -> tuple[RunConfig, list[Event]]:
    b = StreamBuilder(RunConfig(n=10, f=1, w_max=4, seed=0))
    b.genesis()
    b.round(1, {0: [(0, 0), (1, 0), (2, 0)],
                **{c: [(7, 0), (8, 0), (9, 0)]
                   for c in range(10) if c != 0}})
    b.round(2, {0: [(0, 1), (7, 1), (8, 1)],
                **{c: [(7, 1), (8, 1), (9, 1)] for c in range(1, 10)}})
    b.round(3, {0: [(0, 2), (7, 2), (8, 2)],
                1: [(1, 2), (7, 2), (8, 2)],
                3: [(0, 2), (7, 2), (8, 2)],
                4: [(0, 2), (7, 2), (8, 2)],
                **{c: [(7, 2), (8, 2), (9, 2)]
                   for c in (2, 5, 6, 7, 8, 9)}})
    b.deliver([(0, 1), (1, 2), (2, 3)])
    b.round(4, {0: [(0, 3), (7, 3), (8, 3)],
                1: [(1, 3), (7, 3), (8, 3)],
                2: [(2, 3), (7, 3), (8, 3)],
                3: [(3, 3), (7, 3), (8, 3)],
                5: [(1, 3), (8, 3), (9, 3)],
                6: [(1, 3), (7, 3), (9, 3)],
                **{c: [(7, 3), (8, 3), (9, 3)] for c in (4, 7, 8, 9)}})
    b.round(5, {0: [(0, 4), (7, 4), (8, 4)],
                1: [(1, 4), (7, 4), (8, 4)],
                2: [(2, 4), (7, 4), (8, 4)],
                5: [(5, 4), (7, 4), (8, 4)],
                6: [(2, 4), (8, 4), (9, 4)],
                7: [(2, 4), (8, 4), (9, 4)],
                **{c: [(7, 4), (8, 4), (9, 4)] for c in (3, 4, 8, 9)}})
    return b.build()


def _signal_at_coexistence() -> tuple[RunConfig, list[Event]]:
    b = StreamBuilder(RunConfig(n=4, f=1, w_max=4, seed=0))
    b.genesis()
    b.round(1, {0: [(0, 0), (1, 0), (2, 0)],
                1: [(1, 0), (2, 0), (3, 0)],
                2: [(0, 0), (1, 0), (2, 0)],
                3: [(0, 0), (1, 0), (2, 0)]})
    b.round(2, {0: [(0, 1), (2, 1), (3, 1)],
                1: [(1, 1), (2, 1), (3, 1)],
                2: [(0, 1), (2, 1), (3, 1)],
                3: [(0, 1), (2, 1), (3, 1)]})
    b.deliver([(0, 1), (1, 2)])
    b.round(3, {0: [(0, 2), (2, 2), (3, 2)],
                1: [(1, 2), (2, 2), (3, 2)],
                2: [(1, 2), (2, 2), (3, 2)],
                3: [(1, 2), (2, 2), (3, 2)]})
    return b.build()


CATALOG = {
    "empty-window": _empty_window,
    "exact-f-delta": _exact_f_delta,
    "conflict": _conflict,
    "immature": _immature,
    "svp-vs-causal": _svp_vs_causal,
    "three-cycle": _three_cycle,
    "signal-at-coexistence": _signal_at_coexistence,
}


def targeted_scenario(name: str) -> tuple[RunConfig, list[Event]]:
    """Stream for a named catalog entry."""
    try:
        builder = CATALOG[name]
    except KeyError:
        known = ", ".join(sorted(CATALOG))
        raise UnknownScenario(f"{name!r}; known scenarios: {known}") from None
    return builder()
