"""Shared fixtures-as-functions for the test suite.

The closure map here is intentionally written from scratch (plain
dictionary recursion over the event stream) so causal assertions do not
depend on either the engine's bounded traversals or the reference
evaluation module.
"""

from __future__ import annotations

from mrv import (
    ConflictInjector,
    OrderingEngine,
    RunConfig,
    SelectiveParents,
    SimPlan,
    WithholdRounds,
    generate,
)
from mrv.eventlog import RoundCommitted, SliceDelivered, config_to_obj, encode_record
from mrv.output import order_to_obj


def run_report(config, events):
    engine = OrderingEngine(config)
    report = engine.run(events)
    return report, engine


def emitted_output_bytes(config, events) -> bytes:
    """Exactly the bytes an output log file would contain."""
    chunks = [encode_record(config_to_obj(config))]
    engine = OrderingEngine(
        config, on_sealed=lambda o: chunks.append(encode_record(order_to_obj(o))))
    engine.run(events)
    return b"".join(chunks)


def naive_closures(events) -> dict:
    """digest -> frozenset of reflexive ancestors, straight off the stream."""
    closures = {}
    for event in events:
        if isinstance(event, RoundCommitted):
            for meta in event.canonical:
                closure = {meta.digest}
                for p in meta.parents:
                    closure |= closures[p]
                closures[meta.digest] = frozenset(closure)
    return closures


def slices_of(events) -> dict:
    return {e.index: e.members for e in events
            if isinstance(e, SliceDelivered)}


def _strategy_mix(n: int, f: int, variant: int) -> dict:
    """A deterministic rotation of admissible adversarial strategy maps."""
    if variant == 0 or f == 0:
        return {}
    if variant == 1:
        return {n - 1: WithholdRounds(0.5)}
    if variant == 2:
        return {1: SelectiveParents(frozenset(), frozenset({0}))}
    if variant == 3:
        return {n - 1: ConflictInjector(0, 1)}
    byz = list(range(n - f, n))
    return {c: SelectiveParents(frozenset(), frozenset({0})) for c in byz}


def determinism_plans() -> list[SimPlan]:
    """At least 100 seeded plans across the committee and cap grid."""
    plans = []
    for n in (4, 7, 10):
        f = (n - 1) // 3
        for w_max in (2, 4, 8):
            for seed in range(12):
                config = RunConfig(n=n, f=f, w_max=w_max, seed=seed * 7919 + n)
                plans.append(SimPlan(
                    config=config, rounds=8, wave_length=2,
                    strategies=_strategy_mix(n, f, seed % 5),
                    thin=bool(seed % 2)))
    return plans


def corpus_plans() -> list[SimPlan]:
    """Equivalence corpus: every run stays at or under 200 vertices."""
    plans = []
    grid = [
        (4, 12, 1),
        (7, 10, 2),
        (10, 8, 2),
    ]
    for n, rounds, wave in grid:
        f = (n - 1) // 3
        for w_max in (2, 4, 8):
            for variant in range(4):
                seed = 1000 + 31 * n + 7 * w_max + variant
                config = RunConfig(n=n, f=f, w_max=w_max, seed=seed)
                plans.append(SimPlan(
                    config=config, rounds=rounds, wave_length=wave,
                    strategies=_strategy_mix(n, f, variant),
                    thin=variant in (1, 3)))
    return plans


def biased_plans() -> list[tuple[SimPlan, int]]:
    """Adversarial runs where only the f Byzantine creators bias visibility
    against one honest target creator; honest parents stay dense, hence
    symmetric for every pair."""
    out = []
    for n in (4, 7, 10):
        f = (n - 1) // 3
        for seed in range(17):
            target = seed % (n - f)  # honest creator being shunned
            byz = [c for c in range(n) if c != target][-f:]
            strategies = {c: SelectiveParents(frozenset(), frozenset({target}))
                          for c in byz}
            config = RunConfig(n=n, f=f, w_max=4, seed=5000 + seed + n)
            plan = SimPlan(config=config, rounds=6, wave_length=2,
                           strategies=strategies, thin=False)
            out.append((plan, target))
    return out


def generate_plan(plan: SimPlan):
    return plan.config, generate(plan)
