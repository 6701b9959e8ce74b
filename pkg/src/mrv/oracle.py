"""Brute-force reference evaluation, recomputed from first principles.

Everything here is derived directly from the definitions over the fully
materialized DAG: complete ancestor closures per vertex, visibility counts
by exhaustive membership tests, stopping rounds from the min formula, pair
verdicts from a fresh window scan, and linearization via Kosaraju
condensation with exhaustive enumeration of topological orders for small
slices. No state is shared with the incremental engine; clarity over speed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .comparator import Verdict
from .dag import AufMeta, Digest, Round, completion_key
from .engine import EngineReport
from .errors import ConfigMismatch, InvalidLog, MrvError
from .eventlog import Event, RoundCommitted, RunConfig, SliceDelivered, StreamValidator
from .linearizer import SliceOrder

ENUMERATION_LIMIT = 8


@dataclass
class OracleReport:
    config: RunConfig
    last_round: Round = -1
    births: dict[Digest, Round] = field(default_factory=dict)
    creators: dict[Digest, int] = field(default_factory=dict)
    counts: dict[Digest, dict[Round, int]] = field(default_factory=dict)
    stops: dict[Digest, tuple[Round, bool]] = field(default_factory=dict)
    verdicts: dict[tuple[Digest, Digest], Verdict] = field(default_factory=dict)
    slices: dict[int, tuple[Digest, ...]] = field(default_factory=dict)
    orders: dict[int, Optional[SliceOrder]] = field(default_factory=dict)

    def visibility(self, x: Digest, t: Round) -> int:
        return self.counts[x].get(t, 0)


def oracle_evaluate(config: RunConfig, events: Iterable[Event]) -> OracleReport:
    """Evaluate an entire event stream from scratch."""
    report = OracleReport(config)
    validator = StreamValidator(config)
    metas: dict[Digest, AufMeta] = {}
    closures: dict[Digest, frozenset[Digest]] = {}
    canonical_by_round: dict[Round, list[Digest]] = {}
    delivery_frontier: dict[int, Round] = {}
    current = -1
    for event in events:
        try:
            validator.apply(event)
        except MrvError as exc:
            raise InvalidLog(str(exc)) from exc
        if isinstance(event, RoundCommitted):
            current = event.round
            canonical_by_round[current] = []
            for meta in event.canonical:
                metas[meta.digest] = meta
                closure = {meta.digest}
                for p in meta.parents:
                    closure.update(closures[p])
                closures[meta.digest] = frozenset(closure)
                canonical_by_round[current].append(meta.digest)
                report.births[meta.digest] = meta.round
                report.creators[meta.digest] = meta.creator
        elif isinstance(event, SliceDelivered):
            report.slices[event.index] = tuple(event.members)
            delivery_frontier[event.index] = current
    report.last_round = current

    # visibility counts: one unit per canonical vertex whose closure holds X
    for digest in metas:
        report.counts[digest] = {}
    for t, roster in canonical_by_round.items():
        for y in roster:
            for x in closures[y]:
                row = report.counts[x]
                row[t] = row.get(t, 0) + 1

    # stopping rounds straight from the definition
    quorum = config.quorum
    for digest, meta in metas.items():
        cap = meta.round + config.w_max
        first_quorum = None
        for t in range(meta.round, report.last_round + 1):
            if report.counts[digest].get(t, 0) >= quorum:
                first_quorum = t
                break
        if first_quorum is not None and first_quorum <= cap:
            report.stops[digest] = (first_quorum, True)
        elif cap <= report.last_round:
            report.stops[digest] = (cap, False)
        # otherwise the stream ended before the unit could settle

    # pair verdicts per slice
    threshold = config.signal_threshold
    for index, members in report.slices.items():
        ordered = sorted((metas[d] for d in members), key=completion_key)
        for i, ma in enumerate(ordered):
            for mb in ordered[i + 1:]:
                verdict = _pair_verdict(report, threshold, ma, mb)
                if verdict is not None:
                    report.verdicts[(ma.digest, mb.digest)] = verdict

    # slice orders
    for index, members in report.slices.items():
        stops = [report.stops.get(d) for d in members]
        if any(s is None for s in stops):
            report.orders[index] = None
            continue
        sealing = max(s[0] for s in stops)
        if sealing > report.last_round:
            report.orders[index] = None
            continue
        sealed_at = max(sealing, delivery_frontier[index])
        report.orders[index] = _linearize(report, metas, closures, index,
                                          members, sealed_at)
    return report


def _pair_verdict(report: OracleReport, threshold: int, ma: AufMeta,
                  mb: AufMeta) -> Optional[Verdict]:
    sa = report.stops.get(ma.digest)
    sb = report.stops.get(mb.digest)
    if sa is None or sb is None:
        return None
    if not (sa[1] and sb[1]):
        return Verdict.ABSTAIN_TRUNCATED
    coexist = max(ma.round, mb.round)
    horizon = max(sa[0], sb[0])
    window = range(coexist + 1, horizon + 1)
    pos = any(report.visibility(ma.digest, t) - report.visibility(mb.digest, t)
              >= threshold for t in window)
    neg = any(report.visibility(mb.digest, t) - report.visibility(ma.digest, t)
              >= threshold for t in window)
    if pos and not neg:
        return Verdict.EDGE_FORWARD
    if neg and not pos:
        return Verdict.EDGE_BACKWARD
    if pos and neg:
        return Verdict.ABSTAIN_CONFLICT
    return Verdict.ABSTAIN_NO_SIGNAL


# --- linearization (independent of the engine's implementation) -------------

def _kosaraju(vertices: Sequence, succ: dict) -> list[list]:
    """Strongly connected components via two DFS passes."""
    visited: set = set()
    postorder: list = []
    for root in vertices:
        if root in visited:
            continue
        stack = [(root, False)]
        while stack:
            v, done = stack.pop()
            if done:
                postorder.append(v)
                continue
            if v in visited:
                continue
            visited.add(v)
            stack.append((v, True))
            for w in succ.get(v, ()):
                if w not in visited:
                    stack.append((w, False))
    pred: dict = {v: [] for v in vertices}
    for v in vertices:
        for w in succ.get(v, ()):
            pred[w].append(v)
    assigned: set = set()
    components: list[list] = []
    for root in reversed(postorder):
        if root in assigned:
            continue
        component = []
        stack = [root]
        assigned.add(root)
        while stack:
            v = stack.pop()
            component.append(v)
            for w in pred[v]:
                if w not in assigned:
                    assigned.add(w)
                    stack.append(w)
        components.append(component)
    return components


def _all_topological_orders(items: Sequence, edges: set) -> Iterable[list]:
    indegree = {v: 0 for v in items}
    succ = {v: [] for v in items}
    for u, v in edges:
        succ[u].append(v)
        indegree[v] += 1

    def backtrack(chosen: list):
        if len(chosen) == len(items):
            yield list(chosen)
            return
        for v in items:
            if indegree[v] == 0 and v not in taken:
                taken.add(v)
                chosen.append(v)
                for w in succ[v]:
                    indegree[w] -= 1
                yield from backtrack(chosen)
                for w in succ[v]:
                    indegree[w] += 1
                chosen.pop()
                taken.discard(v)

    taken: set = set()
    yield from backtrack([])


def _lex_min_order(items: Sequence, edges: set, key) -> list:
    """Key-lexicographically least topological order, by exhaustive search."""
    best = None
    best_key = None
    for order in _all_topological_orders(items, edges):
        order_key = tuple(key(v) for v in order)
        if best_key is None or order_key < best_key:
            best = order
            best_key = order_key
    assert best is not None, "acyclic input required"
    return best


def _greedy_min_order(items: Sequence, edges: set, key) -> list:
    indegree = {v: 0 for v in items}
    succ = {v: set() for v in items}
    for u, v in edges:
        if v not in succ[u]:
            succ[u].add(v)
            indegree[v] += 1
    out = []
    ready = sorted((v for v in items if indegree[v] == 0), key=key)
    while ready:
        v = ready.pop(0)
        out.append(v)
        changed = False
        for w in succ[v]:
            indegree[w] -= 1
            if indegree[w] == 0:
                ready.append(w)
                changed = True
        if changed:
            ready.sort(key=key)
    assert len(out) == len(items)
    return out


def _linearize(report: OracleReport, metas: dict, closures: dict, index: int,
               members: tuple[Digest, ...], sealed_at: Round) -> SliceOrder:
    member_set = set(members)
    key = {d: completion_key(metas[d]) for d in members}
    causal = {(b, a) for a in members for b in closures[a]
              if b != a and b in member_set}
    svp = set()
    ordered_members = sorted(members, key=key.get)
    for i, a in enumerate(ordered_members):
        for b in ordered_members[i + 1:]:
            verdict = report.verdicts.get((a, b))
            if verdict is Verdict.EDGE_FORWARD:
                svp.add((a, b))
            elif verdict is Verdict.EDGE_BACKWARD:
                svp.add((b, a))
    succ: dict[Digest, list[Digest]] = {d: [] for d in ordered_members}
    for u, v in sorted(causal | svp):
        succ[u].append(v)
    components = _kosaraju(ordered_members, succ)
    component_of = {v: cid for cid, comp in enumerate(components) for v in comp}
    comp_key = {cid: min(key[v] for v in comp)
                for cid, comp in enumerate(components)}
    comp_edges = {(component_of[u], component_of[v])
                  for u, v in causal | svp
                  if component_of[u] != component_of[v]}
    small = len(members) <= ENUMERATION_LIMIT
    comp_ids = sorted(comp_key)
    if small:
        comp_order = _lex_min_order(comp_ids, comp_edges, comp_key.get)
    else:
        comp_order = _greedy_min_order(comp_ids, comp_edges, comp_key.get)
    ordered: list[Digest] = []
    for cid in comp_order:
        comp = sorted(components[cid], key=key.get)
        internal = {(u, v) for u, v in causal
                    if component_of[u] == cid and component_of[v] == cid}
        if small:
            ordered.extend(_lex_min_order(comp, internal, key.get))
        else:
            ordered.extend(_greedy_min_order(comp, internal, key.get))
    enforceable = tuple(sorted(
        (u, v) for u, v in svp if component_of[u] != component_of[v]))
    return SliceOrder(index, tuple(ordered), enforceable, sealed_at)


# --- report comparison -------------------------------------------------------

def _short(digest: Digest) -> str:
    return digest.hex()[:12]


def diff_reports(engine: EngineReport, oracle: OracleReport) -> list[str]:
    """Discrepancy list; empty exactly when the two evaluations agree."""
    if engine.config != oracle.config:
        raise ConfigMismatch(f"{engine.config} vs {oracle.config}")
    out: list[str] = []
    if set(engine.stops) != set(oracle.stops):
        missing = {_short(d) for d in set(oracle.stops) - set(engine.stops)}
        extra = {_short(d) for d in set(engine.stops) - set(oracle.stops)}
        out.append(f"settled sets differ: missing={sorted(missing)} "
                   f"extra={sorted(extra)}")
    for d in sorted(set(engine.stops) & set(oracle.stops)):
        if engine.stops[d] != oracle.stops[d]:
            out.append(f"stop({_short(d)}): engine={engine.stops[d]} "
                       f"oracle={oracle.stops[d]}")
    if set(engine.verdicts) != set(oracle.verdicts):
        missing = sorted(f"{_short(a)}/{_short(b)}"
                         for a, b in set(oracle.verdicts) - set(engine.verdicts))
        extra = sorted(f"{_short(a)}/{_short(b)}"
                       for a, b in set(engine.verdicts) - set(oracle.verdicts))
        out.append(f"frozen pair sets differ: missing={missing} extra={extra}")
    for pair in sorted(set(engine.verdicts) & set(oracle.verdicts)):
        if engine.verdicts[pair] != oracle.verdicts[pair]:
            out.append(
                f"verdict({_short(pair[0])}, {_short(pair[1])}): "
                f"engine={engine.verdicts[pair].value} "
                f"oracle={oracle.verdicts[pair].value}")
    engine_orders = engine.orders_by_index()
    oracle_sealed = {i: o for i, o in oracle.orders.items() if o is not None}
    if set(engine_orders) != set(oracle_sealed):
        out.append(f"sealed slice sets differ: engine={sorted(engine_orders)} "
                   f"oracle={sorted(oracle_sealed)}")
    for index in sorted(set(engine_orders) & set(oracle_sealed)):
        mine = engine_orders[index]
        ref = oracle_sealed[index]
        if mine.ordered != ref.ordered:
            out.append(f"order(slice {index}): engine="
                       f"{[_short(d) for d in mine.ordered]} oracle="
                       f"{[_short(d) for d in ref.ordered]}")
        if mine.enforceable_svp != ref.enforceable_svp:
            out.append(f"enforceable(slice {index}) differ")
        if mine.sealed_at != ref.sealed_at:
            out.append(f"sealed_at(slice {index}): engine={mine.sealed_at} "
                       f"oracle={ref.sealed_at}")
    return out
