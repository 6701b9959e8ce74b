"""Slice sealing: precedence graph assembly, condensation, deterministic completion.

The slice-local graph combines hard causal edges (ancestor before descendant)
with frozen evidence-backed edges. Cycles, which can only involve evidence
edges, are absorbed by strongly-connected-component condensation: edges
inside a component become graph-level ambiguity, edges across components
stay enforceable. The condensation is linearized by the key-minimal
topological order, and each component internally by its causal subgraph
with the completion key breaking ties, so completion never violates
causality and never invents precedence claims.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Optional, Sequence

from .comparator import Verdict
from .dag import AufMeta, DagStore, Digest, Round
from .errors import UnfrozenPair, UnsettledMember

Key = Callable[[Digest], tuple]


@dataclass(frozen=True)
class PrecedenceGraph:
    vertices: tuple[Digest, ...]  # completion-key order
    causal_edges: frozenset[tuple[Digest, Digest]]
    svp_edges: frozenset[tuple[Digest, Digest]]


@dataclass(frozen=True)
class SliceOrder:
    slice_index: int
    ordered: tuple[Digest, ...]
    enforceable_svp: tuple[tuple[Digest, Digest], ...]  # sorted
    sealed_at: Round


def slice_sealing_time(members: Iterable[Digest],
                       stop_round_of: Mapping[Digest, Optional[Round]]) -> Round:
    """Largest member stopping round; the frontier at which the slice seals."""
    sealing = -1
    for d in members:
        stop = stop_round_of.get(d)
        if stop is None:
            raise UnsettledMember(d.hex())
        sealing = max(sealing, stop)
    if sealing < 0:
        raise UnsettledMember("empty member set")
    return sealing


def build_precedence_graph(
        metas: Sequence[AufMeta], store: DagStore,
        verdicts: Mapping[tuple[Digest, Digest], Optional[Verdict]],
) -> PrecedenceGraph:
    """Assemble causal and evidence-backed edges over one slice.

    Abstentions contribute nothing; an unfrozen pair is a caller bug.
    """
    members = {m.digest for m in metas}
    floor = min(m.round for m in metas)
    causal = set()
    for meta in metas:
        for anc in store.bounded_ancestors(meta.digest, floor):
            if anc != meta.digest and anc in members:
                causal.add((anc, meta.digest))
    svp = set()
    for (a, b), verdict in verdicts.items():
        if verdict is None:
            raise UnfrozenPair(f"{a.hex()[:12]} / {b.hex()[:12]}")
        if verdict is Verdict.EDGE_FORWARD:
            svp.add((a, b))
        elif verdict is Verdict.EDGE_BACKWARD:
            svp.add((b, a))
    ordered = tuple(m.digest for m in metas)
    return PrecedenceGraph(ordered, frozenset(causal), frozenset(svp))


def strongly_connected_components(vertices: Sequence, successors: Mapping
                                  ) -> list[list]:
    """Tarjan's algorithm, iterative; components in discovery order."""
    index: dict = {}
    low: dict = {}
    on_stack: set = set()
    stack: list = []
    result: list[list] = []
    counter = 0
    for root in vertices:
        if root in index:
            continue
        work = [(root, iter(successors.get(root, ())))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(successors.get(w, ()))))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                component = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    component.append(w)
                    if w == v:
                        break
                result.append(component)
    return result


def key_minimal_topological_order(items: Sequence, edges: Iterable[tuple],
                                  key: Callable) -> list:
    """Unique topological order whose key sequence is lexicographically least.

    Kahn's algorithm with the eligible set kept in a key-ordered heap;
    always emitting the least eligible item yields the lexicographically
    minimal order.
    """
    indegree = {v: 0 for v in items}
    succ = {v: set() for v in items}
    for u, v in edges:
        if v not in succ[u]:
            succ[u].add(v)
            indegree[v] += 1
    heap = [(key(v), v) for v in items if indegree[v] == 0]
    heapq.heapify(heap)
    out = []
    while heap:
        _, v = heapq.heappop(heap)
        out.append(v)
        for w in sorted(succ[v], key=key):
            indegree[w] -= 1
            if indegree[w] == 0:
                heapq.heappush(heap, (key(w), w))
    if len(out) != len(indegree):
        raise ValueError("graph has a cycle; condense before ordering")
    return out


def condense_and_linearize(graph: PrecedenceGraph, key: Key,
                           slice_index: int, sealed_at: Round) -> SliceOrder:
    """Deterministic total order over one sealed slice.

    Component ordering uses the lifted key (least member key); member
    ordering inside a component follows the causal subgraph first, then the
    key among causally incomparable members. Evidence edges that cross
    distinct components are reported as enforceable.
    """
    successors: dict[Digest, list[Digest]] = {v: [] for v in graph.vertices}
    for u, v in sorted(graph.causal_edges | graph.svp_edges):
        successors[u].append(v)
    components = strongly_connected_components(graph.vertices, successors)
    component_of: dict[Digest, int] = {}
    for cid, members in enumerate(components):
        for v in members:
            component_of[v] = cid
    component_key = {cid: min(key(v) for v in members)
                     for cid, members in enumerate(components)}
    component_edges = set()
    for u, v in graph.causal_edges | graph.svp_edges:
        cu, cv = component_of[u], component_of[v]
        if cu != cv:
            component_edges.add((cu, cv))
    component_order = key_minimal_topological_order(
        sorted(component_key), component_edges, component_key.__getitem__)
    internal_causal: dict[int, list[tuple[Digest, Digest]]] = {}
    for u, v in graph.causal_edges:
        cid = component_of[u]
        if cid == component_of[v]:
            internal_causal.setdefault(cid, []).append((u, v))
    ordered: list[Digest] = []
    for cid in component_order:
        members = components[cid]
        ordered.extend(key_minimal_topological_order(
            sorted(members, key=key), internal_causal.get(cid, ()), key))
    enforceable = tuple(sorted(
        (u, v) for (u, v) in graph.svp_edges
        if component_of[u] != component_of[v]))
    return SliceOrder(slice_index, tuple(ordered), enforceable, sealed_at)
