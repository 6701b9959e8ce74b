"""Committed-DAG vertex store and ancestry queries.

Vertices carry authenticated metadata only: creator, round, parent digests
and an opaque payload size. Parent references always point exactly one
round below the child, so ancestry strictly decreases in round along every
path; the traversal helpers below rely on that to bound their work.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import (
    BadParentRound,
    DuplicateCreatorRound,
    FrontierSkew,
    MissingParent,
    UnknownDigest,
)

CreatorId = int
Round = int
Digest = bytes

DIGEST_SIZE = 32


def compute_digest(creator: CreatorId, round_: Round, parents: Iterable[Digest],
                   payload_size: int) -> Digest:
    """Content digest over (creator, round, sorted parents, payload size)."""
    h = hashlib.sha256()
    h.update(b"auf|%d|%d|%d|" % (creator, round_, payload_size))
    for p in sorted(parents):
        h.update(p)
    return h.digest()


@dataclass(frozen=True)
class AufMeta:
    """One committed vertex: the atomic unit the ordering layer ranks."""

    digest: Digest
    creator: CreatorId
    round: Round
    parents: tuple[Digest, ...]  # sorted; each one round below
    payload_size: int = 0


def make_auf(creator: CreatorId, round_: Round, parents: Iterable[Digest] = (),
             payload_size: int = 0) -> AufMeta:
    parents = tuple(sorted(parents))
    digest = compute_digest(creator, round_, parents, payload_size)
    return AufMeta(digest, creator, round_, parents, payload_size)


def completion_key(meta: AufMeta) -> tuple[Round, CreatorId, Digest]:
    """Deterministic total-order key (round, creator, digest).

    Used to resolve every residual tie identically at all replicas.
    """
    return (meta.round, meta.creator, meta.digest)


class DagStore:
    """Monotonically growing committed prefix, closed under parent references.

    Single writer; reads are safe between fully applied events.
    """

    def __init__(self) -> None:
        self.vertices: dict[Digest, AufMeta] = {}
        self.by_creator_round: dict[tuple[CreatorId, Round], Digest] = {}
        self.frontier: Round = -1

    def __contains__(self, digest: Digest) -> bool:
        return digest in self.vertices

    def __len__(self) -> int:
        return len(self.vertices)

    def get(self, digest: Digest) -> AufMeta:
        try:
            return self.vertices[digest]
        except KeyError:
            raise UnknownDigest(digest.hex()) from None

    def canonical_at(self, creator: CreatorId, round_: Round) -> Optional[Digest]:
        return self.by_creator_round.get((creator, round_))

    def insert_vertex(self, meta: AufMeta) -> None:
        if meta.round > self.frontier + 1:
            raise FrontierSkew(
                f"round {meta.round} ahead of frontier {self.frontier}")
        slot = (meta.creator, meta.round)
        if slot in self.by_creator_round or meta.digest in self.vertices:
            raise DuplicateCreatorRound(f"creator {meta.creator} round {meta.round}")
        if meta.round == 0:
            if meta.parents:
                raise BadParentRound("round-0 vertices carry no parents")
        else:
            for p in meta.parents:
                parent = self.vertices.get(p)
                if parent is None:
                    raise MissingParent(p.hex())
                if parent.round != meta.round - 1:
                    raise BadParentRound(
                        f"parent at round {parent.round}, child at {meta.round}")
        self.vertices[meta.digest] = meta
        self.by_creator_round[slot] = meta.digest

    def advance_frontier(self, round_: Round) -> None:
        if round_ != self.frontier + 1:
            raise FrontierSkew(
                f"expected round {self.frontier + 1}, got {round_}")
        self.frontier = round_

    def is_ancestor(self, a: Digest, b: Digest) -> bool:
        """True iff `a` lies in the reflexive ancestor closure of `b`."""
        meta_a = self.get(a)
        self.get(b)
        if a == b:
            return True
        floor = meta_a.round
        stack = [b]
        seen = {b}
        while stack:
            d = stack.pop()
            if d == a:
                return True
            m = self.vertices[d]
            if m.round <= floor:
                continue
            for p in m.parents:
                if p not in seen:
                    seen.add(p)
                    stack.append(p)
        return False

    def bounded_ancestors(self, start: Digest, floor_round: Round) -> set[Digest]:
        """Reflexive ancestors of `start` with round >= floor_round.

        The traversal never dereferences a vertex below the floor: floor
        vertices are included but their parents are not expanded.
        """
        meta = self.get(start)
        if floor_round > meta.round:
            raise ValueError(
                f"floor {floor_round} above start round {meta.round}")
        out: set[Digest] = set()
        stack = [start]
        while stack:
            d = stack.pop()
            if d in out:
                continue
            out.add(d)
            m = self.vertices[d]
            if m.round > floor_round:
                for p in m.parents:
                    if p not in out:
                        stack.append(p)
        return out
