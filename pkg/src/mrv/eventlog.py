"""Committed-output event stream: contract types, canonical log format, validation.

The log is line oriented. Each record is

    <length:8 hex> <payload> <crc32:8 hex>\\n

where the payload is canonical JSON: sorted keys, compact separators, ASCII
escapes, and no floating-point values anywhere. Two logs are byte-identical
exactly when they carry the same record sequence, which is what the
cross-instance determinism checks diff.
"""

from __future__ import annotations

import json
import zlib
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Union

from .dag import AufMeta, DagStore, Digest, Round, completion_key, make_auf
from .errors import (
    CorruptLog,
    DuplicateSliceMember,
    MalformedEvent,
    NonConsecutiveRound,
    UnknownSliceMember,
)

LOG_FORMAT_VERSION = 1

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RunConfig:
    """Protocol constants shared by producer and consumer of one stream."""

    n: int
    f: int
    w_max: int
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n < 1 or self.f < 0 or self.n < 3 * self.f + 1:
            raise ValueError(f"need n >= 3f+1, got n={self.n} f={self.f}")
        if self.w_max < 1:
            raise ValueError("w_max must be at least 1")
        if not 0 <= self.seed <= _MASK64:
            raise ValueError("seed must fit in 64 bits")

    @property
    def quorum(self) -> int:
        """Visibility level that cannot be reached without correct creators."""
        return 2 * self.f + 1

    @property
    def signal_threshold(self) -> int:
        """Smallest per-round visibility margin no f creators can forge."""
        return self.f + 1


@dataclass(frozen=True)
class RoundCommitted:
    round: Round
    canonical: tuple[AufMeta, ...]  # strictly increasing creator order


@dataclass(frozen=True)
class SliceDelivered:
    index: int
    members: tuple[Digest, ...]  # completion-key order


Event = Union[RoundCommitted, SliceDelivered]


# --- canonical record encoding ---------------------------------------------

def _check_canonical(obj) -> None:
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return
    if isinstance(obj, float):
        raise ValueError("floating point is not allowed in canonical records")
    if isinstance(obj, list):
        for item in obj:
            _check_canonical(item)
        return
    if isinstance(obj, dict):
        for k, v in obj.items():
            if not isinstance(k, str):
                raise ValueError("record keys must be strings")
            _check_canonical(v)
        return
    raise ValueError(f"unsupported value in canonical record: {type(obj)!r}")


def encode_record(obj: dict) -> bytes:
    _check_canonical(obj)
    payload = json.dumps(obj, sort_keys=True, separators=(",", ":"),
                         ensure_ascii=True).encode("ascii")
    crc = zlib.crc32(payload) & 0xFFFFFFFF
    return b"%08x " % len(payload) + payload + b" %08x\n" % crc


def decode_record(line: bytes) -> dict:
    if len(line) < 19:
        raise CorruptLog("record shorter than framing")
    try:
        length = int(line[:8], 16)
    except ValueError:
        raise CorruptLog("unparseable length prefix") from None
    if len(line) != 8 + 1 + length + 1 + 8 or line[8:9] != b" ":
        raise CorruptLog("record length does not match its prefix")
    payload = line[9:9 + length]
    if line[9 + length:10 + length] != b" ":
        raise CorruptLog("missing checksum separator")
    try:
        crc = int(line[10 + length:], 16)
    except ValueError:
        raise CorruptLog("unparseable checksum") from None
    if crc != (zlib.crc32(payload) & 0xFFFFFFFF):
        raise CorruptLog("checksum mismatch")
    try:
        obj = json.loads(payload)
    except ValueError:
        raise CorruptLog("payload is not valid JSON") from None
    if not isinstance(obj, dict):
        raise CorruptLog("record payload must be an object")
    return obj


def read_records(path) -> list[dict]:
    data = Path(path).read_bytes()
    if data and not data.endswith(b"\n"):
        raise CorruptLog("truncated final record")
    out = []
    for line in data.split(b"\n")[:-1] if data else []:
        out.append(decode_record(line))
    return out


# --- event <-> record objects ----------------------------------------------

def config_to_obj(config: RunConfig) -> dict:
    return {"kind": "config", "format": LOG_FORMAT_VERSION, "n": config.n,
            "f": config.f, "w_max": config.w_max, "seed": config.seed}


def obj_to_config(obj: dict) -> RunConfig:
    try:
        if obj["kind"] != "config" or obj["format"] != LOG_FORMAT_VERSION:
            raise MalformedEvent("not a config record")
        return RunConfig(n=obj["n"], f=obj["f"], w_max=obj["w_max"],
                         seed=obj["seed"])
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedEvent(f"bad config record: {exc}") from None


def event_to_obj(event: Event) -> dict:
    if isinstance(event, RoundCommitted):
        canonical = [{"creator": m.creator,
                      "parents": [p.hex() for p in m.parents],
                      "payload_size": m.payload_size}
                     for m in event.canonical]
        return {"kind": "round", "round": event.round, "canonical": canonical}
    if isinstance(event, SliceDelivered):
        return {"kind": "slice", "index": event.index,
                "members": [d.hex() for d in event.members]}
    raise MalformedEvent(f"unsupported event {event!r}")


def obj_to_event(obj: dict) -> Event:
    try:
        kind = obj["kind"]
        if kind == "round":
            round_ = obj["round"]
            metas = tuple(
                make_auf(item["creator"], round_,
                         [bytes.fromhex(p) for p in item["parents"]],
                         item["payload_size"])
                for item in obj["canonical"])
            return RoundCommitted(round_, metas)
        if kind == "slice":
            return SliceDelivered(obj["index"],
                                  tuple(bytes.fromhex(d) for d in obj["members"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedEvent(f"bad event record: {exc}") from None
    raise MalformedEvent(f"unknown record kind {obj.get('kind')!r}")


# --- stream validation -------------------------------------------------------

class StreamValidator:
    """Prefix-checkable stream validity: feed events in order, fail fast.

    Every valid log prefix is itself a valid log, so validation state is
    exactly the replayed prefix.
    """

    def __init__(self, config: RunConfig) -> None:
        self.config = config
        self.store = DagStore()
        self.delivered: set[Digest] = set()
        self.next_slice_index = 0

    def apply(self, event: Event) -> None:
        if isinstance(event, RoundCommitted):
            self._apply_round(event)
        elif isinstance(event, SliceDelivered):
            self._apply_slice(event)
        else:
            raise MalformedEvent(f"unsupported event {event!r}")

    def _apply_round(self, event: RoundCommitted) -> None:
        if event.round != self.store.frontier + 1:
            raise NonConsecutiveRound(
                f"expected round {self.store.frontier + 1}, got {event.round}")
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
            self.store.insert_vertex(meta)
        self.store.advance_frontier(event.round)

    def _apply_slice(self, event: SliceDelivered) -> None:
        if event.index != self.next_slice_index:
            raise MalformedEvent(
                f"expected slice index {self.next_slice_index}, got {event.index}")
        if not event.members:
            raise MalformedEvent("empty slice")
        metas = []
        seen: set[Digest] = set()
        for d in event.members:
            if d in seen or d in self.delivered:
                raise DuplicateSliceMember(d.hex())
            seen.add(d)
            if d not in self.store:
                raise UnknownSliceMember(d.hex())
            metas.append(self.store.get(d))
        if [m.digest for m in sorted(metas, key=completion_key)] != list(event.members):
            raise MalformedEvent("slice members must be in completion-key order")
        self.delivered.update(event.members)
        self.next_slice_index += 1


# --- log files ---------------------------------------------------------------

class EventLogWriter:
    """Single-writer append path; validates stream invariants before each append."""

    def __init__(self, path, config: RunConfig) -> None:
        self.path = Path(path)
        self.config = config
        self._validator = StreamValidator(config)
        self._fh = open(self.path, "wb")
        self._fh.write(encode_record(config_to_obj(config)))

    def append(self, event: Event) -> None:
        self._validator.apply(event)
        self._fh.write(encode_record(event_to_obj(event)))

    def close(self) -> None:
        if self._fh:
            self._fh.close()
            self._fh = None

    def __enter__(self) -> "EventLogWriter":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def save_event_log(path, config: RunConfig, events: Iterable[Event]) -> None:
    with EventLogWriter(path, config) as writer:
        for event in events:
            writer.append(event)


def load_event_log(path) -> tuple[RunConfig, list[Event]]:
    """Replay a log file into its config header and event sequence."""
    records = read_records(path)
    if not records:
        raise CorruptLog("log has no config header")
    config = obj_to_config(records[0])
    return config, [obj_to_event(obj) for obj in records[1:]]


def validate_stream(config: RunConfig, events: Iterable[Event]) -> None:
    validator = StreamValidator(config)
    for event in events:
        validator.apply(event)
