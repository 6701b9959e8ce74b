"""Sealed-order output log: same record framing as the event log.

The output log carries the contiguous prefix of sealed slice orders in
delivery order, so two replicas that consumed the same event log must
produce byte-identical output files. Resume mode replays deterministically
from the event log and verifies the already-written prefix record by record
before appending the remainder.
"""

from __future__ import annotations

from pathlib import Path

from .errors import CorruptLog, MalformedEvent
from .eventlog import (
    RunConfig,
    config_to_obj,
    decode_record,
    encode_record,
    obj_to_config,
    read_records,
)
from .linearizer import SliceOrder


def order_to_obj(order: SliceOrder) -> dict:
    return {"kind": "order", "index": order.slice_index,
            "sealed_at": order.sealed_at,
            "ordered": [d.hex() for d in order.ordered],
            "enforced": [[a.hex(), b.hex()] for a, b in order.enforceable_svp]}


def obj_to_order(obj: dict) -> SliceOrder:
    try:
        if obj["kind"] != "order":
            raise MalformedEvent("not an order record")
        return SliceOrder(
            obj["index"],
            tuple(bytes.fromhex(d) for d in obj["ordered"]),
            tuple((bytes.fromhex(a), bytes.fromhex(b))
                  for a, b in obj["enforced"]),
            obj["sealed_at"])
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedEvent(f"bad order record: {exc}") from None


class OutputLogWriter:
    """Append sealed orders; in resume mode verify the existing prefix first.

    Restarting is replaying the event log from the start against the
    existing output file: regenerated records must match what is already on
    disk byte for byte, after which new records append as usual.
    """

    def __init__(self, path, config: RunConfig, resume: bool = False) -> None:
        self.path = Path(path)
        self.config = config
        self._existing: list[bytes] = []
        self._position = 0
        if resume and self.path.exists():
            raw = self.path.read_bytes()
            if raw and not raw.endswith(b"\n"):
                raise CorruptLog("truncated final record")
            lines = [line + b"\n" for line in raw.split(b"\n")[:-1]]
            if not lines:
                raise CorruptLog("output log has no config header")
            header = obj_to_config(decode_record(lines[0][:-1]))
            if header != config:
                raise CorruptLog("output log was written under a different config")
            for line in lines[1:]:
                decode_record(line[:-1])  # fail fast on damage
            self._existing = lines[1:]
            self._fh = open(self.path, "ab")
        else:
            self._fh = open(self.path, "wb")
            self._fh.write(encode_record(config_to_obj(config)))

    def emit(self, order: SliceOrder) -> None:
        record = encode_record(order_to_obj(order))
        if self._position < len(self._existing):
            if record != self._existing[self._position]:
                raise CorruptLog(
                    f"resume mismatch at output record {self._position}")
            self._position += 1
            return
        self._fh.write(record)

    def close(self) -> None:
        if self._fh:
            if self._position < len(self._existing):
                self._fh.close()
                self._fh = None
                raise CorruptLog(
                    "existing output log is longer than the regenerated stream")
            self._fh.close()
            self._fh = None

    def __enter__(self) -> "OutputLogWriter":
        return self

    def __exit__(self, exc_type, *exc) -> None:
        if exc_type is None:
            self.close()
        elif self._fh:
            self._fh.close()
            self._fh = None


def load_output_log(path) -> tuple[RunConfig, list[SliceOrder]]:
    records = read_records(path)
    if not records:
        raise CorruptLog("output log has no config header")
    config = obj_to_config(records[0])
    return config, [obj_to_order(obj) for obj in records[1:]]
