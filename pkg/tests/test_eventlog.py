"""Canonical record framing, log round-trips, and stream validation."""

import pytest
from hypothesis import given, settings, strategies as st

from helpers import generate_plan
from mrv import (
    EventLogWriter,
    RoundCommitted,
    RunConfig,
    SimPlan,
    SliceDelivered,
    load_event_log,
    make_auf,
    save_event_log,
    validate_stream,
)
from mrv.errors import (
    CorruptLog,
    DuplicateSliceMember,
    MalformedEvent,
    NonConsecutiveRound,
    UnknownSliceMember,
)
from mrv.eventlog import StreamValidator, decode_record, encode_record

json_values = st.recursive(
    st.none() | st.booleans() | st.integers(-2**63, 2**63) | st.text(max_size=20),
    lambda children: st.lists(children, max_size=4)
    | st.dictionaries(st.text(max_size=8), children, max_size=4),
    max_leaves=12)


@settings(max_examples=60, deadline=None)
@given(st.dictionaries(st.text(max_size=10), json_values, max_size=6))
def test_record_round_trip(obj):
    assert decode_record(encode_record(obj)[:-1]) == obj


def test_floats_are_rejected():
    with pytest.raises(ValueError):
        encode_record({"rate": 0.5})
    with pytest.raises(ValueError):
        encode_record({"nested": [{"x": 1.0}]})


def test_flipped_byte_is_detected():
    record = encode_record({"kind": "probe", "value": 123})
    for pos in range(len(record) - 1):
        original = record[pos:pos + 1]
        flipped = bytes([record[pos] ^ 0x01])
        if flipped == original:
            continue
        damaged = record[:pos] + flipped + record[pos + 1:]
        with pytest.raises(CorruptLog):
            decode_record(damaged[:-1])


def test_config_invariants():
    with pytest.raises(ValueError):
        RunConfig(n=3, f=1, w_max=2)
    with pytest.raises(ValueError):
        RunConfig(n=4, f=1, w_max=0)
    cfg = RunConfig(n=4, f=1, w_max=2)
    assert cfg.quorum == 3
    assert cfg.signal_threshold == 2


def simple_plan(seed=3):
    cfg = RunConfig(n=4, f=1, w_max=2, seed=seed)
    return SimPlan(config=cfg, rounds=6, wave_length=2)


def test_event_log_round_trip(tmp_path):
    config, events = generate_plan(simple_plan())
    path = tmp_path / "run.log"
    save_event_log(path, config, events)
    loaded_config, loaded = load_event_log(path)
    assert loaded_config == config
    assert loaded == events


def test_replay_is_byte_stable(tmp_path):
    config, events = generate_plan(simple_plan())
    a = tmp_path / "a.log"
    b = tmp_path / "b.log"
    save_event_log(a, config, events)
    save_event_log(b, config, events)
    assert a.read_bytes() == b.read_bytes()


def test_corrupt_log_file(tmp_path):
    config, events = generate_plan(simple_plan())
    path = tmp_path / "run.log"
    save_event_log(path, config, events)
    raw = bytearray(path.read_bytes())
    raw[len(raw) // 2] ^= 0x20
    path.write_bytes(bytes(raw))
    with pytest.raises(CorruptLog):
        load_event_log(path)


def test_truncated_log_file(tmp_path):
    config, events = generate_plan(simple_plan())
    path = tmp_path / "run.log"
    save_event_log(path, config, events)
    raw = path.read_bytes()
    path.write_bytes(raw[:-3])
    with pytest.raises(CorruptLog):
        load_event_log(path)


def test_empty_log_replays_to_nothing(tmp_path):
    path = tmp_path / "empty.log"
    config = RunConfig(n=4, f=1, w_max=2)
    save_event_log(path, config, [])
    loaded_config, events = load_event_log(path)
    assert loaded_config == config
    assert events == []


def test_writer_accepts_consecutive_rounds(tmp_path):
    config = RunConfig(n=2, f=0, w_max=2)
    with EventLogWriter(tmp_path / "w.log", config) as writer:
        writer.append(RoundCommitted(0, (make_auf(0, 0), make_auf(1, 0))))
        g0 = make_auf(0, 0)
        writer.append(RoundCommitted(1, (make_auf(0, 1, [g0.digest]),)))


def test_writer_rejects_round_gap(tmp_path):
    config = RunConfig(n=2, f=0, w_max=2)
    with EventLogWriter(tmp_path / "w.log", config) as writer:
        writer.append(RoundCommitted(0, (make_auf(0, 0), make_auf(1, 0))))
        with pytest.raises(NonConsecutiveRound):
            writer.append(RoundCommitted(2, ()))


def test_writer_rejects_duplicate_slice_member(tmp_path):
    config = RunConfig(n=2, f=0, w_max=2)
    g0, g1 = make_auf(0, 0), make_auf(1, 0)
    with EventLogWriter(tmp_path / "w.log", config) as writer:
        writer.append(RoundCommitted(0, (g0, g1)))
        writer.append(SliceDelivered(0, (g0.digest,)))
        with pytest.raises(DuplicateSliceMember):
            writer.append(SliceDelivered(1, (g0.digest,)))


def test_writer_rejects_unknown_slice_member(tmp_path):
    config = RunConfig(n=2, f=0, w_max=2)
    with EventLogWriter(tmp_path / "w.log", config) as writer:
        writer.append(RoundCommitted(0, (make_auf(0, 0),)))
        with pytest.raises(UnknownSliceMember):
            writer.append(SliceDelivered(0, (make_auf(1, 0).digest,)))


def test_validator_rejects_thin_certificates():
    config = RunConfig(n=4, f=1, w_max=2)
    validator = StreamValidator(config)
    genesis = tuple(make_auf(c, 0) for c in range(4))
    validator.apply(RoundCommitted(0, genesis))
    with pytest.raises(MalformedEvent):
        validator.apply(RoundCommitted(
            1, (make_auf(0, 1, [genesis[0].digest]),)))


def test_every_prefix_of_a_valid_log_is_valid():
    config, events = generate_plan(simple_plan(seed=11))
    for cut in range(len(events) + 1):
        validate_stream(config, events[:cut])
