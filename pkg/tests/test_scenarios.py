"""Every catalog stream exhibits exactly its named condition."""

import pytest

from helpers import naive_closures, run_report
from mrv import (
    CATALOG,
    Verdict,
    diff_reports,
    oracle_evaluate,
    targeted_scenario,
    validate_stream,
)
from mrv.errors import UnknownScenario


EXPECTED_NAMES = {
    "empty-window", "exact-f-delta", "conflict", "immature",
    "svp-vs-causal", "three-cycle", "signal-at-coexistence",
}


def test_catalog_names():
    assert set(CATALOG) == EXPECTED_NAMES


def test_unknown_scenario_rejected():
    with pytest.raises(UnknownScenario):
        targeted_scenario("no-such-thing")


@pytest.mark.parametrize("name", sorted(EXPECTED_NAMES))
def test_scenario_streams_are_valid_and_reference_clean(name):
    config, events = targeted_scenario(name)
    validate_stream(config, events)
    report, _ = run_report(config, events)
    assert diff_reports(report, oracle_evaluate(config, events)) == []


def only_verdict(report):
    assert len(report.verdicts) == 1
    return next(iter(report.verdicts.values()))


def test_empty_window_scenario():
    config, events = targeted_scenario("empty-window")
    report, _ = run_report(config, events)
    assert only_verdict(report) is Verdict.ABSTAIN_NO_SIGNAL
    (a, b), = report.verdicts.keys()
    horizon = max(report.stops[a][0], report.stops[b][0])
    coexist = max(report.births[a], report.births[b])
    assert horizon <= coexist  # nothing to scan
    assert report.stops[a][1] and report.stops[b][1]


def test_exact_f_delta_scenario():
    config, events = targeted_scenario("exact-f-delta")
    oracle = oracle_evaluate(config, events)
    report, _ = run_report(config, events)
    assert only_verdict(report) is Verdict.ABSTAIN_NO_SIGNAL
    (a, b), = report.verdicts.keys()
    window = range(max(oracle.births[a], oracle.births[b]) + 1,
                   max(oracle.stops[a][0], oracle.stops[b][0]) + 1)
    deltas = [oracle.visibility(a, t) - oracle.visibility(b, t)
              for t in window]
    assert max(abs(d) for d in deltas) == config.f


def test_conflict_scenario():
    config, events = targeted_scenario("conflict")
    oracle = oracle_evaluate(config, events)
    report, _ = run_report(config, events)
    assert only_verdict(report) is Verdict.ABSTAIN_CONFLICT
    (a, b), = report.verdicts.keys()
    window = range(max(oracle.births[a], oracle.births[b]) + 1,
                   max(oracle.stops[a][0], oracle.stops[b][0]) + 1)
    deltas = [oracle.visibility(a, t) - oracle.visibility(b, t)
              for t in window]
    threshold = config.signal_threshold
    assert any(d >= threshold for d in deltas)
    assert any(d <= -threshold for d in deltas)


def test_immature_scenario():
    config, events = targeted_scenario("immature")
    report, _ = run_report(config, events)
    assert only_verdict(report) is Verdict.ABSTAIN_TRUNCATED
    (a, b), = report.verdicts.keys()
    assert report.stops[a][1] is False
    assert report.stops[b][1] is False


def test_svp_vs_causal_scenario():
    """Two evidence edges close a cycle through a causal edge; causality
    survives inside the absorbed component and nothing is enforceable."""
    config, events = targeted_scenario("svp-vs-causal")
    report, _ = run_report(config, events)
    order = report.orders[0]
    members = report.slices[0]
    closures = naive_closures(events)
    causal_pairs = [(anc, d) for d in members for anc in closures[d]
                    if anc != d and anc in set(members)]
    assert len(causal_pairs) == 1
    ancestor, descendant = causal_pairs[0]
    position = {d: i for i, d in enumerate(order.ordered)}
    assert position[ancestor] < position[descendant]
    assert order.enforceable_svp == ()
    edges = sum(1 for v in report.verdicts.values()
                if v in (Verdict.EDGE_FORWARD, Verdict.EDGE_BACKWARD))
    assert edges == 2


def test_three_cycle_scenario():
    config, events = targeted_scenario("three-cycle")
    report, _ = run_report(config, events)
    order = report.orders[0]
    assert order.enforceable_svp == ()
    edges = sum(1 for v in report.verdicts.values()
                if v in (Verdict.EDGE_FORWARD, Verdict.EDGE_BACKWARD))
    assert edges == 3
    members = report.slices[0]
    closures = naive_closures(events)
    assert not any(anc != d and anc in set(members)
                   for d in members for anc in closures[d])
    # pure completion-key order: birth rounds are staggered 1, 2, 3
    births = [report.births[d] for d in order.ordered]
    assert births == sorted(births)


def test_signal_at_coexistence_scenario():
    config, events = targeted_scenario("signal-at-coexistence")
    oracle = oracle_evaluate(config, events)
    report, _ = run_report(config, events)
    assert only_verdict(report) is Verdict.ABSTAIN_NO_SIGNAL
    (a, b), = report.verdicts.keys()
    coexist = max(oracle.births[a], oracle.births[b])
    delta_at_coexist = abs(oracle.visibility(a, coexist)
                           - oracle.visibility(b, coexist))
    assert delta_at_coexist >= config.signal_threshold
