"""Slice-size scaling micro-benchmark.

Builds one synthetic slice of exactly the requested size over a dense
honest stream and times the engine's phases. Pair evaluations must come out
at size*(size-1)/2 exactly; the wall-clock trend of the pair phase against
slice size is summarized as a log-log slope.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

from .dag import completion_key, make_auf
from .engine import OrderingEngine
from .eventlog import Event, RoundCommitted, RunConfig, SliceDelivered
from .simulator import SplitMix64


@dataclass(frozen=True)
class BenchRow:
    size: int
    pair_evaluations: int
    pair_seconds: float
    total_seconds: float


def build_bench_log(size: int, n: int = 10, w_max: int = 10,
                    seed: int = 1) -> tuple[RunConfig, list[Event]]:
    """Dense honest stream delivering a single slice of exactly `size` units."""
    if size < 1:
        raise ValueError("size must be positive")
    config = RunConfig(n=n, f=(n - 1) // 3, w_max=w_max, seed=seed)
    rng = SplitMix64(seed)
    events: list[Event] = []
    deliver_round = (size - 1) // n  # first round by which `size` exist
    committed = []
    previous = []
    for round_ in range(deliver_round + w_max + 2):
        metas = tuple(make_auf(c, round_, [m.digest for m in previous],
                               64 + rng.below(1985))
                      for c in range(n))
        events.append(RoundCommitted(round_, metas))
        committed.extend(metas)
        previous = list(metas)
        if round_ == deliver_round:
            members = sorted(committed, key=completion_key)[:size]
            events.append(SliceDelivered(
                0, tuple(m.digest for m in members)))
    return config, events


def fit_loglog_slope(points: list[tuple[float, float]]) -> float:
    """Least-squares slope of log(y) against log(x)."""
    xs = [math.log(x) for x, _ in points]
    ys = [math.log(y) for _, y in points]
    mean_x = sum(xs) / len(xs)
    mean_y = sum(ys) / len(ys)
    num = sum((x - mean_x) * (y - mean_y) for x, y in zip(xs, ys))
    den = sum((x - mean_x) ** 2 for x in xs)
    return num / den


def scaling_bench(sizes: list[int], n: int = 10, w_max: int = 10,
                  seed: int = 1, repeat: int = 3) -> list[BenchRow]:
    """Measure one row per slice size; timings are the best of `repeat` runs."""
    if sizes != sorted(sizes):
        raise ValueError("sizes must be ascending")
    rows = []
    for size in sizes:
        config, events = build_bench_log(size, n=n, w_max=w_max, seed=seed)
        best_pairs = math.inf
        best_total = math.inf
        pair_evaluations = 0
        for _ in range(max(1, repeat)):
            engine = OrderingEngine(config)
            start = time.perf_counter()
            report = engine.run(events)
            total = time.perf_counter() - start
            pair_evaluations = len(report.verdicts)
            best_pairs = min(best_pairs, engine.timings["pairs"])
            best_total = min(best_total, total)
        rows.append(BenchRow(size, pair_evaluations, best_pairs, best_total))
    return rows


def pair_count_slope(rows: list[BenchRow]) -> float:
    return fit_loglog_slope([(r.size, r.pair_evaluations) for r in rows])


def pair_time_slope(rows: list[BenchRow]) -> float:
    return fit_loglog_slope([(r.size, max(r.pair_seconds, 1e-9))
                             for r in rows])


def rows_to_tsv(rows: list[BenchRow]) -> str:
    lines = ["size\tpair_evaluations\tpair_seconds\ttotal_seconds"]
    for r in rows:
        lines.append(f"{r.size}\t{r.pair_evaluations}\t"
                     f"{r.pair_seconds:.6f}\t{r.total_seconds:.6f}")
    return "\n".join(lines) + "\n"
