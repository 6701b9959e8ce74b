"""Experiment command line: simulate, order, verify, bench, scenario.

Exit codes: 0 success, 2 invariant violation (engine/reference mismatch or a
broken run property), 3 input error (bad arguments, unreadable or invalid
logs, unknown scenario names).

The MRV_SEED environment variable, when set, overrides the seed given to
`simulate` and `bench`.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import bench as bench_mod
from . import scenarios
from .errors import MrvError
from .eventlog import RunConfig, load_event_log, save_event_log
from .metrics import run_experiment
from .output import OutputLogWriter
from .simulator import (
    ConflictInjector,
    SelectiveParents,
    SimPlan,
    WithholdRounds,
    generate,
)

EXIT_OK = 0
EXIT_INVARIANT = 2
EXIT_INPUT = 3


def _parse_creators(text: str) -> frozenset[int]:
    if text in ("", "-"):
        return frozenset()
    return frozenset(int(part) for part in text.split("+"))


def parse_strategy(spec: str) -> tuple[int, object]:
    """Forms: 'IDX:withhold:P', 'IDX:selective:FAV:SHUN', 'IDX:conflict:A:B'.

    FAV and SHUN are '+'-separated creator lists, '-' for empty.
    """
    parts = spec.split(":")
    try:
        creator = int(parts[0])
        kind = parts[1]
        if kind == "withhold":
            return creator, WithholdRounds(float(parts[2]))
        if kind == "selective":
            return creator, SelectiveParents(_parse_creators(parts[2]),
                                             _parse_creators(parts[3]))
        if kind == "conflict":
            return creator, ConflictInjector(int(parts[2]), int(parts[3]))
    except (IndexError, ValueError) as exc:
        raise ValueError(f"bad strategy spec {spec!r}: {exc}") from None
    raise ValueError(f"unknown strategy kind in {spec!r}")


def _seed_from_env(default: int) -> int:
    raw = os.environ.get("MRV_SEED")
    if raw is None:
        return default
    return int(raw)


def _cmd_simulate(args) -> int:
    seed = _seed_from_env(args.seed)
    config = RunConfig(n=args.n, f=args.f, w_max=args.w_max, seed=seed)
    strategies = dict(parse_strategy(spec) for spec in args.strategy or [])
    plan = SimPlan(config=config, rounds=args.rounds, wave_length=args.wave,
                   strategies=strategies, thin=args.thin)
    events = generate(plan)
    save_event_log(args.log, config, events)
    slices = sum(1 for e in events if type(e).__name__ == "SliceDelivered")
    print(f"wrote {args.log}: {len(events)} events, {slices} slices, "
          f"seed {seed}")
    return EXIT_OK


def _write_report_dir(directory: Path, result) -> None:
    from . import plots

    directory.mkdir(parents=True, exist_ok=True)
    run_path = directory / "run.json"
    with open(run_path, "wb") as fh:
        fh.write(result.metrics.record_bytes())
    timing = ", ".join(f"{k}={v:.6f}" for k, v in result.metrics.timing.items())
    (directory / "timing.txt").write_text(timing + "\n")
    rows = ["slice\tsize\tmax_birth\tseal_round\tsealed_at\tdelay\t"
            "enforceable"]
    delay_rows = []
    for order in result.orders:
        members = result.report.slices[order.slice_index]
        max_birth = max(result.report.births[d] for d in members)
        seal_round = max(result.report.stops[d][0] for d in members)
        delay = seal_round - max_birth
        delay_rows.append((order.slice_index, delay))
        rows.append(f"{order.slice_index}\t{len(members)}\t{max_birth}\t"
                    f"{seal_round}\t{order.sealed_at}\t{delay}\t"
                    f"{len(order.enforceable_svp)}")
    (directory / "slices.tsv").write_text("\n".join(rows) + "\n")
    plots.save_verdict_breakdown(result.metrics, directory / "verdicts.png")
    plots.save_sealing_delays(delay_rows, directory / "sealing.png")


def _cmd_order(args) -> int:
    config, events = load_event_log(args.log)
    writer = None
    if args.out:
        writer = OutputLogWriter(args.out, config, resume=args.resume)
    result = run_experiment(config, events, verify=not args.no_verify,
                            on_sealed=writer.emit if writer else None)
    if writer:
        writer.close()
    sys.stdout.buffer.write(result.metrics.record_bytes())
    if args.report:
        _write_report_dir(Path(args.report), result)
    if result.discrepancies:
        for line in result.discrepancies:
            print(f"mismatch: {line}", file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


def _cmd_verify(args) -> int:
    config, events = load_event_log(args.log)
    result = run_experiment(config, events, verify=True)
    if result.discrepancies:
        for line in result.discrepancies:
            print(f"mismatch: {line}")
        return EXIT_INVARIANT
    canonical = result.metrics.canonical
    print(f"ok: {canonical['aufs_committed']} units, "
          f"{canonical['pair_evaluations']} pairs, "
          f"{canonical['slices_sealed']} slices match the reference "
          f"evaluation")
    return EXIT_OK


def _cmd_scenario(args) -> int:
    if args.list or args.name == "list":
        for name in sorted(scenarios.CATALOG):
            print(name)
        return EXIT_OK
    if not args.name or not args.log:
        print("scenario requires NAME and --log PATH", file=sys.stderr)
        return EXIT_INPUT
    config, events = scenarios.targeted_scenario(args.name)
    save_event_log(args.log, config, events)
    print(f"wrote {args.log}: scenario {args.name} "
          f"(n={config.n} f={config.f} w_max={config.w_max})")
    return EXIT_OK


def _cmd_bench(args) -> int:
    seed = _seed_from_env(args.seed)
    sizes = sorted(int(s) for s in args.sizes.split(","))
    rows = bench_mod.scaling_bench(sizes, n=args.n, w_max=args.w_max,
                                   seed=seed, repeat=args.repeat)
    tsv = bench_mod.rows_to_tsv(rows)
    sys.stdout.write(tsv)
    count_slope = bench_mod.pair_count_slope(rows) if len(rows) > 1 else 0.0
    time_slope = bench_mod.pair_time_slope(rows) if len(rows) > 1 else 0.0
    print(f"# pair-count slope {count_slope:.3f}, "
          f"pair-time slope {time_slope:.3f}")
    for row in rows:
        expected = row.size * (row.size - 1) // 2
        if row.pair_evaluations != expected:
            print(f"pair count off at size {row.size}: "
                  f"{row.pair_evaluations} != {expected}", file=sys.stderr)
            return EXIT_INVARIANT
    if args.report:
        from . import plots

        directory = Path(args.report)
        directory.mkdir(parents=True, exist_ok=True)
        (directory / "bench.tsv").write_text(tsv)
        plots.save_scaling_curve(rows, directory / "scaling.png")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mrv",
        description="Deterministic post-consensus ordering layer: simulate "
                    "committed streams, order them, verify against the "
                    "brute-force reference, and benchmark scaling.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a seeded committed stream")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--f", type=int, required=True)
    p.add_argument("--rounds", type=int, required=True)
    p.add_argument("--wave", type=int, default=2)
    p.add_argument("--w-max", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--thin", action="store_true",
                   help="honest creators reference exactly a quorum")
    p.add_argument("--strategy", action="append", metavar="SPEC",
                   help="IDX:withhold:P | IDX:selective:FAV:SHUN | "
                        "IDX:conflict:A:B (FAV/SHUN are '+'-separated, '-' "
                        "for empty); repeatable")
    p.add_argument("--log", required=True)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("order", help="replay a log through the engine")
    p.add_argument("--log", required=True)
    p.add_argument("--out", help="output log of sealed orders")
    p.add_argument("--resume", action="store_true",
                   help="verify an existing output prefix, append the rest")
    p.add_argument("--no-verify", action="store_true",
                   help="skip the reference cross-check")
    p.add_argument("--report", metavar="DIR",
                   help="write run.json, slices.tsv and figures here")
    p.set_defaults(func=_cmd_order)

    p = sub.add_parser("verify",
                       help="diff the engine against the reference evaluation")
    p.add_argument("--log", required=True)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("scenario", help="write a targeted scenario log")
    p.add_argument("name", nargs="?", help="catalog name, or 'list'")
    p.add_argument("--log")
    p.add_argument("--list", action="store_true")
    p.set_defaults(func=_cmd_scenario)

    p = sub.add_parser("bench", help="slice-size scaling micro-benchmark")
    p.add_argument("--sizes", default="32,64,128,256")
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--w-max", type=int, default=10)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--report", metavar="DIR")
    p.set_defaults(func=_cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except MrvError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
