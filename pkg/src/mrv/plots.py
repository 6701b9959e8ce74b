"""Report figures rendered to files next to the tabular output."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .bench import BenchRow, fit_loglog_slope  # noqa: E402
from .metrics import RunMetrics  # noqa: E402

_VERDICT_LABELS = [("edges", "edge"),
                   ("abstain_no_signal", "no signal"),
                   ("abstain_conflict", "conflict"),
                   ("abstain_truncated", "truncated")]


def save_verdict_breakdown(metrics: RunMetrics, path) -> None:
    values = [metrics.canonical[key] for key, _ in _VERDICT_LABELS]
    labels = [label for _, label in _VERDICT_LABELS]
    fig, ax = plt.subplots(figsize=(5, 3.2))
    ax.bar(labels, values, color=["#2a7", "#888", "#d60", "#36c"])
    ax.set_ylabel("pairs")
    ax.set_title("pairwise verdict breakdown")
    for i, v in enumerate(values):
        ax.text(i, v, str(v), ha="center", va="bottom", fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_sealing_delays(slice_rows: list[tuple[int, int]], path) -> None:
    """slice_rows: (slice_index, sealing delay in rounds)."""
    fig, ax = plt.subplots(figsize=(5, 3.2))
    if slice_rows:
        ax.bar([str(i) for i, _ in slice_rows], [d for _, d in slice_rows],
               color="#36c")
    ax.set_xlabel("slice")
    ax.set_ylabel("sealing delay (rounds)")
    ax.set_title("per-slice sealing delay")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_scaling_curve(rows: list[BenchRow], path) -> None:
    sizes = [r.size for r in rows]
    times = [max(r.pair_seconds, 1e-9) for r in rows]
    slope = fit_loglog_slope(list(zip(sizes, times)))
    fig, ax = plt.subplots(figsize=(5, 3.6))
    ax.loglog(sizes, times, "o-", color="#36c",
              label=f"pair phase (slope {slope:.2f})")
    ax.loglog(sizes, [r.total_seconds for r in rows], "s--", color="#888",
              label="whole run")
    ax.set_xlabel("slice size")
    ax.set_ylabel("seconds")
    ax.set_title("slice-size scaling")
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
