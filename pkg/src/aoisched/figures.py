"""Matplotlib renderers for sweep summaries and single-run traces."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .aoi import RunReport

__all__ = ["sweep_figure", "trace_figure", "trip_figure"]

_VARY_LABEL = {
    "t": "horizon (min)",
    "s": "sensor nodes",
    "k": "labels per cell",
}


def sweep_figure(rows: list[dict], vary: str, path) -> None:
    """Mean cost (with spread) and mean solve time per sweep point, one
    line per algorithm."""
    algos = sorted({r["algo"] for r in rows})
    fig, (ax_cost, ax_time) = plt.subplots(2, 1, sharex=True, figsize=(7, 6.5))
    for algo in algos:
        pts = sorted((r for r in rows if r["algo"] == algo), key=lambda r: r["point"])
        xs = [r["point"] for r in pts]
        ax_cost.errorbar(xs, [r["mean_cost"] for r in pts],
                         yerr=[r["std_cost"] for r in pts],
                         marker="o", capsize=3, label=algo)
        ax_time.plot(xs, [r["mean_runtime_ms"] for r in pts], marker="s", label=algo)
    ax_cost.set_ylabel("mean normalized AoI cost")
    ax_cost.legend()
    ax_cost.grid(True, alpha=0.4)
    ax_time.set_ylabel("mean solve time (ms)")
    ax_time.set_xlabel(_VARY_LABEL.get(vary, vary))
    ax_time.set_yscale("log")
    ax_time.grid(True, alpha=0.4)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def trace_figure(report: RunReport, path, title: str | None = None) -> None:
    """Per-slot cost and battery traces, with delivery slots marked."""
    slots = range(1, len(report.cost_trace) + 1)
    fig, (ax_cost, ax_bat) = plt.subplots(2, 1, sharex=True, figsize=(8, 6))
    ax_cost.plot(list(slots), list(report.cost_trace), drawstyle="steps-post")
    for slot in sorted({d.slot for d in report.deliveries}):
        ax_cost.axvline(slot, color="tab:green", alpha=0.5, linestyle="--")
    ax_cost.set_ylabel("cost per slot")
    ax_cost.grid(True, alpha=0.4)
    if title:
        ax_cost.set_title(title)
    ax_bat.plot(range(len(report.battery_trace)), list(report.battery_trace),
                drawstyle="steps-post", color="tab:orange")
    ax_bat.set_ylabel("battery")
    ax_bat.set_xlabel("slot")
    ax_bat.grid(True, alpha=0.4)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def trip_figure(visits, trip_costs, path) -> None:
    """Per-trip average cost for a symmetric-case plan."""
    fig, ax = plt.subplots(figsize=(7, 4))
    xs = range(1, len(visits) + 1)
    ax.bar(list(xs), list(trip_costs), color="tab:blue", alpha=0.8)
    for x, visit in zip(xs, visits):
        ax.annotate(f"SN {visit}", (x, 0), textcoords="offset points",
                    xytext=(0, 4), ha="center", fontsize=8, color="white")
    ax.set_xlabel("trip")
    ax.set_ylabel("average cost over window")
    ax.grid(True, axis="y", alpha=0.4)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
