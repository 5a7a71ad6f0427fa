"""Figure rendering for comparison reports."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .report import ComparisonTable

_DISPLAY = {"fuzzy": "Fuzzy", "round_robin": "Round Robin", "randomize": "Randomize"}
_MARKERS = {"fuzzy": "o", "round_robin": "s", "randomize": "^"}


def plot_response_times(table: ComparisonTable, path: str) -> None:
    """Render mean response time versus task count, one line per policy."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for policy in sorted(table.mean_response):
        ax.plot(
            table.task_counts,
            table.mean_response[policy],
            marker=_MARKERS.get(policy, "o"),
            label=_DISPLAY.get(policy, policy),
        )
    ax.set_xlabel("Number of tasks")
    ax.set_ylabel("Mean response time")
    ax.set_xticks(list(table.task_counts))
    ax.grid(alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
