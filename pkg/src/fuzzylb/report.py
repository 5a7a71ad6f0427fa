"""Improvement arithmetic and report rendering.

Percentages are kept at full precision internally and rounded only when a
table is rendered (one decimal place), so repeated aggregation never
compounds rounding error.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from statistics import fmean
from typing import Mapping, Sequence

FUZZY = "fuzzy"
BASELINES = ("round_robin", "randomize")

_IMPROVEMENT_COLUMN = {"round_robin": "improvement_vs_rr", "randomize": "improvement_vs_rand"}


def improvement_pct(baseline: float, fuzzy: float) -> float:
    """Percentage improvement of a value over a positive baseline."""
    if baseline <= 0:
        raise ValueError(f"baseline must be positive, got {baseline}")
    return 100.0 * (baseline - fuzzy) / baseline


def mean_improvement(pcts: Sequence[float]) -> float:
    if not pcts:
        raise ValueError("no percentages to average")
    return fmean(pcts)


@dataclass
class ComparisonTable:
    """Per-policy mean response times plus fuzzy-vs-baseline improvements."""

    task_counts: tuple[int, ...]
    mean_response: dict[str, tuple[float, ...]]
    improvements: dict[str, tuple[float, ...]]
    mean_improvements: dict[str, float]


def build_comparison(
    task_counts: Sequence[int], mean_response: Mapping[str, Sequence[float]]
) -> ComparisonTable:
    counts = tuple(int(c) for c in task_counts)
    responses: dict[str, tuple[float, ...]] = {}
    for policy, row in mean_response.items():
        if len(row) != len(counts):
            raise ValueError(
                f"policy {policy!r} has {len(row)} values for {len(counts)} task counts"
            )
        responses[policy] = tuple(float(v) for v in row)
    improvements: dict[str, tuple[float, ...]] = {}
    means: dict[str, float] = {}
    if FUZZY in responses:
        for baseline in BASELINES:
            if baseline in responses:
                pcts = tuple(
                    improvement_pct(b, f)
                    for b, f in zip(responses[baseline], responses[FUZZY])
                )
                improvements[baseline] = pcts
                means[baseline] = mean_improvement(pcts)
    return ComparisonTable(
        task_counts=counts,
        mean_response=responses,
        improvements=improvements,
        mean_improvements=means,
    )


def emit_report(table: ComparisonTable, format: str = "csv") -> str:
    """Render a comparison table as CSV or a fixed-layout text table.

    CSV columns are task_count, policy, mean_response, improvement_vs_rr,
    improvement_vs_rand; rows are ordered by task count then policy name.
    The improvement cells hold each row's own gain over the corresponding
    baseline at that task count (empty when the baseline was not run).
    """
    if format == "csv":
        return _emit_csv(table)
    if format in ("table", "text-table"):
        return _emit_text(table)
    raise ValueError(f"unknown report format {format!r}")


def _row_improvement(table: ComparisonTable, baseline: str, policy: str, idx: int) -> str:
    if baseline not in table.mean_response:
        return ""
    base = table.mean_response[baseline][idx]
    return f"{improvement_pct(base, table.mean_response[policy][idx]):.1f}"


def _emit_csv(table: ComparisonTable) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(
        ["task_count", "policy", "mean_response", "improvement_vs_rr", "improvement_vs_rand"]
    )
    for idx, count in enumerate(table.task_counts):
        for policy in sorted(table.mean_response):
            writer.writerow(
                [
                    count,
                    policy,
                    f"{table.mean_response[policy][idx]:.6f}",
                    _row_improvement(table, "round_robin", policy, idx),
                    _row_improvement(table, "randomize", policy, idx),
                ]
            )
    return out.getvalue()


def _emit_text(table: ComparisonTable) -> str:
    policies = sorted(table.mean_response)
    lines = ["mean response time by task count"]
    header = f"{'task_count':>12}" + "".join(f"{p:>14}" for p in policies)
    lines.append(header)
    for idx, count in enumerate(table.task_counts):
        row = f"{count:>12}" + "".join(
            f"{table.mean_response[p][idx]:>14.6f}" for p in policies
        )
        lines.append(row)
    if table.improvements:
        baselines = [b for b in BASELINES if b in table.improvements]
        lines.append("")
        lines.append("fuzzy improvement (percent)")
        lines.append(
            f"{'task_count':>12}" + "".join(f"{'vs_' + b:>16}" for b in baselines)
        )
        for idx, count in enumerate(table.task_counts):
            lines.append(
                f"{count:>12}"
                + "".join(f"{table.improvements[b][idx]:>16.1f}" for b in baselines)
            )
        lines.append(
            f"{'mean':>12}"
            + "".join(f"{table.mean_improvements[b]:>16.1f}" for b in baselines)
        )
    return "\n".join(lines) + "\n"
