"""Benchmark result table, rendered as markdown and CSV.

Rows hold display-precision values: integer seconds, integer iteration
and latency means, integer percentages. Rounding is half away from
zero so repeated render/parse cycles are stable.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

from finops_agent.errors import FinopsError
from finops_agent.evalharness.metrics import RawMetrics

COLUMNS = (
    "Model",
    "Execution Time (seconds)",
    "Computational Efficiency (Iterations)",
    "Planning Accuracy",
    "Plan Execution Accuracy",
    "Task Completion Rate",
    "Tool Recognition Latency",
    "Data Consolidation Accuracy",
    "Recommendation Accuracy",
)

FULL_RUN_COUNT = 10


class ReportFormatError(FinopsError):
    """A CSV report does not parse back into a metrics table."""


def _round_half_up(value: float) -> int:
    if value < 0:
        return -_round_half_up(-value)
    return int(value + 0.5)


@dataclass(frozen=True)
class MetricsRow:
    model: str
    n_runs: int
    execution_time_s: int
    iterations: int
    planning_accuracy: int
    plan_execution_accuracy: int
    task_completion_rate: int
    tool_recognition_latency: int | None  # None renders as "never"
    consolidation_accuracy: int
    recommendation_accuracy: int
    incomplete: bool = False

    def cells(self) -> tuple[str, ...]:
        latency = "never" if self.tool_recognition_latency is None else str(self.tool_recognition_latency)
        return (
            self.model,
            str(self.execution_time_s),
            str(self.iterations),
            f"{self.planning_accuracy}%",
            f"{self.plan_execution_accuracy}%",
            f"{self.task_completion_rate}%",
            latency,
            f"{self.consolidation_accuracy}%",
            f"{self.recommendation_accuracy}%",
        )


@dataclass(frozen=True)
class MetricsTable:
    rows: tuple[MetricsRow, ...]


def row_from_raw(model: str, raw: RawMetrics, incomplete: bool = False) -> MetricsRow:
    latency = raw.tool_recognition_latency
    return MetricsRow(
        model=model,
        n_runs=raw.n_runs,
        execution_time_s=_round_half_up(raw.execution_time_s),
        iterations=_round_half_up(raw.iterations),
        planning_accuracy=_round_half_up(raw.planning_accuracy),
        plan_execution_accuracy=_round_half_up(raw.plan_execution_accuracy),
        task_completion_rate=_round_half_up(raw.task_completion_rate),
        tool_recognition_latency=None if latency is None else _round_half_up(latency),
        consolidation_accuracy=_round_half_up(raw.consolidation_accuracy),
        recommendation_accuracy=_round_half_up(raw.recommendation_accuracy),
        incomplete=incomplete,
    )


def render_markdown(table: MetricsTable) -> str:
    lines = [
        "| " + " | ".join(COLUMNS) + " |",
        "|" + "|".join("---" for _ in COLUMNS) + "|",
    ]
    footnotes = []
    for row in table.rows:
        lines.append("| " + " | ".join(row.cells()) + " |")
        if row.incomplete:
            footnotes.append(f"- {row.model}: incomplete (aborted after repeated backend failures)")
        elif row.n_runs < FULL_RUN_COUNT:
            footnotes.append(f"- {row.model}: low-N (n={row.n_runs})")
    out = "\n".join(lines) + "\n"
    if footnotes:
        out += "\n" + "\n".join(footnotes) + "\n"
    return out


_CSV_FIELDS = (
    "model",
    "n_runs",
    "execution_time_s",
    "iterations",
    "planning_accuracy",
    "plan_execution_accuracy",
    "task_completion_rate",
    "tool_recognition_latency",
    "consolidation_accuracy",
    "recommendation_accuracy",
    "incomplete",
)


def render_csv(table: MetricsTable) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=_CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for row in table.rows:
        writer.writerow(
            {
                "model": row.model,
                "n_runs": row.n_runs,
                "execution_time_s": row.execution_time_s,
                "iterations": row.iterations,
                "planning_accuracy": row.planning_accuracy,
                "plan_execution_accuracy": row.plan_execution_accuracy,
                "task_completion_rate": row.task_completion_rate,
                "tool_recognition_latency": "never"
                if row.tool_recognition_latency is None
                else row.tool_recognition_latency,
                "consolidation_accuracy": row.consolidation_accuracy,
                "recommendation_accuracy": row.recommendation_accuracy,
                "incomplete": "true" if row.incomplete else "false",
            }
        )
    return buf.getvalue()


def parse_csv(text: str) -> MetricsTable:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or tuple(reader.fieldnames) != _CSV_FIELDS:
        raise ReportFormatError(f"unexpected CSV header: {reader.fieldnames}")
    rows = []
    try:
        for rec in reader:
            latency = rec["tool_recognition_latency"]
            rows.append(
                MetricsRow(
                    model=rec["model"],
                    n_runs=int(rec["n_runs"]),
                    execution_time_s=int(rec["execution_time_s"]),
                    iterations=int(rec["iterations"]),
                    planning_accuracy=int(rec["planning_accuracy"]),
                    plan_execution_accuracy=int(rec["plan_execution_accuracy"]),
                    task_completion_rate=int(rec["task_completion_rate"]),
                    tool_recognition_latency=None if latency == "never" else int(latency),
                    consolidation_accuracy=int(rec["consolidation_accuracy"]),
                    recommendation_accuracy=int(rec["recommendation_accuracy"]),
                    incomplete=rec["incomplete"] == "true",
                )
            )
    except (KeyError, ValueError) as exc:
        raise ReportFormatError(f"bad CSV row: {exc!r}") from None
    return MetricsTable(rows=tuple(rows))


def render_report(table: MetricsTable) -> tuple[str, str]:
    """(markdown, csv) for one table."""
    return render_markdown(table), render_csv(table)
