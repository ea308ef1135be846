"""Benchmark harness: ground truth, metrics, runner, report rendering."""

from finops_agent.evalharness.benchmark import (
    MAX_CONSECUTIVE_FAILURES,
    USE_CASE_QUERY,
    BackendSpec,
    BenchmarkConfig,
    BenchmarkConfigError,
    BenchmarkOutcome,
    run_benchmark,
)
from finops_agent.evalharness.groundtruth import (
    GroundTruth,
    GroundTruthError,
    load_groundtruth,
    validate_groundtruth,
)
from finops_agent.evalharness.metrics import (
    PlanScore,
    RawMetrics,
    aggregate,
    consolidation_matches,
    observed_record_ids,
    plan_executed_cleanly,
    recommendations_valid,
    score_plan,
    successful_tools,
    task_completion_rate,
    tool_recognition_latency,
)
from finops_agent.evalharness.report import (
    COLUMNS,
    MetricsRow,
    MetricsTable,
    ReportFormatError,
    parse_csv,
    render_csv,
    render_markdown,
    render_report,
    row_from_raw,
)

__all__ = [
    "BackendSpec",
    "BenchmarkConfig",
    "BenchmarkConfigError",
    "BenchmarkOutcome",
    "COLUMNS",
    "GroundTruth",
    "GroundTruthError",
    "MAX_CONSECUTIVE_FAILURES",
    "MetricsRow",
    "MetricsTable",
    "PlanScore",
    "RawMetrics",
    "ReportFormatError",
    "USE_CASE_QUERY",
    "aggregate",
    "consolidation_matches",
    "load_groundtruth",
    "observed_record_ids",
    "parse_csv",
    "plan_executed_cleanly",
    "recommendations_valid",
    "render_csv",
    "render_markdown",
    "render_report",
    "row_from_raw",
    "run_benchmark",
    "score_plan",
    "successful_tools",
    "task_completion_rate",
    "tool_recognition_latency",
    "validate_groundtruth",
]
