"""Transcript scoring: the eight benchmark metrics.

Plan matching is multiset equality over tool-bound steps plus
consistency with every ground-truth precedence pair; interchange groups
carry no internal pairs, so their members may appear in any mutual
order. Where several canonical steps bind the same tool, every
assignment of plan positions to those steps is tried, so a plan matches
exactly when some assignment satisfies all pairs.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from itertools import permutations, product

from finops_agent.evalharness.groundtruth import GroundTruth
from finops_agent.orchestrator.consolidate import key_sets, norm_id
from finops_agent.orchestrator.planning import ExecutionPlan
from finops_agent.orchestrator.session import SessionTranscript

TOOL_COUNT = 6


@dataclass(frozen=True)
class PlanScore:
    matched: bool
    detail: str


def score_plan(plan: ExecutionPlan | None, gt: GroundTruth) -> PlanScore:
    if plan is None:
        return PlanScore(False, "no plan was produced")
    sequence = plan.tool_sequence()
    want = Counter(gt.step_tools.values())
    got = Counter(sequence)
    if want != got:
        missing = sorted((want - got).elements())
        extra = sorted((got - want).elements())
        parts = []
        if missing:
            parts.append(f"missing steps: {', '.join(missing)}")
        if extra:
            parts.append(f"extra steps: {', '.join(extra)}")
        return PlanScore(False, "; ".join(parts))

    # Positions of each tool in the plan, in order.
    positions: dict[str, list[int]] = {}
    for pos, tool in enumerate(sequence):
        positions.setdefault(tool, []).append(pos)
    # Steps grouped by tool, in ground-truth order.
    steps_by_tool: dict[str, list[str]] = {}
    for step, tool in gt.step_tools.items():
        steps_by_tool.setdefault(tool, []).append(step)

    tools = sorted(steps_by_tool)
    assignment_choices = [permutations(positions[tool]) for tool in tools]
    first_violation = ""
    for choice in product(*assignment_choices):
        pos_of: dict[str, int] = {}
        for tool, perm in zip(tools, choice):
            for step, position in zip(steps_by_tool[tool], perm):
                pos_of[step] = position
        violated = next(
            (pair for pair in gt.precedence if pos_of[pair[0]] >= pos_of[pair[1]]), None
        )
        if violated is None:
            return PlanScore(True, "matched")
        if not first_violation:
            first_violation = f"step {violated[0]} must come before {violated[1]}"
    return PlanScore(False, first_violation or "no assignment satisfies the precedence pairs")


def tool_recognition_latency(transcript: SessionTranscript) -> int | None:
    """Smallest iteration index by which all six tools were mentioned; None = never."""
    seen: set[str] = set()
    for it in transcript.iterations:
        seen |= it.tools_referenced
        if len(seen) == TOOL_COUNT:
            return it.index
    return None


def successful_tools(transcript: SessionTranscript) -> frozenset[str]:
    out: set[str] = set()
    for obs in transcript.observations():
        out.update(obs.tools_served)
    return frozenset(out)


def task_completion_rate(transcript: SessionTranscript) -> float:
    """Distinct tools with at least one error-free observation, out of six."""
    return len(successful_tools(transcript)) / TOOL_COUNT


def plan_executed_cleanly(transcript: SessionTranscript) -> bool:
    """Every tool-bound plan step saw a successful invocation and nothing errored."""
    if transcript.plan is None:
        return False
    bound = set(transcript.plan.tool_sequence())
    if not bound <= successful_tools(transcript):
        return False
    return all(obs.ok for obs in transcript.observations())


def consolidation_matches(transcript: SessionTranscript, gt: GroundTruth) -> bool:
    if transcript.consolidated is None:
        return False
    return key_sets(transcript.consolidated) == dict(gt.oracle_keys)


def observed_record_ids(transcript: SessionTranscript) -> frozenset[str]:
    ids: set[str] = set()
    for obs in transcript.observations():
        for section in obs.sections:
            for rec in section.records:
                if isinstance(rec, dict) and rec.get("id") is not None:
                    ids.add(norm_id(rec["id"]))
    return frozenset(ids)


def recommendations_valid(transcript: SessionTranscript) -> bool:
    """At least one record, and every record's source refs resolve to observed ids."""
    if not transcript.recommendations:
        return False
    seen = observed_record_ids(transcript)
    return all(
        norm_id(ref) in seen for rec in transcript.recommendations for ref in rec.source_refs
    )


def _pct(passing: int, total: int) -> float:
    return 100.0 * passing / total if total else 0.0


@dataclass(frozen=True)
class RawMetrics:
    """Unrounded per-backend aggregates over n attempted runs."""

    n_runs: int
    completed_runs: int
    execution_time_s: float
    iterations: float
    planning_accuracy: float
    plan_execution_accuracy: float
    task_completion_rate: float
    tool_recognition_latency: float | None
    consolidation_accuracy: float
    recommendation_accuracy: float


def aggregate(transcripts: list[SessionTranscript | None], gt: GroundTruth) -> RawMetrics:
    """Fold attempted runs into raw metrics; None entries are aborted runs.

    Accuracy percentages are over all attempted runs (an aborted run
    fails everything); time, iteration, and latency means are over
    completed runs only.
    """
    total = len(transcripts)
    done = [t for t in transcripts if t is not None]
    latencies = [lat for t in done if (lat := tool_recognition_latency(t)) is not None]
    return RawMetrics(
        n_runs=total,
        completed_runs=len(done),
        execution_time_s=sum(t.wall_time_seconds for t in done) / len(done) if done else 0.0,
        iterations=sum(len(t.iterations) for t in done) / len(done) if done else 0.0,
        planning_accuracy=_pct(sum(score_plan(t.plan, gt).matched for t in done), total),
        plan_execution_accuracy=_pct(sum(plan_executed_cleanly(t) for t in done), total),
        task_completion_rate=_pct(sum(task_completion_rate(t) for t in done), total),
        tool_recognition_latency=sum(latencies) / len(latencies) if latencies else None,
        consolidation_accuracy=_pct(sum(consolidation_matches(t, gt) for t in done), total),
        recommendation_accuracy=_pct(sum(recommendations_valid(t) for t in done), total),
    )
