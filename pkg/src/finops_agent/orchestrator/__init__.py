"""Three-agent pipeline: planning, data retrieval, analysis."""

from finops_agent.orchestrator.consolidate import (
    AppView,
    ConsolidatedDataset,
    consolidate,
    dataset_equal,
    key_sets,
    norm_id,
)
from finops_agent.orchestrator.planning import (
    ExecutionPlan,
    PlanStep,
    UnparseablePlanError,
    bound_tool,
    parse_plan,
    plan,
    plan_to_payload,
)
from finops_agent.orchestrator.recommend import (
    CATEGORIES,
    FIELD_ORDER,
    PRIORITIES,
    NoRecommendationsError,
    RecommendResult,
    RecommendationRecord,
    RecordValidationError,
    apply_overlap_rule,
    emit_records,
    parse_record,
    record_to_dict,
    recommend,
    render_line,
)
from finops_agent.orchestrator.session import (
    STAGES,
    ReactIteration,
    SessionAbortedError,
    SessionDeps,
    SessionLimits,
    SessionTranscript,
    parse_react_response,
    run_session,
)
from finops_agent.orchestrator.tools import (
    Observation,
    ObservationSection,
    RegistryError,
    ToolSpec,
    build_registry,
    error_observation,
    invoke_tool,
    observation_from_result,
    render_registry,
    synthesize_query,
)
from finops_agent.orchestrator.transcript import (
    persist_transcript,
    transcript_to_json,
    transcript_to_payload,
)

__all__ = [
    "AppView",
    "CATEGORIES",
    "ConsolidatedDataset",
    "ExecutionPlan",
    "FIELD_ORDER",
    "NoRecommendationsError",
    "Observation",
    "ObservationSection",
    "PRIORITIES",
    "PlanStep",
    "ReactIteration",
    "RecommendResult",
    "RecommendationRecord",
    "RecordValidationError",
    "RegistryError",
    "STAGES",
    "SessionAbortedError",
    "SessionDeps",
    "SessionLimits",
    "SessionTranscript",
    "ToolSpec",
    "UnparseablePlanError",
    "apply_overlap_rule",
    "bound_tool",
    "build_registry",
    "consolidate",
    "dataset_equal",
    "emit_records",
    "error_observation",
    "invoke_tool",
    "key_sets",
    "norm_id",
    "observation_from_result",
    "parse_plan",
    "parse_react_response",
    "parse_record",
    "persist_transcript",
    "plan",
    "plan_to_payload",
    "record_to_dict",
    "recommend",
    "render_line",
    "render_registry",
    "run_session",
    "synthesize_query",
    "transcript_to_json",
    "transcript_to_payload",
]
