/**
 * Wire shapes shared with the session service.
 *
 * These mirror the JSON the service emits; the console never invents
 * fields of its own, so every type here is a transcription of a server
 * payload.
 */

/** Pipeline stages in the order the service announces them. */
export const STAGES = [
  "instruction_review",
  "plan",
  "retrieval",
  "consolidation",
  "recommendation",
] as const;

export type Stage = (typeof STAGES)[number];

export type EventKind = "stage_marker" | "iteration" | "record" | "error" | "done";

/** stage_marker payload; detail keys vary by stage (tools, plan, dataset). */
export interface StageMarkerPayload {
  stage: string;
  [detail: string]: unknown;
}

export interface Observation {
  ok: boolean;
  route: string;
  text: string;
}

/** One reason/act/observe step of the agent loop. */
export interface IterationPayload {
  index: number;
  thought: string;
  action_kind: string;
  action_name: string | null;
  action_args: Record<string, unknown> | null;
  observation: Observation | null;
  tools_referenced: string[];
}

/** A recommendation record exactly as the service validated and emitted it. */
export interface RecommendationRecord {
  short_description: string;
  description: string;
  category: string;
  application: string;
  estimated_savings: number;
  priority: string;
  source_refs: string[];
}

export interface DonePayload {
  halt_reason: string;
  completed: boolean;
  record_count: number;
  error: string | null;
}

export interface ErrorPayload {
  message: string;
}

/** GET /sessions/{id} response. */
export interface SessionSummary {
  session_id: string;
  user_query: string;
  parent_id: string | null;
  children: string[];
  done: boolean;
  completed: boolean;
  halt_reason: string;
  stage_markers: string[];
  record_count: number;
  error: string | null;
}
