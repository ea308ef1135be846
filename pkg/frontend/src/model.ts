/**
 * SessionView: the console's pure projection of one session.
 *
 * The view is computed exclusively from server event frames, so applying
 * the same frames again (a reload that replays the persisted stream)
 * reconstructs an identical view. The event log is append-only and
 * ordered by the server sequence number; stage markers must arrive in
 * pipeline order. Record approve/reject decisions and their log
 * annotations are the one piece of client-side state, and they never
 * touch the server transcript.
 */

import type { SseFrame } from "./sse.js";
import type {
  DonePayload,
  ErrorPayload,
  RecommendationRecord,
  Stage,
  StageMarkerPayload,
} from "./types.js";
import { STAGES } from "./types.js";

export type Decision = "pending" | "approved" | "rejected";

export interface LogEntry {
  seq: number;
  kind: string;
  payload: unknown;
}

export interface RecordView {
  /** 0-based emission position; matches the records export line order. */
  index: number;
  seq: number;
  record: RecommendationRecord;
  /** The service only streams records that passed validation. */
  validity: "valid";
  decision: Decision;
}

export interface SessionView {
  sessionId: string;
  parentId: string | null;
  /** Latest announced stage; null before the first marker. */
  stage: Stage | null;
  stagesSeen: readonly Stage[];
  /** Server frames only, in sequence order. */
  log: readonly LogEntry[];
  records: readonly RecordView[];
  /** Client-side review notes shown alongside the log; never sent upstream. */
  notes: readonly string[];
  done: boolean;
  completed: boolean;
  haltReason: string | null;
  error: string | null;
  /** Highest sequence number applied; resume streams from here. */
  lastSeq: number;
}

/** A frame skipped ahead of the next expected sequence number. */
export class StreamGapError extends Error {}

/** A stage marker arrived out of pipeline order. */
export class StageOrderError extends Error {}

export function newSessionView(sessionId: string, parentId: string | null = null): SessionView {
  return {
    sessionId,
    parentId,
    stage: null,
    stagesSeen: [],
    log: [],
    records: [],
    notes: [],
    done: false,
    completed: false,
    haltReason: null,
    error: null,
    lastSeq: 0,
  };
}

/**
 * Apply one server frame, returning a new view.
 *
 * Frames at or below lastSeq are replay overlap (reconnects re-deliver
 * from `after`) and leave the view untouched; a frame beyond lastSeq + 1
 * means events were lost and raises StreamGapError rather than rendering
 * a silently incomplete trace.
 */
export function applyFrame(view: SessionView, frame: SseFrame): SessionView {
  if (frame.id <= view.lastSeq) return view;
  if (frame.id !== view.lastSeq + 1) {
    throw new StreamGapError(`expected seq ${view.lastSeq + 1}, got ${frame.id}`);
  }
  const next: SessionView = {
    ...view,
    log: [...view.log, { seq: frame.id, kind: frame.event, payload: frame.data }],
    lastSeq: frame.id,
  };
  switch (frame.event) {
    case "stage_marker": {
      const stage = (frame.data as StageMarkerPayload).stage;
      const expected = STAGES[view.stagesSeen.length];
      if (stage !== expected) {
        throw new StageOrderError(`expected stage ${expected ?? "(no further stage)"}, got ${stage}`);
      }
      next.stage = expected;
      next.stagesSeen = [...view.stagesSeen, expected];
      break;
    }
    case "record": {
      const record = frame.data as RecommendationRecord;
      next.records = [
        ...view.records,
        { index: view.records.length, seq: frame.id, record, validity: "valid", decision: "pending" },
      ];
      break;
    }
    case "error": {
      next.error = (frame.data as ErrorPayload).message;
      break;
    }
    case "done": {
      const payload = frame.data as DonePayload;
      next.done = true;
      next.completed = payload.completed;
      next.haltReason = payload.halt_reason;
      if (payload.error !== null) next.error = payload.error;
      break;
    }
    default:
      break; // iteration and future kinds live in the log as-is
  }
  return next;
}

/** Rebuild a view from persisted frames, e.g. after a page reload. */
export function replayFrames(
  sessionId: string,
  frames: readonly SseFrame[],
  parentId: string | null = null,
): SessionView {
  return frames.reduce(applyFrame, newSessionView(sessionId, parentId));
}

/**
 * Record an approve/reject decision for the record at `index`.
 *
 * Rejections are annotated in the view's notes; flipping a record back
 * to approved leaves the earlier note in place, preserving the review
 * history.
 */
export function setDecision(view: SessionView, index: number, decision: Decision): SessionView {
  const target = view.records[index];
  if (target === undefined) {
    throw new RangeError(`no record at index ${index}`);
  }
  if (target.decision === decision) return view;
  const records = view.records.map((r) => (r.index === index ? { ...r, decision } : r));
  const notes =
    decision === "rejected"
      ? [...view.notes, `record ${index + 1} rejected: ${target.record.short_description}`]
      : view.notes;
  return { ...view, records, notes };
}

/** Per-record decisions in emission order, for the export selector. */
export function decisions(view: SessionView): Decision[] {
  return view.records.map((r) => r.decision);
}

/** The consolidated dataset announced with the recommendation stage, if reached. */
export function datasetOf(view: SessionView): unknown {
  for (const entry of view.log) {
    if (entry.kind !== "stage_marker") continue;
    const payload = entry.payload as StageMarkerPayload;
    if (payload.stage === "recommendation") return payload["dataset"] ?? null;
  }
  return null;
}

/** Submitting an empty or whitespace-only query is disabled. */
export function canSubmit(queryText: string): boolean {
  return queryText.trim().length > 0;
}

/** Follow-ups are offered only once the session finished successfully. */
export function canRefine(view: SessionView): boolean {
  return view.done && view.completed;
}
