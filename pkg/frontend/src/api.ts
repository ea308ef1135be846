/**
 * Typed client for the session service. Transport only: no business
 * logic, no retries, no response reshaping beyond JSON decoding.
 */

import type { SseFrame } from "./sse.js";
import { readSseBody } from "./sse.js";
import type { SessionSummary } from "./types.js";

/** Non-2xx response, carrying the status and the server's detail text. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
    this.name = "ApiError";
  }
}

export interface StartedSession {
  sessionId: string;
  parentId: string | null;
}

export class ConsoleApi {
  constructor(
    readonly baseUrl: string,
    private readonly fetchFn: typeof fetch = fetch,
  ) {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const resp = await this.fetchFn(`${this.baseUrl}${path}`, init);
    if (!resp.ok) {
      let detail = resp.statusText;
      try {
        const body = (await resp.json()) as { detail?: unknown };
        if (body.detail !== undefined) {
          detail = typeof body.detail === "string" ? body.detail : JSON.stringify(body.detail);
        }
      } catch {
        // Non-JSON error body; the status text is all we have.
      }
      throw new ApiError(resp.status, detail);
    }
    return resp;
  }

  private async postJson(path: string, payload: unknown): Promise<Response> {
    return this.request(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  /** True when the service is up and its fixtures are loaded. */
  async health(): Promise<boolean> {
    try {
      const resp = await this.fetchFn(`${this.baseUrl}/healthz`);
      return resp.ok;
    } catch {
      return false;
    }
  }

  async startSession(query: string, script?: string, maxIterations?: number): Promise<StartedSession> {
    const payload: Record<string, unknown> = { query };
    if (script !== undefined) payload["script"] = script;
    if (maxIterations !== undefined) payload["max_iterations"] = maxIterations;
    const resp = await this.postJson("/sessions", payload);
    const body = (await resp.json()) as { session_id: string; parent_id: string | null };
    return { sessionId: body.session_id, parentId: body.parent_id ?? null };
  }

  async followup(parentId: string, query: string, script?: string): Promise<StartedSession> {
    const payload: Record<string, unknown> = { query };
    if (script !== undefined) payload["script"] = script;
    const resp = await this.postJson(`/sessions/${parentId}/followup`, payload);
    const body = (await resp.json()) as { session_id: string; parent_id: string | null };
    return { sessionId: body.session_id, parentId: body.parent_id ?? null };
  }

  async summary(sessionId: string): Promise<SessionSummary> {
    const resp = await this.request(`/sessions/${sessionId}`);
    return (await resp.json()) as SessionSummary;
  }

  /** The canonical JSON-lines records body; 409 until the session is done. */
  async recordsText(sessionId: string): Promise<string> {
    const resp = await this.request(`/sessions/${sessionId}/records`);
    return await resp.text();
  }

  /**
   * Stream session events after sequence number `after` until the server
   * closes the stream, which it does once the final event is delivered.
   */
  async streamEvents(sessionId: string, after: number, onFrame: (frame: SseFrame) => void): Promise<void> {
    const resp = await this.request(`/sessions/${sessionId}/events?after=${after}`, {
      headers: { accept: "text/event-stream", "last-event-id": String(after) },
    });
    if (resp.body === null) {
      throw new ApiError(resp.status, "event stream response has no body");
    }
    await readSseBody(resp.body, onFrame);
  }
}
