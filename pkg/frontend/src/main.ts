/**
 * DOM wiring for the console. All session state lives in SessionView
 * values built from server frames; this module only renders them into
 * the static shell from index.html and forwards user intent to the API
 * client.
 */

import { ApiError, ConsoleApi } from "./api.js";
import type { Decision, SessionView } from "./model.js";
import {
  applyFrame,
  canRefine,
  canSubmit,
  datasetOf,
  decisions,
  newSessionView,
  setDecision,
} from "./model.js";
import { exportFileName, selectApprovedLines } from "./export.js";
import type { IterationPayload, StageMarkerPayload } from "./types.js";
import { STAGES } from "./types.js";

interface ConsoleState {
  /** Lineage chain, oldest first; the last entry is the active session. */
  views: SessionView[];
  error: string | null;
  retry: (() => void) | null;
}

const state: ConsoleState = { views: [], error: null, retry: null };

const api = new ConsoleApi("");

function byId<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`index.html is missing #${id}`);
  return node as T;
}

function activeView(): SessionView | null {
  return state.views.length > 0 ? state.views[state.views.length - 1]! : null;
}

function updateView(next: SessionView): void {
  const at = state.views.findIndex((v) => v.sessionId === next.sessionId);
  if (at === -1) state.views.push(next);
  else state.views[at] = next;
  render();
}

function showError(message: string, retry: (() => void) | null): void {
  state.error = message;
  state.retry = retry;
  render();
}

function describe(err: unknown): string {
  if (err instanceof ApiError) return err.message;
  if (err instanceof Error) return `${err.name}: ${err.message}`;
  return String(err);
}

async function runSession(sessionId: string, parentId: string | null): Promise<void> {
  let view = newSessionView(sessionId, parentId);
  updateView(view);
  await api.streamEvents(sessionId, view.lastSeq, (frame) => {
    view = applyFrame(view, frame);
    updateView(view);
  });
}

function startSession(query: string): void {
  state.error = null;
  api
    .startSession(query)
    .then(({ sessionId }) => runSession(sessionId, null))
    .catch((err) => showError(describe(err), () => startSession(query)));
}

function startFollowup(parentId: string, query: string): void {
  state.error = null;
  api
    .followup(parentId, query)
    .then(({ sessionId }) => runSession(sessionId, parentId))
    .catch((err) => showError(describe(err), () => startFollowup(parentId, query)));
}

function decide(sessionId: string, index: number, decision: Decision): void {
  const view = state.views.find((v) => v.sessionId === sessionId);
  if (view !== undefined) updateView(setDecision(view, index, decision));
}

function exportApproved(view: SessionView): void {
  state.error = null;
  api
    .recordsText(view.sessionId)
    .then((body) => {
      const text = selectApprovedLines(body, decisions(view));
      const url = URL.createObjectURL(new Blob([text], { type: "application/x-ndjson" }));
      const anchor = document.createElement("a");
      anchor.href = url;
      anchor.download = exportFileName(view.sessionId);
      anchor.click();
      URL.revokeObjectURL(url);
    })
    .catch((err) => showError(describe(err), () => exportApproved(view)));
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function button(label: string, onClick: () => void): HTMLButtonElement {
  const node = el("button", "action", label);
  node.type = "button";
  node.addEventListener("click", onClick);
  return node;
}

function renderBanner(): void {
  const banner = byId<HTMLDivElement>("banner");
  banner.replaceChildren();
  banner.hidden = state.error === null;
  if (state.error === null) return;
  banner.appendChild(el("span", "banner-text", state.error));
  const retry = state.retry;
  if (retry !== null) banner.appendChild(button("Retry", retry));
}

function renderLineage(): void {
  const nav = byId<HTMLElement>("lineage");
  nav.replaceChildren();
  state.views.forEach((view, i) => {
    if (i > 0) nav.appendChild(el("span", "lineage-arrow", "->"));
    nav.appendChild(el("span", "lineage-node", view.sessionId));
  });
}

function renderStages(view: SessionView): void {
  const row = byId<HTMLDivElement>("stages");
  row.replaceChildren();
  for (const stage of STAGES) {
    const chip = el("span", view.stagesSeen.includes(stage) ? "stage seen" : "stage", stage);
    if (stage === view.stage) chip.classList.add("current");
    row.appendChild(chip);
  }
}

function logLineFor(kind: string, payload: unknown): string {
  if (kind === "stage_marker") return `stage: ${(payload as StageMarkerPayload).stage}`;
  if (kind === "iteration") {
    const it = payload as IterationPayload;
    return `step ${it.index}: ${it.action_name ?? it.action_kind} | ${it.thought}`;
  }
  return `${kind}: ${JSON.stringify(payload)}`;
}

function renderLog(view: SessionView): void {
  const list = byId<HTMLOListElement>("log");
  list.replaceChildren();
  for (const entry of view.log) {
    list.appendChild(el("li", `log-${entry.kind}`, logLineFor(entry.kind, entry.payload)));
  }
  for (const note of view.notes) {
    list.appendChild(el("li", "log-note", note));
  }
}

function renderRecords(view: SessionView): void {
  const list = byId<HTMLUListElement>("records");
  list.replaceChildren();
  for (const rec of view.records) {
    const item = el("li", `record ${rec.decision}`);
    item.appendChild(el("span", "badge", rec.validity));
    item.appendChild(
      el(
        "span",
        "record-text",
        `${rec.record.short_description} (${rec.record.application}, ` +
          `$${rec.record.estimated_savings}, refs ${rec.record.source_refs.join("/")})`,
      ),
    );
    item.appendChild(el("span", "decision", rec.decision));
    item.appendChild(button("Approve", () => decide(view.sessionId, rec.index, "approved")));
    item.appendChild(button("Reject", () => decide(view.sessionId, rec.index, "rejected")));
    list.appendChild(item);
  }
}

function renderContext(view: SessionView): void {
  const box = byId<HTMLDivElement>("context");
  box.replaceChildren();
  if (view.parentId === null) return;
  const parent = state.views.find((v) => v.sessionId === view.parentId);
  const dataset = parent !== undefined ? datasetOf(parent) : null;
  if (dataset === null) return;
  const details = el("details", "context-data");
  details.appendChild(el("summary", "", `context: consolidated data from ${view.parentId}`));
  details.appendChild(el("pre", "", JSON.stringify(dataset, null, 2)));
  box.appendChild(details);
}

function renderStatus(view: SessionView): void {
  const status = byId<HTMLDivElement>("status");
  if (!view.done) {
    status.textContent = "running...";
  } else if (view.completed) {
    status.textContent = `finished: ${view.haltReason}`;
  } else {
    status.textContent = `failed: ${view.haltReason}${view.error !== null ? ` (${view.error})` : ""}`;
  }
}

function syncControls(): void {
  const view = activeView();
  byId<HTMLButtonElement>("start").disabled = !canSubmit(byId<HTMLInputElement>("query").value);
  const followupQuery = byId<HTMLInputElement>("followup-query").value;
  byId<HTMLButtonElement>("followup").disabled =
    view === null || !canRefine(view) || !canSubmit(followupQuery);
  byId<HTMLButtonElement>("export").disabled = view === null || !view.done;
}

function render(): void {
  renderBanner();
  renderLineage();
  const view = activeView();
  const panel = byId<HTMLElement>("session");
  panel.hidden = view === null;
  if (view !== null) {
    byId<HTMLHeadingElement>("session-id").textContent = view.sessionId;
    renderContext(view);
    renderStages(view);
    renderLog(view);
    renderRecords(view);
    renderStatus(view);
  }
  syncControls();
}

function bootstrap(): void {
  byId<HTMLInputElement>("query").addEventListener("input", syncControls);
  byId<HTMLInputElement>("followup-query").addEventListener("input", syncControls);
  byId<HTMLButtonElement>("start").addEventListener("click", () => {
    startSession(byId<HTMLInputElement>("query").value);
  });
  byId<HTMLButtonElement>("followup").addEventListener("click", () => {
    const view = activeView();
    if (view !== null) startFollowup(view.sessionId, byId<HTMLInputElement>("followup-query").value);
  });
  byId<HTMLButtonElement>("export").addEventListener("click", () => {
    const view = activeView();
    if (view !== null) exportApproved(view);
  });
  render();
}

if (typeof document !== "undefined" && document.getElementById("app") !== null) {
  bootstrap();
}
