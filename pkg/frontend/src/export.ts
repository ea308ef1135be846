/**
 * Approved-records export.
 *
 * The records endpoint returns the canonical JSON-lines rendering of a
 * session's recommendation records: one line per record in emission
 * order, every line newline-terminated. To keep the export byte-identical
 * to that rendering, the console selects whole lines from the body and
 * never re-serializes the JSON (a round-trip through the browser's
 * serializer would reformat numbers and spacing).
 */

import type { Decision } from "./model.js";

export class ExportMismatchError extends Error {}

/**
 * Keep the lines whose decision is "approved", preserving order and bytes.
 *
 * The decision list must match the body line-for-line; a count mismatch
 * means the view and the server disagree about the session's records,
 * and exporting anything would be a silent corruption.
 */
export function selectApprovedLines(recordsBody: string, decisions: readonly Decision[]): string {
  const lines = splitRecordLines(recordsBody);
  if (lines.length !== decisions.length) {
    throw new ExportMismatchError(
      `records body has ${lines.length} lines but the view holds ${decisions.length} decisions`,
    );
  }
  return lines.filter((_, i) => decisions[i] === "approved").join("");
}

/** Split a JSON-lines body into newline-terminated lines, validating shape. */
export function splitRecordLines(recordsBody: string): string[] {
  if (recordsBody.length === 0) return [];
  if (!recordsBody.endsWith("\n")) {
    throw new ExportMismatchError("records body does not end with a newline");
  }
  return recordsBody
    .slice(0, -1)
    .split("\n")
    .map((line) => line + "\n");
}

export function exportFileName(sessionId: string): string {
  return `${sessionId}-approved-records.jsonl`;
}
