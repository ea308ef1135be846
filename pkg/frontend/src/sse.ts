/**
 * Incremental parser for the service's event stream.
 *
 * Frames arrive as `id: N\nevent: kind\ndata: <json>\n\n`. Network reads
 * split that text at arbitrary byte boundaries, so the parser buffers
 * input and yields only complete frames; feed it chunks of any size and
 * the frame sequence comes out identical.
 */

export interface SseFrame {
  /** Server sequence number; 1-based and gapless within a session. */
  id: number;
  event: string;
  data: unknown;
}

export class SseParseError extends Error {}

export class SseParser {
  private buffer = "";

  /** Consume a chunk and return every frame it completed. */
  push(chunk: string): SseFrame[] {
    this.buffer += chunk;
    const frames: SseFrame[] = [];
    let end: number;
    while ((end = this.buffer.indexOf("\n\n")) !== -1) {
      const block = this.buffer.slice(0, end);
      this.buffer = this.buffer.slice(end + 2);
      if (block.trim().length > 0) frames.push(parseFrame(block));
    }
    return frames;
  }

  /** Bytes that never completed a frame; empty after a clean close. */
  residue(): string {
    return this.buffer;
  }
}

function parseFrame(block: string): SseFrame {
  let id: number | null = null;
  let event: string | null = null;
  const dataLines: string[] = [];
  for (const line of block.split("\n")) {
    if (line.startsWith(":")) continue; // comment line, e.g. keep-alive
    const sep = line.indexOf(":");
    if (sep === -1) {
      throw new SseParseError(`malformed event line: ${JSON.stringify(line)}`);
    }
    const field = line.slice(0, sep);
    const value = line.startsWith(" ", sep + 1) ? line.slice(sep + 2) : line.slice(sep + 1);
    if (field === "id") {
      id = Number(value);
    } else if (field === "event") {
      event = value;
    } else if (field === "data") {
      dataLines.push(value);
    }
    // Unknown fields are ignored, as the SSE format requires.
  }
  if (id === null || !Number.isInteger(id) || id < 1) {
    throw new SseParseError(`frame without a positive integer id: ${JSON.stringify(block)}`);
  }
  if (event === null) {
    throw new SseParseError(`frame without an event kind: ${JSON.stringify(block)}`);
  }
  if (dataLines.length === 0) {
    throw new SseParseError(`frame without data: ${JSON.stringify(block)}`);
  }
  const raw = dataLines.join("\n");
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch {
    throw new SseParseError(`frame data is not JSON: ${raw}`);
  }
  return { id, event, data };
}

/**
 * Drain an SSE response body, calling onFrame once per complete frame.
 *
 * The service closes the stream after the final `done` event, so this
 * resolves when the session's event log has been fully delivered. A body
 * that ends mid-frame is a transport fault and raises.
 */
export async function readSseBody(
  body: ReadableStream<Uint8Array>,
  onFrame: (frame: SseFrame) => void,
): Promise<void> {
  const parser = new SseParser();
  const decoder = new TextDecoder();
  const reader = body.getReader();
  for (;;) {
    const { done, value } = await reader.read();
    if (done) break;
    for (const frame of parser.push(decoder.decode(value, { stream: true }))) {
      onFrame(frame);
    }
  }
  for (const frame of parser.push(decoder.decode())) {
    onFrame(frame);
  }
  if (parser.residue().trim().length > 0) {
    throw new SseParseError(`stream closed mid-frame: ${JSON.stringify(parser.residue())}`);
  }
}
