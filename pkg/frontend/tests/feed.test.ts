import { describe, expect, it } from "vitest";
import { openFeed } from "../src/feed.js";
import type { ServerEvent } from "../src/types.js";

/** Just enough of EventSource for openFeed: named listeners plus close(). */
class FakeSource {
  url: string;
  closed = false;
  private listeners = new Map<string, ((event: MessageEvent) => void)[]>();

  constructor(url: string) {
    this.url = url;
  }

  addEventListener(type: string, listener: (event: MessageEvent) => void): void {
    const existing = this.listeners.get(type) ?? [];
    this.listeners.set(type, [...existing, listener]);
  }

  close(): void {
    this.closed = true;
  }

  emit(type: string, eventId: number, data: unknown): void {
    const event = { lastEventId: String(eventId), data: JSON.stringify(data) } as MessageEvent;
    for (const listener of this.listeners.get(type) ?? []) listener(event);
  }
}

function open(lastEventId = 0) {
  let source: FakeSource | undefined;
  const seen: ServerEvent[] = [];
  const handle = openFeed("j1", lastEventId, (e) => seen.push(e), "", (url) => {
    source = new FakeSource(url);
    return source;
  });
  return { source: source!, seen, handle };
}

describe("openFeed", () => {
  it("requests the stream from the replay position", () => {
    expect(open(0).source.url).toBe("/jobs/j1/events?lastEventId=0");
    expect(open(7).source.url).toBe("/jobs/j1/events?lastEventId=7");
  });

  it("delivers both named event types with their ids", () => {
    const { source, seen } = open();
    source.emit("job-state-changed", 1, { state: "Running" });
    source.emit("axiom-mined", 2, { resultId: "r1", support: "1/1" });
    expect(seen).toHaveLength(2);
    expect(seen[0]).toMatchObject({ eventId: 1, type: "job-state-changed" });
    expect(seen[1]).toMatchObject({ eventId: 2, type: "axiom-mined" });
    expect((seen[1]!.data as { resultId: string }).resultId).toBe("r1");
  });

  it("leaves the stream open across non-terminal state changes", () => {
    const { source } = open();
    source.emit("job-state-changed", 1, { state: "Running" });
    expect(source.closed).toBe(false);
  });

  it("closes the source on the terminal event so EventSource stops reconnecting", () => {
    for (const state of ["Finished", "Stopped", "Failed"]) {
      const { source, seen } = open();
      source.emit("job-state-changed", 1, { state, partial: state !== "Finished" });
      expect(source.closed).toBe(true);
      expect(seen).toHaveLength(1);
    }
  });

  it("closes on demand", () => {
    const { source, handle } = open();
    handle.close();
    expect(source.closed).toBe(true);
  });
});
