/**
 * SSE subscription for one job's event stream.
 *
 * The server tags every frame with a monotone id and closes the stream
 * after the terminal state event. The browser's EventSource reconnects on
 * network drops and resends Last-Event-ID on its own, so replay gaps heal
 * without bookkeeping here; the reducer drops any overlap. Our one job is
 * to stop the auto-reconnect once the terminal event has arrived.
 */

import type { ServerEvent, StateChange } from "./types.js";

export interface FeedHandle {
  close(): void;
}

interface EventSourceLike {
  addEventListener(type: string, listener: (event: MessageEvent) => void): void;
  close(): void;
}

type EventSourceFactory = (url: string) => EventSourceLike;

const defaultFactory: EventSourceFactory = (url) =>
  new (globalThis as { EventSource: new (url: string) => EventSourceLike }).EventSource(url);

export function openFeed(
  jobId: string,
  lastEventId: number,
  onEvent: (event: ServerEvent) => void,
  base = "",
  factory: EventSourceFactory = defaultFactory,
): FeedHandle {
  const url = `${base}/jobs/${jobId}/events?lastEventId=${lastEventId}`;
  const source = factory(url);

  const deliver = (type: ServerEvent["type"]) => (event: MessageEvent) => {
    const eventId = Number.parseInt((event as { lastEventId?: string }).lastEventId ?? "0", 10);
    const data = JSON.parse(event.data as string);
    onEvent({ eventId, type, data } as ServerEvent);
    if (type === "job-state-changed" && isTerminalChange(data)) {
      source.close();
    }
  };

  source.addEventListener("axiom-mined", deliver("axiom-mined"));
  source.addEventListener("job-state-changed", deliver("job-state-changed"));
  return { close: () => source.close() };
}

function isTerminalChange(data: StateChange): boolean {
  return data.state === "Stopped" || data.state === "Finished" || data.state === "Failed";
}
