/**
 * Job view state as a pure fold over the server's event log.
 *
 * Everything the axiom table shows is reconstructible by replaying events
 * into `applyServerEvent`; review verdicts and detail snapshots arrive
 * through their own reducers. No function here touches the DOM or the
 * network.
 */

import type {
  AxiomRecord,
  JobDetail,
  JobState,
  ReviewState,
  ServerEvent,
} from "./types.js";

export interface AxiomRow extends AxiomRecord {
  reviewState: ReviewState;
}

export interface JobView {
  jobId: string;
  state: JobState | "Unknown";
  partial: boolean;
  error: string | null;
  /** Highest event id folded in; replays at or below it are dropped. */
  lastEventId: number;
  rows: AxiomRow[];
}

export function initialView(jobId: string): JobView {
  return { jobId, state: "Unknown", partial: false, error: null, lastEventId: 0, rows: [] };
}

/** Fold one SSE event. Duplicate deliveries (reconnect replay overlap) are no-ops. */
export function applyServerEvent(view: JobView, event: ServerEvent): JobView {
  if (event.eventId <= view.lastEventId) return view;
  const next: JobView = { ...view, lastEventId: event.eventId };
  if (event.type === "axiom-mined") {
    next.rows = addRow(view.rows, event.data);
  } else {
    next.state = event.data.state;
    if (event.data.partial !== undefined) next.partial = event.data.partial;
    next.error = event.data.error ?? null;
  }
  return next;
}

/** Fold a GET /jobs/{id} snapshot (page load happens before the stream connects). */
export function applyDetail(view: JobView, detail: JobDetail): JobView {
  let rows = view.rows;
  for (const result of detail.results) {
    rows = addRow(rows, result, result.reviewState);
  }
  return {
    ...view,
    state: detail.state,
    partial: detail.partial,
    error: detail.error,
    rows,
  };
}

export function applyReview(view: JobView, resultId: string, reviewState: ReviewState): JobView {
  return {
    ...view,
    rows: view.rows.map((r) => (r.resultId === resultId ? { ...r, reviewState } : r)),
  };
}

function addRow(rows: AxiomRow[], record: AxiomRecord, reviewState?: ReviewState): AxiomRow[] {
  const existing = rows.find((r) => r.resultId === record.resultId);
  if (existing) {
    // a snapshot can carry a fresher review state than what we folded live
    return reviewState && reviewState !== existing.reviewState
      ? rows.map((r) => (r.resultId === record.resultId ? { ...r, reviewState } : r))
      : rows;
  }
  return [...rows, { ...record, reviewState: reviewState ?? "Unreviewed" }];
}

/** Display order: support descending (exact), then the rendered text. */
export function sortedRows(view: JobView): AxiomRow[] {
  return [...view.rows].sort((a, b) => {
    const cmp = compareFractions(b.support, a.support);
    return cmp !== 0 ? cmp : a.serializedPattern.localeCompare(b.serializedPattern);
  });
}

export function compareFractions(a: string, b: string): number {
  const [an, ad] = parts(a);
  const [bn, bd] = parts(b);
  const left = an * bd;
  const right = bn * ad;
  return left < right ? -1 : left > right ? 1 : 0;
}

function parts(fraction: string): [bigint, bigint] {
  const slash = fraction.indexOf("/");
  if (slash < 0) return [BigInt(fraction), 1n];
  return [BigInt(fraction.slice(0, slash)), BigInt(fraction.slice(slash + 1))];
}

/** "3/5" -> "60%" (rounded to the nearest whole percent). */
export function percentOf(fraction: string): string {
  const [n, d] = parts(fraction);
  if (d === 0n) return "?";
  return `${Math.round(Number((n * 10000n) / d) / 100)}%`;
}

export function isTerminal(state: JobState | "Unknown"): boolean {
  return state === "Stopped" || state === "Finished" || state === "Failed";
}
