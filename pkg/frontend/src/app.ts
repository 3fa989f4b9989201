/** Entry point: hash routing plus the glue between api/feed/state/render. */

import { ApiError, createJob, exportUrl, fetchText, jobDetail, listJobs,
  ontologyAxiomCount, reviewResult, stopJob } from "./api.js";
import { openFeed, type FeedHandle } from "./feed.js";
import { applyDetail, applyReview, applyServerEvent, initialView, type JobView } from "./state.js";
import { renderJobList, renderJobView, renderTopbar, renderWizard, showErrors } from "./render.js";
import { validateRequest } from "./validate.js";
import type { JobRequest } from "./types.js";

interface AppState {
  view: JobView | null;
  feed: FeedHandle | null;
  openDetails: Set<string>;
  shaclByResult: Map<string, string>;
  acceptedOnly: boolean;
  axiomCount: number | null;
  notice?: string;
}

const state: AppState = {
  view: null,
  feed: null,
  openDetails: new Set(),
  shaclByResult: new Map(),
  acceptedOnly: false,
  axiomCount: null,
};

function root(): HTMLElement {
  return document.getElementById("app")!;
}

async function route(): Promise<void> {
  const hash = window.location.hash;
  const match = /^#\/jobs\/([^/]+)$/.exec(hash);
  if (match) await showJob(match[1]!);
  else await showHome();
}

async function showHome(): Promise<void> {
  closeFeed();
  state.view = null;
  state.openDetails.clear();
  state.shaclByResult.clear();

  const container = root();
  container.replaceChildren(renderTopbar(state.axiomCount));
  let jobs;
  try {
    jobs = await listJobs();
  } catch (err) {
    container.appendChild(errorBox(err));
    return;
  }
  container.appendChild(renderJobList(jobs));
  const wizard = renderWizard(submitJob);
  container.appendChild(wizard);
  refreshOntologyCounter();
}

async function submitJob(request: JobRequest): Promise<void> {
  const form = root().querySelector<HTMLElement>("form.wizard")!;
  const errors = validateRequest(request);
  showErrors(form, errors);
  if (Object.keys(errors).length > 0) return;
  try {
    const created = await createJob(request);
    window.location.hash = `#/jobs/${created.jobId}`;
  } catch (err) {
    // server-side rejection the client validator did not anticipate
    showErrors(form, { source: describe(err) });
  }
}

async function showJob(jobId: string): Promise<void> {
  closeFeed();
  state.view = initialView(jobId);
  state.openDetails.clear();
  state.shaclByResult.clear();
  state.notice = undefined;

  let detail;
  try {
    detail = await jobDetail(jobId);
  } catch (err) {
    root().replaceChildren(renderTopbar(state.axiomCount), errorBox(err));
    return;
  }
  state.view = applyDetail(state.view, detail);
  paint();
  refreshOntologyCounter();

  state.feed = openFeed(jobId, state.view.lastEventId, (event) => {
    if (!state.view || state.view.jobId !== jobId) return;
    state.view = applyServerEvent(state.view, event);
    paint();
  });
}

function paint(): void {
  if (!state.view) return;
  const view = state.view;
  const page = renderJobView(view, {
    openDetails: state.openDetails,
    shaclByResult: state.shaclByResult,
    acceptedOnly: state.acceptedOnly,
    notice: state.notice,
  }, {
    onStop: async () => {
      try {
        await stopJob(view.jobId);
      } catch (err) {
        state.notice = describe(err);
        paint();
      }
    },
    onReview: async (resultId, verdict) => {
      try {
        await reviewResult(view.jobId, resultId, verdict);
        state.view = applyReview(state.view!, resultId,
          verdict === "accept" ? "Accepted" : "Rejected");
        state.notice = undefined;
        paint();
        refreshOntologyCounter();
      } catch (err) {
        state.notice = describe(err);
        paint();
      }
    },
    onToggleDetail: (resultId) => {
      if (state.openDetails.has(resultId)) state.openDetails.delete(resultId);
      else {
        state.openDetails.add(resultId);
        loadShacl(view.jobId, resultId);
      }
      paint();
    },
    onAcceptedOnly: (value) => {
      state.acceptedOnly = value;
      paint();
    },
    exportUrl: (format, resultId) =>
      exportUrl(view.jobId, format, state.acceptedOnly, resultId),
  });
  root().replaceChildren(renderTopbar(state.axiomCount), page);
}

async function loadShacl(jobId: string, resultId: string): Promise<void> {
  if (state.shaclByResult.has(resultId)) return;
  try {
    const text = await fetchText(exportUrl(jobId, "shacl-turtle", false, resultId));
    state.shaclByResult.set(resultId, text);
  } catch (err) {
    state.shaclByResult.set(resultId, `failed to load: ${describe(err)}`);
  }
  if (state.openDetails.has(resultId)) paint();
}

async function refreshOntologyCounter(): Promise<void> {
  try {
    state.axiomCount = await ontologyAxiomCount();
  } catch {
    state.axiomCount = null;
  }
  const counter = document.querySelector(".ontology-counter");
  if (counter) {
    counter.textContent = state.axiomCount === null
      ? "ontology: …"
      : `ontology: ${state.axiomCount} axiom${state.axiomCount === 1 ? "" : "s"}`;
  }
}

function closeFeed(): void {
  if (state.feed) {
    state.feed.close();
    state.feed = null;
  }
}

function errorBox(err: unknown): HTMLElement {
  const box = document.createElement("div");
  box.className = "error-box";
  box.textContent = describe(err);
  return box;
}

function describe(err: unknown): string {
  if (err instanceof ApiError) return err.detail;
  return err instanceof Error ? err.message : String(err);
}

window.addEventListener("hashchange", () => void route());
void route();
