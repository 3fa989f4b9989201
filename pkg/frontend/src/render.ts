/** DOM builders. All dynamic regions are rebuilt from state on change. */

import type { AxiomRow, JobView } from "./state.js";
import { isTerminal, percentOf, sortedRows } from "./state.js";
import type { FieldErrors } from "./validate.js";
import type { ExportFormat, JobRequest, JobSummary } from "./types.js";

export interface JobHandlers {
  onStop(): void;
  onReview(resultId: string, verdict: "accept" | "reject"): void;
  onToggleDetail(resultId: string): void;
  onAcceptedOnly(value: boolean): void;
  exportUrl(format: ExportFormat, resultId?: string): string;
}

export interface JobViewOptions {
  openDetails: ReadonlySet<string>;
  shaclByResult: ReadonlyMap<string, string>;
  acceptedOnly: boolean;
  notice?: string;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

// ---- job list ----

export function renderJobList(jobs: JobSummary[]): HTMLElement {
  const section = el("section", "job-list");
  section.appendChild(el("h2", undefined, "Jobs"));
  if (jobs.length === 0) {
    section.appendChild(el("p", "empty", "No jobs yet — configure one below."));
    return section;
  }
  const table = el("table");
  const head = el("tr");
  for (const h of ["Job", "State", "Axioms", "Created"]) head.appendChild(el("th", undefined, h));
  table.appendChild(head);
  for (const job of jobs) {
    const row = el("tr", "job-row");
    const link = el("a", undefined, job.jobId);
    link.href = `#/jobs/${job.jobId}`;
    const idCell = el("td");
    idCell.appendChild(link);
    row.appendChild(idCell);
    row.appendChild(el("td", `state state-${job.state.toLowerCase()}`, job.state));
    row.appendChild(el("td", undefined, String(job.resultCount)));
    row.appendChild(el("td", undefined, job.createdAt));
    table.appendChild(row);
  }
  section.appendChild(table);
  return section;
}

// ---- wizard ----

const DEMO_PRESET: JobRequest = {
  fixture: "demo",
  classIri: "http://dbpedia.org/ontology/Book",
  minSupport: "0.6",
  maxDepth: 2,
};

export function renderWizard(onSubmit: (request: JobRequest) => void): HTMLElement {
  const form = el("form", "wizard");
  form.appendChild(el("h2", undefined, "New mining job"));

  const sourceRow = fieldRow("source", "Source");
  const endpointInput = textInput("endpoint", "https://…/sparql");
  const fixtureBox = el("input") as HTMLInputElement;
  fixtureBox.type = "checkbox";
  fixtureBox.id = "fixture";
  const fixtureLabel = el("label", "inline", " use bundled demo graph");
  fixtureLabel.prepend(fixtureBox);
  sourceRow.append(endpointInput, fixtureLabel);
  form.appendChild(sourceRow);

  const targetRow = fieldRow("target", "Target");
  const classInput = textInput("classIri", "class IRI, e.g. http://dbpedia.org/ontology/Book");
  const urisArea = el("textarea") as HTMLTextAreaElement;
  urisArea.id = "uris";
  urisArea.placeholder = "…or one subject IRI per line";
  urisArea.rows = 2;
  targetRow.append(classInput, urisArea);
  form.appendChild(targetRow);

  const minSupport = textInput("minSupport", "0.8 or 4/5");
  form.appendChild(fieldRow("minSupport", "Min support", minSupport));
  const maxDepth = numberInput("maxDepth", 1);
  form.appendChild(fieldRow("maxDepth", "Max depth", maxDepth));
  const sampleSize = numberInput("sampleSize");
  const strategy = el("select") as HTMLSelectElement;
  strategy.id = "strategy";
  for (const name of ["uniform", "predicates", "triples"]) {
    const option = el("option", undefined, name) as HTMLOptionElement;
    option.value = name;
    strategy.appendChild(option);
  }
  const seed = numberInput("seed", 0);
  const samplingRow = fieldRow("sampleSize", "Sampling");
  samplingRow.append(sampleSize, strategy, el("label", "inline", "seed "), seed);
  form.appendChild(samplingRow);

  const ignoreArea = el("textarea") as HTMLTextAreaElement;
  ignoreArea.id = "ignorePredicates";
  ignoreArea.placeholder = "ignored predicates: one regular expression per line";
  ignoreArea.rows = 2;
  form.appendChild(fieldRow("ignorePredicates", "Ignore", ignoreArea));

  const buttons = el("div", "buttons");
  const preset = el("button", "preset", "Demo preset") as HTMLButtonElement;
  preset.type = "button";
  preset.onclick = () => {
    fixtureBox.checked = true;
    endpointInput.value = "";
    classInput.value = DEMO_PRESET.classIri!;
    urisArea.value = "";
    minSupport.value = DEMO_PRESET.minSupport;
    maxDepth.value = String(DEMO_PRESET.maxDepth);
  };
  const run = el("button", "run", "Run") as HTMLButtonElement;
  run.type = "submit";
  buttons.append(preset, run);
  form.appendChild(buttons);

  form.onsubmit = (event) => {
    event.preventDefault();
    onSubmit(readForm());
  };

  function readForm(): JobRequest {
    const request: JobRequest = { minSupport: minSupport.value.trim() };
    if (fixtureBox.checked) request.fixture = "demo";
    else if (endpointInput.value.trim()) request.endpoint = endpointInput.value.trim();
    if (classInput.value.trim()) request.classIri = classInput.value.trim();
    const uris = urisArea.value.split("\n").map((l) => l.trim()).filter(Boolean);
    if (uris.length) request.uris = uris;
    if (maxDepth.value) request.maxDepth = Number(maxDepth.value);
    if (sampleSize.value) {
      request.sampleSize = Number(sampleSize.value);
      request.strategy = strategy.value as JobRequest["strategy"];
      request.seed = Number(seed.value || "0");
    }
    const ignored = ignoreArea.value.split("\n").map((l) => l.trim()).filter(Boolean);
    if (ignored.length) request.ignorePredicates = ignored;
    return request;
  }

  return form;
}

export function showErrors(form: HTMLElement, errors: FieldErrors): void {
  for (const span of Array.from(form.querySelectorAll(".field-error"))) span.remove();
  for (const [field, message] of Object.entries(errors)) {
    const row = form.querySelector(`[data-field="${field}"]`) ?? form;
    row.appendChild(el("span", "field-error", message));
  }
}

function fieldRow(field: string, label: string, ...children: HTMLElement[]): HTMLElement {
  const row = el("div", "field");
  row.setAttribute("data-field", field);
  row.appendChild(el("label", undefined, label));
  row.append(...children);
  return row;
}

function textInput(id: string, placeholder: string): HTMLInputElement {
  const input = el("input") as HTMLInputElement;
  input.type = "text";
  input.id = id;
  input.placeholder = placeholder;
  return input;
}

function numberInput(id: string, value?: number): HTMLInputElement {
  const input = el("input") as HTMLInputElement;
  input.type = "number";
  input.id = id;
  if (value !== undefined) input.value = String(value);
  return input;
}

// ---- job view ----

export function renderJobView(
  view: JobView,
  options: JobViewOptions,
  handlers: JobHandlers,
): HTMLElement {
  const section = el("section", "job-view");

  const header = el("div", "job-header");
  header.appendChild(el("h2", undefined, `Job ${view.jobId}`));
  header.appendChild(el("span", `state state-${view.state.toLowerCase()}`, view.state));
  if (view.partial) header.appendChild(el("span", "badge partial", "partial"));
  if (!isTerminal(view.state)) {
    const stop = el("button", "stop", "Stop") as HTMLButtonElement;
    stop.onclick = handlers.onStop;
    header.appendChild(stop);
  }
  if (view.error) header.appendChild(el("p", "error", view.error));
  if (options.notice) header.appendChild(el("p", "notice", options.notice));
  section.appendChild(header);

  section.appendChild(renderAxiomTable(view, options, handlers));
  section.appendChild(renderExportBar(options, handlers));
  return section;
}

function renderAxiomTable(
  view: JobView,
  options: JobViewOptions,
  handlers: JobHandlers,
): HTMLElement {
  const table = el("table", "axioms");
  const head = el("tr");
  for (const h of ["Axiom", "Support", "Depth", ""]) head.appendChild(el("th", undefined, h));
  table.appendChild(head);

  for (const row of sortedRows(view)) {
    table.appendChild(renderAxiomRow(row, handlers));
    if (options.openDetails.has(row.resultId)) {
      table.appendChild(renderDetail(row, options.shaclByResult.get(row.resultId)));
    }
  }
  if (view.rows.length === 0) {
    const empty = el("tr");
    const cell = el("td", "empty", "No axioms mined yet.");
    cell.colSpan = 4;
    empty.appendChild(cell);
    table.appendChild(empty);
  }
  return table;
}

function renderAxiomRow(row: AxiomRow, handlers: JobHandlers): HTMLElement {
  const tr = el("tr", `axiom-row review-${row.reviewState.toLowerCase()}`);
  tr.setAttribute("data-result-id", row.resultId);

  tr.appendChild(el("td", "axiom-text", row.serializedPattern));
  tr.appendChild(el("td", "support", `${row.support} (${percentOf(row.support)})`));
  tr.appendChild(el("td", "depth", String(row.depth)));

  const controls = el("td", "controls");
  const info = el("button", "info", "@") as HTMLButtonElement;
  info.title = "details";
  info.onclick = () => handlers.onToggleDetail(row.resultId);
  controls.appendChild(info);
  if (row.reviewState === "Accepted") {
    // locked: the axiom is in the ontology now, only the info button remains
    controls.appendChild(el("span", "accepted-mark", "✓ accepted"));
  } else {
    const accept = el("button", "accept", "✓") as HTMLButtonElement;
    accept.title = "accept into ontology";
    accept.onclick = () => handlers.onReview(row.resultId, "accept");
    const reject = el("button", "reject", "✗") as HTMLButtonElement;
    reject.title = "reject";
    reject.onclick = () => handlers.onReview(row.resultId, "reject");
    controls.append(accept, reject);
  }
  tr.appendChild(controls);
  return tr;
}

function renderDetail(row: AxiomRow, shacl: string | undefined): HTMLElement {
  const tr = el("tr", "detail-row");
  const cell = el("td");
  cell.colSpan = 4;

  const panel = el("div", "detail");
  const facts = el("dl");
  addFact(facts, "Support", `${row.support} = ${percentOf(row.support)}`);
  addFact(facts, "Proof set", `${row.proofSetSize} subjects`);
  addFact(facts, "Depth", String(row.depth));
  facts.appendChild(el("dt", undefined, "Sample"));
  const sample = el("dd", "proof-sample");
  for (const term of row.proofSetSample.slice(0, 10)) {
    sample.appendChild(proofTerm(term));
  }
  facts.appendChild(sample);
  panel.appendChild(facts);

  const shaclBlock = el("pre", "shacl", shacl ?? "loading SHACL…");
  panel.appendChild(shaclBlock);
  cell.appendChild(panel);
  tr.appendChild(cell);
  return tr;
}

/** Absolute IRIs arrive angle-bracketed; those become links. */
function proofTerm(term: string): HTMLElement {
  if (term.startsWith("<") && term.endsWith(">")) {
    const iri = term.slice(1, -1);
    const link = el("a", "proof-term", iri);
    link.href = iri;
    link.target = "_blank";
    link.rel = "noreferrer";
    return link;
  }
  return el("span", "proof-term", term);
}

function addFact(list: HTMLElement, term: string, detail: string): void {
  list.appendChild(el("dt", undefined, term));
  list.appendChild(el("dd", undefined, detail));
}

function renderExportBar(options: JobViewOptions, handlers: JobHandlers): HTMLElement {
  const bar = el("div", "export-bar");
  bar.appendChild(el("span", undefined, "Export:"));
  const formats: ExportFormat[] = ["json", "manchester", "shacl-turtle"];
  for (const format of formats) {
    const link = el("a", `export export-${format}`, format) as HTMLAnchorElement;
    link.href = handlers.exportUrl(format);
    link.setAttribute("download", "");
    bar.appendChild(link);
  }
  const acceptedBox = el("input") as HTMLInputElement;
  acceptedBox.type = "checkbox";
  acceptedBox.id = "accepted-only";
  acceptedBox.checked = options.acceptedOnly;
  acceptedBox.onchange = () => handlers.onAcceptedOnly(acceptedBox.checked);
  const label = el("label", "inline", " accepted only");
  label.prepend(acceptedBox);
  bar.appendChild(label);
  return bar;
}

// ---- topbar ----

export function renderTopbar(axiomCount: number | null): HTMLElement {
  const bar = el("header", "topbar");
  const home = el("a", "title", "owlminer");
  home.href = "#/";
  bar.appendChild(home);
  const counter = el("span", "ontology-counter",
    axiomCount === null ? "ontology: …" : `ontology: ${axiomCount} axiom${axiomCount === 1 ? "" : "s"}`);
  bar.appendChild(counter);
  const links = el("span", "ontology-links");
  for (const [label, url] of [
    ["manchester", "/ontology/export?format=manchester"],
    ["turtle", "/ontology/export?format=turtle"],
  ] as const) {
    const link = el("a", "ontology-export", label) as HTMLAnchorElement;
    link.href = url;
    link.setAttribute("download", "");
    links.appendChild(link);
  }
  bar.appendChild(links);
  return bar;
}
