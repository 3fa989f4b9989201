import type { ExportFormat, JobDetail, JobRequest, JobSummary, ReviewState } from "./types.js";

export class ApiError extends Error {
  constructor(public status: number, detail: string) {
    super(detail);
  }
}

async function jsonOrThrow<T>(response: Response): Promise<T> {
  if (!response.ok) {
    let detail = response.statusText;
    try {
      detail = (await response.json()).detail ?? detail;
    } catch {
      // non-json error body; keep the status text
    }
    throw new ApiError(response.status, detail);
  }
  return response.json() as Promise<T>;
}

export async function createJob(request: JobRequest, base = ""): Promise<{ jobId: string }> {
  return jsonOrThrow(await fetch(`${base}/jobs`, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(request),
  }));
}

export async function listJobs(base = ""): Promise<JobSummary[]> {
  return jsonOrThrow(await fetch(`${base}/jobs`));
}

export async function jobDetail(jobId: string, base = ""): Promise<JobDetail> {
  return jsonOrThrow(await fetch(`${base}/jobs/${jobId}`));
}

export async function stopJob(jobId: string, base = ""): Promise<{ state: string }> {
  return jsonOrThrow(await fetch(`${base}/jobs/${jobId}/stop`, { method: "POST" }));
}

export async function reviewResult(
  jobId: string,
  resultId: string,
  verdict: "accept" | "reject",
  base = "",
): Promise<{ reviewState: ReviewState }> {
  return jsonOrThrow(await fetch(`${base}/jobs/${jobId}/results/${resultId}/review`, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify({ verdict }),
  }));
}

/** Download URL for a job export; `resultId` narrows to one axiom. */
export function exportUrl(
  jobId: string,
  format: ExportFormat,
  acceptedOnly: boolean,
  resultId?: string,
  base = "",
): string {
  const params = new URLSearchParams({ format });
  if (acceptedOnly) params.set("accepted", "true");
  if (resultId) params.set("result", resultId);
  return `${base}/jobs/${jobId}/export?${params}`;
}

export async function fetchText(url: string): Promise<string> {
  const response = await fetch(url);
  if (!response.ok) throw new ApiError(response.status, response.statusText);
  return response.text();
}

/** Count of axioms in the working ontology (one "SubClassOf:" line each). */
export async function ontologyAxiomCount(base = ""): Promise<number> {
  const text = await fetchText(`${base}/ontology/export?format=manchester`);
  return text.split("\n").filter((line) => line.includes(" SubClassOf: ")).length;
}
