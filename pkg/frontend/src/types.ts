/** Wire types for the mining service HTTP API. Field names match the JSON verbatim. */

export type JobState = "Pending" | "Running" | "Stopped" | "Finished" | "Failed";

export type ReviewState = "Unreviewed" | "Accepted" | "Rejected";

/** One mined axiom as the server reports it. */
export interface AxiomRecord {
  resultId: string;
  /** Server-side rendering of the class expression; shown verbatim. */
  serializedPattern: string;
  /** Exact support as "numerator/denominator". */
  support: string;
  proofSetSize: number;
  proofSetSample: string[];
  depth: number;
  partialFlag: boolean;
}

export interface JobSummary {
  jobId: string;
  state: JobState;
  request: JobRequest;
  resultCount: number;
  createdAt: string;
  updatedAt: string;
  error: string | null;
  partial: boolean;
}

export interface JobDetail extends JobSummary {
  results: (AxiomRecord & { reviewState: ReviewState })[];
}

export interface JobRequest {
  endpoint?: string;
  fixture?: string;
  classIri?: string;
  uris?: string[];
  minSupport: string;
  maxDepth?: number;
  batchSize?: number;
  sampleSize?: number;
  strategy?: "uniform" | "predicates" | "triples";
  seed?: number;
  ignorePredicates?: string[];
  queryBudget?: number;
  politenessDelayMs?: number;
  prefixes?: Record<string, string>;
}

export interface StateChange {
  state: JobState;
  partial?: boolean;
  error?: string;
  recovered?: boolean;
}

export type ServerEvent =
  | { eventId: number; type: "axiom-mined"; data: AxiomRecord }
  | { eventId: number; type: "job-state-changed"; data: StateChange };

export type ExportFormat = "json" | "manchester" | "shacl-turtle";
