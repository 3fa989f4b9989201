/**
 * Client-side checks mirroring the server's 400 rules, so a form that
 * passes here is a form the server accepts. The server remains the
 * authority — these exist to put the message next to the field.
 */

import type { JobRequest } from "./types.js";

export type FieldErrors = Partial<Record<keyof JobRequest | "source" | "target", string>>;

const IRI_re = /^[A-Za-z][A-Za-z0-9+.-]*:[^\s<>"{}|\\^`]*$/;

export function validateRequest(request: JobRequest): FieldErrors {
  const errors: FieldErrors = {};

  const hasEndpoint = Boolean(request.endpoint);
  const hasFixture = request.fixture !== undefined;
  if (hasEndpoint === hasFixture) {
    errors.source = "pick exactly one of endpoint or demo fixture";
  } else if (hasFixture && request.fixture !== "demo") {
    errors.source = "only the bundled 'demo' fixture is served";
  }

  const hasClass = Boolean(request.classIri);
  const hasUris = Array.isArray(request.uris) && request.uris.length > 0;
  if (hasClass === hasUris) {
    errors.target = "pick exactly one of class IRI or subject list";
  }
  if (hasUris) {
    const bad = request.uris!.find((u) => !IRI_re.test(u));
    if (bad !== undefined) errors.uris = `not an absolute IRI: ${bad}`;
  }

  const support = parseFraction(request.minSupport);
  if (support === null) {
    errors.minSupport = "must be a fraction like 0.8 or 4/5";
  } else if (!(support.n > 0n && support.n <= support.d)) {
    errors.minSupport = "must be in (0, 1]";
  }

  checkInt(errors, "maxDepth", request.maxDepth, 1);
  checkInt(errors, "batchSize", request.batchSize, 1);
  checkInt(errors, "sampleSize", request.sampleSize, 1);
  checkInt(errors, "queryBudget", request.queryBudget, 1);
  if (request.seed !== undefined && !Number.isInteger(request.seed)) {
    errors.seed = "must be an integer";
  }
  return errors;
}

function checkInt(errors: FieldErrors, field: keyof JobRequest, value: number | undefined, min: number) {
  if (value === undefined) return;
  if (!Number.isInteger(value) || value < min) {
    errors[field] = `must be an integer ≥ ${min}`;
  }
}

/** "0.8" -> 8/10, "4/5" -> 4/5; null when unparseable. Exact, no floats. */
export function parseFraction(text: string): { n: bigint; d: bigint } | null {
  const trimmed = (text ?? "").trim();
  let match = /^(\d+)\s*\/\s*(\d+)$/.exec(trimmed);
  if (match) {
    const d = BigInt(match[2]!);
    return d === 0n ? null : { n: BigInt(match[1]!), d };
  }
  match = /^(\d+)(?:\.(\d+))?$/.exec(trimmed);
  if (!match) return null;
  const whole = match[1]!;
  const fractional = match[2] ?? "";
  const d = 10n ** BigInt(fractional.length);
  return { n: BigInt(whole) * d + BigInt(fractional || "0"), d };
}
