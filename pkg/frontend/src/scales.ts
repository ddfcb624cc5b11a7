/**
 * Metric scale validation, mirroring the server rules exactly so the UI can
 * never build a submission the service would reject.
 */

import { z } from 'zod';

export type MetricKind = 'binary' | 'likert' | 'binary_confidence' | 'category';

export interface MetricDescriptor {
  name: string;
  kind: MetricKind;
  scale: (number | string)[];
  confidence_scale: number[] | null;
  guidance: string;
}

export interface Rating {
  metric: string;
  value: number | string;
  confidence?: number | null;
}

const binaryValue = z.union([z.literal(0), z.literal(1)]);
const confidenceValue = z.union([z.literal(1), z.literal(2), z.literal(3)]);

function likertValue(scale: (number | string)[]) {
  const [lo, hi] = scale as [number, number];
  return z.number().int().min(lo).max(hi);
}

/** Build the value schema for one metric descriptor. */
export function schemaFor(metric: MetricDescriptor): z.ZodTypeAny {
  switch (metric.kind) {
    case 'binary':
    case 'binary_confidence':
      return binaryValue;
    case 'likert':
      return likertValue(metric.scale);
    case 'category':
      return z.enum(metric.scale.map(String) as [string, ...string[]]);
  }
}

export interface ValidationProblem {
  metric: string;
  message: string;
}

/** Validate one rating against its descriptor; null means valid. */
export function validateRating(
  metric: MetricDescriptor,
  value: number | string | null,
  confidence: number | null,
): ValidationProblem | null {
  if (value === null || value === undefined) {
    return { metric: metric.name, message: 'a value is required' };
  }
  const parsed = schemaFor(metric).safeParse(value);
  if (!parsed.success) {
    return {
      metric: metric.name,
      message: `value ${JSON.stringify(value)} is outside the ${metric.kind} scale`,
    };
  }
  if (metric.kind === 'binary_confidence') {
    if (!confidenceValue.safeParse(confidence).success) {
      return { metric: metric.name, message: 'confidence must be 1, 2, or 3' };
    }
  } else if (confidence !== null && confidence !== undefined) {
    return { metric: metric.name, message: 'confidence applies only to procedure logic' };
  }
  return null;
}

/**
 * Validate a full submission draft: every listed metric must carry an
 * in-scale value (no partial submit of the required set).
 */
export function validateSubmission(
  metrics: MetricDescriptor[],
  draft: Map<string, { value: number | string | null; confidence: number | null }>,
): ValidationProblem[] {
  const problems: ValidationProblem[] = [];
  for (const metric of metrics) {
    const entry = draft.get(metric.name);
    const problem = validateRating(
      metric,
      entry ? entry.value : null,
      entry ? entry.confidence : null,
    );
    if (problem !== null) {
      problems.push(problem);
    }
  }
  return problems;
}

/** Serialize a validated draft into the POST body the service expects. */
export function toSubmission(
  metrics: MetricDescriptor[],
  draft: Map<string, { value: number | string | null; confidence: number | null }>,
): { ratings: Rating[] } {
  const problems = validateSubmission(metrics, draft);
  if (problems.length > 0) {
    throw new Error(`invalid draft: ${problems.map((p) => p.metric).join(', ')}`);
  }
  const ratings: Rating[] = [];
  for (const metric of metrics) {
    const entry = draft.get(metric.name)!;
    const rating: Rating = { metric: metric.name, value: entry.value! };
    if (metric.kind === 'binary_confidence') {
      rating.confidence = entry.confidence;
    }
    ratings.push(rating);
  }
  return { ratings };
}
