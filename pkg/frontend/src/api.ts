/** Typed fetch client for the annotation service. */

import type { MetricDescriptor, Rating } from './scales.js';

export interface SampleSummary {
  id: string;
  rated: number;
  total: number;
}

export interface SampleListing {
  samples: SampleSummary[];
  rater: string;
}

export interface TraceStep {
  text: string;
  source_idx: number | null;
  mod: string;
  error_id: string | null;
  correction_id: string | null;
}

export interface SampleDetail {
  id: string;
  reference_steps: string[];
  trace_steps: TraceStep[];
  deletions: number[];
  metrics: MetricDescriptor[];
  ratings: Record<string, { value: number | string; confidence: number | null }>;
  media: unknown;
}

export interface SubmitResult {
  ok: boolean;
  accepted: number;
  problems: { metric: string; message: string }[];
}

export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
  ) {
    super(message);
  }
}

export class AnnotationApi {
  constructor(
    private baseUrl: string,
    private raterToken: string,
  ) {}

  private headers(): Record<string, string> {
    return {
      'X-Rater-Token': this.raterToken,
      'Content-Type': 'application/json',
    };
  }

  private async get<T>(path: string): Promise<T> {
    const res = await fetch(this.baseUrl + path, { headers: this.headers() });
    if (!res.ok) {
      throw new ApiError(res.status, `GET ${path} failed with ${res.status}`);
    }
    return (await res.json()) as T;
  }

  listSamples(): Promise<SampleListing> {
    return this.get('/api/samples');
  }

  getSample(sampleId: string): Promise<SampleDetail> {
    return this.get(`/api/samples/${encodeURIComponent(sampleId)}`);
  }

  async submitRatings(sampleId: string, ratings: Rating[]): Promise<SubmitResult> {
    const res = await fetch(
      `${this.baseUrl}/api/samples/${encodeURIComponent(sampleId)}/ratings`,
      {
        method: 'POST',
        headers: this.headers(),
        body: JSON.stringify({ ratings }),
      },
    );
    if (res.status === 422) {
      const body = (await res.json()) as { detail: { metric: string; message: string }[] };
      return { ok: false, accepted: 0, problems: body.detail };
    }
    if (!res.ok) {
      throw new ApiError(res.status, `submit failed with ${res.status}`);
    }
    const body = (await res.json()) as { accepted: number };
    return { ok: true, accepted: body.accepted, problems: [] };
  }
}
