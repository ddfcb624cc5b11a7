/**
 * Session state for one open sample: the rating draft, seeded from the
 * server's latest-wins view and updated as the rater edits controls.
 */

import type { MetricDescriptor, ValidationProblem } from './scales.js';
import { validateSubmission } from './scales.js';

export interface DraftEntry {
  value: number | string | null;
  confidence: number | null;
}

export class RatingDraft {
  private entries = new Map<string, DraftEntry>();

  constructor(private metrics: MetricDescriptor[]) {
    for (const metric of metrics) {
      this.entries.set(metric.name, { value: null, confidence: null });
    }
  }

  /** Seed from previously-submitted ratings (the server's latest view). */
  restore(
    ratings: Record<string, { value: number | string; confidence: number | null }>,
  ): void {
    for (const [name, rating] of Object.entries(ratings)) {
      if (this.entries.has(name)) {
        this.entries.set(name, {
          value: rating.value,
          confidence: rating.confidence ?? null,
        });
      }
    }
  }

  setValue(metric: string, value: number | string | null): void {
    const entry = this.entries.get(metric);
    if (entry === undefined) {
      throw new Error(`unknown metric: ${metric}`);
    }
    entry.value = value;
  }

  setConfidence(metric: string, confidence: number | null): void {
    const entry = this.entries.get(metric);
    if (entry === undefined) {
      throw new Error(`unknown metric: ${metric}`);
    }
    entry.confidence = confidence;
  }

  get(metric: string): DraftEntry {
    const entry = this.entries.get(metric);
    if (entry === undefined) {
      throw new Error(`unknown metric: ${metric}`);
    }
    return { ...entry };
  }

  asMap(): Map<string, DraftEntry> {
    return new Map(
      [...this.entries.entries()].map(([name, entry]) => [name, { ...entry }]),
    );
  }

  /** Problems blocking submission; empty means every metric is in scale. */
  problems(): ValidationProblem[] {
    return validateSubmission(this.metrics, this.asMap());
  }

  isComplete(): boolean {
    return this.problems().length === 0;
  }
}
