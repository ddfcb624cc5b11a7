/**
 * Side-by-side alignment of a reference procedure with its edited trace.
 *
 * Each row pairs a trace step with the reference step it came from
 * (`source_idx`); insertions and corrections have no source and pair with an
 * empty reference cell. Reference steps deleted from the trace appear as
 * reference-only rows at their original position.
 */

import type { TraceStep } from './api.js';

export interface AlignedRow {
  reference: string | null;
  referenceIdx: number | null;
  trace: TraceStep | null;
  kind: 'match' | 'insertion' | 'deletion';
}

export function alignTrace(
  referenceSteps: string[],
  traceSteps: TraceStep[],
  deletions: number[],
): AlignedRow[] {
  const rows: AlignedRow[] = [];
  const deleted = new Set(deletions);
  const emitted = new Set<number>();

  const emitDeletionsBefore = (sourceIdx: number) => {
    for (let i = 0; i < sourceIdx; i += 1) {
      if (deleted.has(i) && !emitted.has(i)) {
        emitted.add(i);
        rows.push({
          reference: referenceSteps[i],
          referenceIdx: i,
          trace: null,
          kind: 'deletion',
        });
      }
    }
  };

  for (const step of traceSteps) {
    if (step.source_idx === null) {
      rows.push({ reference: null, referenceIdx: null, trace: step, kind: 'insertion' });
      continue;
    }
    emitDeletionsBefore(step.source_idx);
    rows.push({
      reference: referenceSteps[step.source_idx] ?? null,
      referenceIdx: step.source_idx,
      trace: step,
      kind: 'match',
    });
  }
  emitDeletionsBefore(referenceSteps.length);
  return rows;
}

/** True when the trace step should be highlighted as a deviation. */
export function isDeviation(step: TraceStep): boolean {
  return step.mod !== 'u';
}

export const MOD_LABELS: Record<string, string> = {
  u: 'unchanged',
  we: 'wrong execution',
  s: 'substitution',
  ms: 'transposed (target)',
  mt: 'transposed (partner)',
  c: 'correction',
  i: 'insertion',
  a: 'cascade',
};
