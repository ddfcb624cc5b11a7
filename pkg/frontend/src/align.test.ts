import { describe, expect, it } from 'vitest';

import type { TraceStep } from './api.js';
import { alignTrace, isDeviation } from './align.js';

const step = (overrides: Partial<TraceStep>): TraceStep => ({
  text: 'step',
  source_idx: 0,
  mod: 'u',
  error_id: null,
  correction_id: null,
  ...overrides,
});

describe('alignTrace', () => {
  const reference = ['Get the bowl', 'Wash the bowl', 'Chop the onion', 'Mix everything'];

  it('pairs unchanged steps with their reference rows in order', () => {
    const trace = reference.map((text, i) => step({ text, source_idx: i }));
    const rows = alignTrace(reference, trace, []);
    expect(rows).toHaveLength(4);
    rows.forEach((row, i) => {
      expect(row.kind).toBe('match');
      expect(row.referenceIdx).toBe(i);
      expect(row.reference).toBe(reference[i]);
      expect(row.trace?.text).toBe(reference[i]);
    });
  });

  it('pairs insertions with an empty reference cell', () => {
    const trace = [
      step({ text: reference[0], source_idx: 0 }),
      step({ text: 'Drop the spoon', source_idx: null, mod: 'i', error_id: 'E01' }),
      step({ text: reference[1], source_idx: 1 }),
    ];
    const rows = alignTrace(reference.slice(0, 2), trace, []);
    expect(rows.map((r) => r.kind)).toEqual(['match', 'insertion', 'match']);
    expect(rows[1].reference).toBeNull();
    expect(rows[1].referenceIdx).toBeNull();
    expect(rows[1].trace?.mod).toBe('i');
  });

  it('shows deleted reference steps as reference-only rows in position', () => {
    const trace = [
      step({ text: reference[0], source_idx: 0 }),
      step({ text: reference[2], source_idx: 2 }),
      step({ text: reference[3], source_idx: 3 }),
    ];
    const rows = alignTrace(reference, trace, [1]);
    expect(rows.map((r) => r.kind)).toEqual(['match', 'deletion', 'match', 'match']);
    expect(rows[1].reference).toBe('Wash the bowl');
    expect(rows[1].trace).toBeNull();
  });

  it('keeps transposed steps aligned with their original source rows', () => {
    const trace = [
      step({ text: reference[0], source_idx: 0 }),
      step({ text: reference[2], source_idx: 2, mod: 'ms', error_id: 'E01' }),
      step({ text: reference[1], source_idx: 1, mod: 'mt', error_id: 'E01' }),
      step({ text: reference[3], source_idx: 3 }),
    ];
    const rows = alignTrace(reference, trace, []);
    expect(rows[1].reference).toBe('Chop the onion');
    expect(rows[2].reference).toBe('Wash the bowl');
  });

  it('emits trailing deletions after the last trace step', () => {
    const trace = [step({ text: reference[0], source_idx: 0 })];
    const rows = alignTrace(reference, trace, [1, 2, 3]);
    expect(rows.map((r) => r.kind)).toEqual(['match', 'deletion', 'deletion', 'deletion']);
    expect(rows.at(-1)?.reference).toBe('Mix everything');
  });
});

describe('isDeviation', () => {
  it('flags every non-unchanged mod', () => {
    for (const mod of ['we', 's', 'ms', 'mt', 'c', 'i', 'a']) {
      expect(isDeviation(step({ mod }))).toBe(true);
    }
    expect(isDeviation(step({ mod: 'u' }))).toBe(false);
  });
});
