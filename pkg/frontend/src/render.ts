/** DOM rendering for the annotation view. No framework, just elements. */

import type { SampleDetail, SampleSummary, TraceStep } from './api.js';
import { MOD_LABELS, alignTrace, isDeviation } from './align.js';
import type { MetricDescriptor, ValidationProblem } from './scales.js';
import type { RatingDraft } from './state.js';

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

export function renderSampleList(
  container: HTMLElement,
  samples: SampleSummary[],
  onOpen: (id: string) => void,
): void {
  container.textContent = '';
  const list = el('ul', 'sample-list');
  for (const sample of samples) {
    const item = el('li', 'sample-item');
    const button = el('button', 'sample-open', sample.id);
    button.addEventListener('click', () => onOpen(sample.id));
    item.appendChild(button);
    item.appendChild(
      el('span', 'sample-progress', ` ${sample.rated}/${sample.total} rated`),
    );
    list.appendChild(item);
  }
  container.appendChild(list);
}

function traceCell(step: TraceStep): HTMLElement {
  const cell = el('td', isDeviation(step) ? 'trace-step deviation' : 'trace-step');
  cell.appendChild(el('span', 'step-text', step.text));
  const badge = el('span', `mod-badge mod-${step.mod}`, MOD_LABELS[step.mod] ?? step.mod);
  cell.appendChild(badge);
  if (step.error_id) {
    cell.appendChild(el('span', 'error-id', step.error_id));
  }
  return cell;
}

export function renderAlignment(container: HTMLElement, sample: SampleDetail): void {
  container.textContent = '';
  const table = el('table', 'alignment');
  const head = el('tr');
  head.appendChild(el('th', undefined, 'Reference procedure'));
  head.appendChild(el('th', undefined, 'Edited trace'));
  table.appendChild(head);

  const rows = alignTrace(sample.reference_steps, sample.trace_steps, sample.deletions);
  for (const row of rows) {
    const tr = el('tr', `row-${row.kind}`);
    const refCell = el('td', 'reference-step');
    if (row.reference !== null) {
      refCell.textContent = `${(row.referenceIdx ?? 0) + 1}. ${row.reference}`;
      if (row.kind === 'deletion') refCell.classList.add('deviation');
    }
    tr.appendChild(refCell);
    tr.appendChild(row.trace ? traceCell(row.trace) : el('td', 'trace-step missing'));
    table.appendChild(tr);
  }
  container.appendChild(table);
}

function scaleControl(
  metric: MetricDescriptor,
  draft: RatingDraft,
  onChange: () => void,
): HTMLElement {
  const select = el('select', `metric-value metric-${metric.name}`);
  select.appendChild(el('option', undefined, '—'));
  const options =
    metric.kind === 'likert'
      ? Array.from(
          { length: (metric.scale[1] as number) - (metric.scale[0] as number) + 1 },
          (_, i) => (metric.scale[0] as number) + i,
        )
      : metric.kind === 'category'
        ? metric.scale
        : [0, 1];
  for (const option of options) {
    select.appendChild(el('option', undefined, String(option)));
  }
  const current = draft.get(metric.name).value;
  if (current !== null) select.value = String(current);
  select.addEventListener('change', () => {
    if (select.selectedIndex === 0) {
      draft.setValue(metric.name, null);
    } else if (metric.kind === 'category') {
      draft.setValue(metric.name, select.value);
    } else {
      draft.setValue(metric.name, Number(select.value));
    }
    onChange();
  });
  return select;
}

function confidenceControl(
  metric: MetricDescriptor,
  draft: RatingDraft,
  onChange: () => void,
): HTMLElement {
  const select = el('select', 'metric-confidence');
  select.appendChild(el('option', undefined, '—'));
  for (const option of metric.confidence_scale ?? []) {
    select.appendChild(el('option', undefined, String(option)));
  }
  const current = draft.get(metric.name).confidence;
  if (current !== null) select.value = String(current);
  select.addEventListener('change', () => {
    draft.setConfidence(
      metric.name,
      select.selectedIndex === 0 ? null : Number(select.value),
    );
    onChange();
  });
  return select;
}

export function renderMetricForm(
  container: HTMLElement,
  metrics: MetricDescriptor[],
  draft: RatingDraft,
  onChange: () => void,
  onSubmit: () => void,
): void {
  container.textContent = '';
  for (const metric of metrics) {
    const row = el('div', 'metric-row');
    row.appendChild(el('label', 'metric-name', metric.name.replace(/_/g, ' ')));
    row.appendChild(el('p', 'metric-guidance', metric.guidance));
    row.appendChild(scaleControl(metric, draft, onChange));
    if (metric.kind === 'binary_confidence') {
      row.appendChild(el('span', 'confidence-label', 'confidence'));
      row.appendChild(confidenceControl(metric, draft, onChange));
    }
    container.appendChild(row);
  }
  const submit = el('button', 'submit-ratings', 'Submit ratings');
  submit.addEventListener('click', onSubmit);
  container.appendChild(submit);
}

export function renderProblems(
  container: HTMLElement,
  problems: ValidationProblem[],
): void {
  container.textContent = '';
  for (const problem of problems) {
    container.appendChild(el('p', 'problem', `${problem.metric}: ${problem.message}`));
  }
}
