/** Entry point: wires the api client, draft state, and DOM rendering. */

import { AnnotationApi } from './api.js';
import {
  renderAlignment,
  renderMetricForm,
  renderProblems,
  renderSampleList,
} from './render.js';
import { toSubmission } from './scales.js';
import { RatingDraft } from './state.js';

function require(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`missing #${id}`);
  return node;
}

async function openSample(api: AnnotationApi, sampleId: string): Promise<void> {
  const sample = await api.getSample(sampleId);
  const draft = new RatingDraft(sample.metrics);
  draft.restore(sample.ratings);

  require('sample-title').textContent = sample.id;
  renderAlignment(require('alignment'), sample);

  const problemsBox = require('problems');
  const refresh = () => renderProblems(problemsBox, draft.problems());
  const submit = async () => {
    const problems = draft.problems();
    if (problems.length > 0) {
      renderProblems(problemsBox, problems);
      return;
    }
    const body = toSubmission(sample.metrics, draft.asMap());
    const result = await api.submitRatings(sample.id, body.ratings);
    if (result.ok) {
      require('status').textContent = `saved ${result.accepted} ratings`;
      await loadListing(api);
    } else {
      renderProblems(problemsBox, result.problems);
    }
  };
  renderMetricForm(require('metrics'), sample.metrics, draft, refresh, submit);
  refresh();
}

async function loadListing(api: AnnotationApi): Promise<void> {
  const listing = await api.listSamples();
  require('rater').textContent = `rater: ${listing.rater}`;
  renderSampleList(require('samples'), listing.samples, (id) => {
    void openSample(api, id);
  });
}

export function start(): void {
  const connect = require('connect');
  connect.addEventListener('click', () => {
    const token = (document.getElementById('token') as HTMLInputElement).value.trim();
    if (token === '') {
      require('status').textContent = 'enter your rater token';
      return;
    }
    const api = new AnnotationApi('', token);
    void loadListing(api).catch((err: Error) => {
      require('status').textContent = err.message;
    });
  });
}

if (typeof document !== 'undefined' && document.getElementById('connect') !== null) {
  start();
}
