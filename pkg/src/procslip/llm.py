"""Writer/judge orchestration over a pluggable text-generation client.

Two client implementations: a deterministic offline mock that delegates to
the template writer, and a remote chat-completion HTTP client. Prompts carry
both human-readable constraint text and the structured payload; the mock
reads the payload, the remote client serializes everything into messages.
"""

from __future__ import annotations

import json
import os
import re
import time
from dataclasses import dataclass, field

from . import semrep as semrep_mod
from .tracemodel import (
    EditedTrace,
    realize_with_templates,
    template_step_text,
    validate_trace,
)

TRACE_CONTRACT = (
    "Return ONLY a single JSON object with keys final_steps (list of step "
    "strings), meta (one [source_idx, mod, error_id, correction_id] row per "
    "final step), del (rows [source_idx, error_id]), and rewrite_map. "
    "UNCHANGED MEANS VERBATIM: mod 'u' steps must copy the original text. "
    "Transpositions must appear as exactly one 'ms' and one 'mt' row sharing "
    "an error id, both verbatim. NO FAKE ERRORS: 'we'/'s' steps must differ "
    "meaningfully from the original. If a GET-like step is substituted so "
    "that Y is acquired instead of X, assume X is unavailable later and "
    "cascade-rewrite downstream references to X as mod 'a' with the same "
    "error id."
)


class WriterError(RuntimeError):
    """Client output could not be parsed into the trace contract."""

    def __init__(self, message, raw_output=None):
        super().__init__(message)
        self.raw_output = raw_output


class GenerationClient:
    """Abstract text-generation interface."""

    def submit(self, parts, schema, params=None):
        """parts: dict of prompt sections (may include structured objects);
        schema: contract identifier; returns raw structured text."""
        raise NotImplementedError


class MockGenerationClient(GenerationClient):
    """Offline deterministic client: template writer + rule-based repair."""

    def __init__(self):
        self.calls = 0

    def submit(self, parts, schema, params=None):
        self.calls += 1
        if schema in ("trace", "trace_repair"):
            trace = realize_with_templates(
                parts["procedure"], parts["plan"], parts.get("semreps")
            )
            return json.dumps(trace.to_contract())
        if schema == "semrep":
            entries = {}
            for step_id, text in parts["steps"].items():
                entries[step_id] = {
                    "step_description": text,
                    "semantic_representation": _fallback_representation(text),
                }
            return json.dumps(entries)
        if schema == "rubric_proxy":
            return json.dumps(_MOCK_RUBRIC_PREDICTIONS)
        raise ValueError(f"unknown schema {schema!r}")


_MOCK_RUBRIC_PREDICTIONS = {
    "error_validity": 1,
    "human_plausibility": 3,
    "confusability": 3,
    "procedure_logic": {"value": 0, "confidence": 2},
    "sequence_consistency": 3,
    "state_change_coherence": 0,
    "taxonomy_fit": "WE",
}


def _fallback_representation(text):
    """ACT(Agent: you, Object: <head noun>) for unseen step texts."""
    words = re.findall(r"[a-zA-Z_]+", text.lower())
    content = [w for w in words[1:] if w not in ("the", "a", "an", "your", "of")]
    head = content[0] if content else (words[0] if words else "thing")
    return f"ACT(Agent: you, Object: {head})"


class RemoteGenerationClient(GenerationClient):
    """Chat-completion HTTP client; credential comes from the environment."""

    def __init__(self, base_url, model, credential_env="GENERATION_API_KEY",
                 timeout=60.0, max_retries=3, temperature=0.1, audit_dir=None):
        self.base_url = base_url.rstrip("/")
        self.model = model
        self.credential_env = credential_env
        self.timeout = timeout
        self.max_retries = max_retries
        self.temperature = temperature
        self.audit_dir = audit_dir

    def submit(self, parts, schema, params=None):
        import requests

        key = os.environ.get(self.credential_env)
        if not key:
            raise RuntimeError(f"missing credential in ${self.credential_env}")
        prompt = _render_prompt(parts)
        body = {
            "model": self.model,
            "temperature": (params or {}).get("temperature", self.temperature),
            "messages": [{"role": "user", "content": prompt}],
        }
        delay = 1.0
        last_exc = None
        for _ in range(self.max_retries):
            try:
                resp = requests.post(
                    f"{self.base_url}/chat/completions",
                    json=body,
                    headers={"Authorization": f"Bearer {key}"},
                    timeout=self.timeout,
                )
                resp.raise_for_status()
                text = resp.json()["choices"][0]["message"]["content"]
                self._audit(schema, prompt, text)
                return text
            except Exception as exc:  # transient failures retry with backoff
                last_exc = exc
                time.sleep(delay)
                delay *= 2
        raise RuntimeError(f"generation request failed after retries: {last_exc}")

    def _audit(self, schema, prompt, response):
        if not self.audit_dir:
            return
        os.makedirs(self.audit_dir, exist_ok=True)
        record = {"ts": time.time(), "schema": schema, "model": self.model,
                  "prompt": prompt, "response": response}
        with open(os.path.join(self.audit_dir, "requests.jsonl"), "a") as fh:
            fh.write(json.dumps(record) + "\n")


def _render_prompt(parts):
    chunks = []
    for key, value in parts.items():
        if hasattr(value, "to_dict"):
            value = json.dumps(value.to_dict(), indent=2)
        elif isinstance(value, dict):
            value = json.dumps(
                {k: (v.render() if hasattr(v, "render") else v) for k, v in value.items()},
                indent=2, default=str,
            )
        chunks.append(f"### {key}\n{value}")
    return "\n\n".join(chunks)


def write_trace(procedure, plan, semreps, client, max_parse_retries=2):
    """Ask the client for a contract-conformant trace realizing the plan."""
    parts = {
        "task": "Rewrite the procedure so it realizes the planned mistakes and corrections.",
        "contract": TRACE_CONTRACT,
        "procedure": procedure,
        "plan": plan,
        "semreps": semreps or {},
    }
    last_raw = None
    for _ in range(max_parse_retries + 1):
        raw = client.submit(parts, schema="trace")
        last_raw = raw
        try:
            return EditedTrace.from_contract(json.loads(raw))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError):
            continue
    raise WriterError("client output did not match the trace contract", raw_output=last_raw)


@dataclass
class JudgeOutcome:
    trace: EditedTrace
    rounds_used: int
    reports: list
    status: str                       # accepted | repaired | failed
    frame_references: list = field(default_factory=list)


def judge_and_repair(trace, plan, procedure, client, max_rounds=3,
                     semreps=None, frame_refs=None):
    """Bounded validate/repair loop; frames are attached as opaque references."""
    if max_rounds < 1:
        raise ValueError("max_rounds must be >= 1")
    report = validate_trace(trace, plan, procedure)
    reports = [report]
    if report.ok:
        return JudgeOutcome(trace, 0, reports, "accepted")

    current = trace
    attached_frames = []
    for round_no in range(1, max_rounds + 1):
        parts = {
            "task": "Minimally repair the trace; preserve every planned error and correction id.",
            "contract": TRACE_CONTRACT,
            "violations": {str(i): f"{v.code} at {v.position}: {v.message}"
                           for i, v in enumerate(report.violations)},
            "procedure": procedure,
            "plan": plan,
            "trace": {"contract": json.dumps(current.to_contract())},
            "semreps": semreps or {},
        }
        if round_no == max_rounds and frame_refs:
            # Last text-only attempt failed; retry once with cached frame paths.
            attached_frames = list(frame_refs)
            parts["frames"] = {str(i): p for i, p in enumerate(attached_frames)}
        try:
            raw = client.submit(parts, schema="trace_repair")
            current = EditedTrace.from_contract(json.loads(raw))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError):
            pass  # keep the previous trace; the round still counts
        report = validate_trace(current, plan, procedure)
        reports.append(report)
        if report.ok:
            return JudgeOutcome(current, round_no, reports, "repaired", attached_frames)
    return JudgeOutcome(current, max_rounds, reports, "failed", attached_frames)


def generate_semrep(step_texts, client, cache=None):
    """Resolve step texts to cached representations, generating missing ones.

    step_texts: mapping id -> step text. Returns (entries, rejected) where
    entries is id -> {step_description, semantic_representation} and rejected
    lists ids whose generated representation failed to parse.
    """
    cache = cache if cache is not None else semrep_mod.SemRepCache()
    entries = {}
    missing = {}
    for step_id, text in step_texts.items():
        hit = cache.lookup(text)
        if hit is not None:
            entries[step_id] = cache.entries[hit]
        else:
            missing[step_id] = text
    rejected = []
    if missing:
        raw = client.submit({"task": "Generate semantic representations.",
                             "steps": missing}, schema="semrep")
        generated = json.loads(raw)
        for step_id, text in missing.items():
            entry = generated.get(step_id)
            if entry is None or entry.get("step_description") != text:
                rejected.append(step_id)
                continue
            try:
                semrep_mod.parse(entry["semantic_representation"])
            except semrep_mod.SemRepParseError:
                rejected.append(step_id)
                continue
            entries[step_id] = entry
            cache.add(step_id, text, entry["semantic_representation"])
    return entries, rejected
