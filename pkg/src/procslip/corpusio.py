"""Procedure ingestion, taxonomy mapping, and benchmark export."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field


class LoadError(ValueError):
    pass


@dataclass
class Step:
    index: int
    step_id: str
    text: str
    duration: float
    start: float = 0.0
    end: float = 0.0
    essential: bool = True
    semrep_id: str | None = None
    parent_id: str | None = None  # taxonomy block in the keystep hierarchy

    def to_dict(self):
        return {
            "index": self.index,
            "id": self.step_id,
            "text": self.text,
            "duration": self.duration,
            "start": self.start,
            "end": self.end,
            "essential": self.essential,
            "semrep_id": self.semrep_id,
            "parent_id": self.parent_id,
        }


@dataclass
class Procedure:
    proc_id: str
    task: str
    scenario: str
    steps: list

    def __len__(self):
        return len(self.steps)

    def to_dict(self):
        return {
            "id": self.proc_id,
            "task": self.task,
            "scenario": self.scenario,
            "steps": [s.to_dict() for s in self.steps],
        }

    @classmethod
    def from_dict(cls, data):
        steps = []
        for i, raw in enumerate(data["steps"]):
            step = Step(
                index=int(raw.get("index", i)),
                step_id=str(raw.get("id", i)),
                text=raw["text"],
                duration=float(raw.get("duration", 0.0)),
                start=float(raw.get("start", 0.0)),
                end=float(raw.get("end", 0.0)),
                essential=bool(raw.get("essential", True)),
                semrep_id=raw.get("semrep_id"),
                parent_id=raw.get("parent_id"),
            )
            if step.duration < 0:
                raise LoadError(f"step {step.step_id}: negative duration")
            if step.end < step.start:
                raise LoadError(f"step {step.step_id}: end before start")
            steps.append(step)
        if not steps:
            raise LoadError("procedure has no steps")
        for i, step in enumerate(steps):
            if step.index != i:
                raise LoadError(f"step indices not contiguous at position {i}")
        return cls(
            proc_id=str(data["id"]),
            task=data.get("task", ""),
            scenario=data.get("scenario", ""),
            steps=steps,
        )


def load_procedures(path, fmt="json", semrep_cache=None):
    """Load a procedure file: a JSON list of procedure records.

    When a cache is given, steps without a semrep_id are resolved through its
    normalized reverse map; ids that stay unresolved are reported alongside
    the procedures.
    """
    if fmt != "json":
        raise LoadError(f"unknown format {fmt!r}")
    if not os.path.exists(path):
        raise LoadError(f"no such file: {path}")
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise LoadError(f"{path}: invalid JSON ({exc})") from exc
    if isinstance(data, dict):
        data = [data]
    procedures = []
    unresolved = []
    for record in data:
        try:
            proc = Procedure.from_dict(record)
        except (KeyError, LoadError, TypeError, ValueError) as exc:
            raise LoadError(f"{path}: record {record.get('id', '?')}: {exc}") from exc
        if semrep_cache is not None:
            for step in proc.steps:
                if step.semrep_id is None:
                    step.semrep_id = semrep_cache.lookup(step.text)
                if step.semrep_id is None or step.semrep_id not in semrep_cache.reps:
                    unresolved.append((proc.proc_id, step.step_id))
        procedures.append(proc)
    return procedures, unresolved


def save_procedures(procedures, path):
    with open(path, "w") as fh:
        json.dump([p.to_dict() for p in procedures], fh, indent=2)


UNIFIED_TYPES = ("D", "I", "S", "T", "WE", "C")

# External mistake taxonomies mapped onto the unified five types + Correction.
# True marks approximate mappings where the source semantics do not align 1:1.
EGOPER_MAPPING = {
    "omission": ("D", False),
    "addition": ("I", False),
    "modification": ("WE", True),
    "slip": ("WE", True),
    "correction": ("C", False),
}


class UnmappedLabelError(ValueError):
    pass


def map_taxonomy(annotations, mapping):
    """Map external labels onto unified types; every label must be covered."""
    out = []
    for label in annotations:
        key = label.strip().lower()
        if key not in mapping:
            raise UnmappedLabelError(f"no unified mapping for label {label!r}")
        unified, approximate = mapping[key]
        out.append({"label": label, "type": unified, "approximate": approximate})
    return out


@dataclass
class GenerationRecord:
    procedure: Procedure
    plan: dict
    trace: dict
    edit_plan: list
    provenance: dict = field(default_factory=dict)


def export_benchmark(records, out_dir):
    """Write per-record plan/trace/edit-plan files plus a summary manifest."""
    os.makedirs(out_dir, exist_ok=True)
    type_counts = {t: 0 for t in UNIFIED_TYPES if t != "C"}
    total_steps = 0
    mistake_steps = 0
    corrections = 0
    entries = []
    errors = []
    for record in records:
        proc_id = record.procedure.proc_id
        try:
            base = os.path.join(out_dir, proc_id)
            with open(base + ".plan.json", "w") as fh:
                json.dump(record.plan, fh, indent=2)
            with open(base + ".trace.json", "w") as fh:
                json.dump(record.trace, fh, indent=2)
            with open(base + ".editplan.json", "w") as fh:
                json.dump(record.edit_plan, fh, indent=2)
            with open(base + ".procedure.json", "w") as fh:
                json.dump(record.procedure.to_dict(), fh, indent=2)
        except OSError as exc:
            errors.append({"id": proc_id, "error": str(exc)})
            continue
        n_mistakes = len(record.plan.get("errors", []))
        total_steps += len(record.procedure)
        mistake_steps += n_mistakes
        corrections += len(record.plan.get("corrections", []))
        for err in record.plan.get("errors", []):
            type_counts[err["type"]] = type_counts.get(err["type"], 0) + 1
        entries.append({
            "id": proc_id,
            "task": record.procedure.task,
            "steps": len(record.procedure),
            "mistakes": n_mistakes,
            "provenance": record.provenance,
        })
    manifest = {
        "records": entries,
        "failed": errors,
        "totals": {
            "videos": len(entries),
            "total_steps": total_steps,
            "mistake_steps": mistake_steps,
            "mistake_rate": (mistake_steps / total_steps) if total_steps else 0.0,
            "mistakes_per_video": (mistake_steps / len(entries)) if entries else 0.0,
            "corrections": corrections,
            "corrections_per_mistake": (corrections / mistake_steps) if mistake_steps else 0.0,
            "error_type_counts": type_counts,
        },
    }
    with open(os.path.join(out_dir, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2)
    return manifest
