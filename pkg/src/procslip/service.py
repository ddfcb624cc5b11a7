"""Annotation service backing the rater UI.

Raters authenticate with a per-rater token; submissions are appended to an
event log (never mutated) and the latest event per (sample, rater, metric)
wins when views or exports are built.
"""

from __future__ import annotations

import glob
import json
import os
import threading
import time

from fastapi import FastAPI, Header, HTTPException
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .rubric import (
    CONFIDENCE_SCALE,
    METRICS,
    RubricAnnotation,
    ScaleError,
    check_value,
    save_annotations,
)

METRIC_GUIDANCE = {
    "error_validity": "Is the highlighted deviation a consequential procedural mistake (not a benign variation)?",
    "human_plausibility": "Could a real person naturally make this mistake in context? (1 = no, 5 = fully natural)",
    "confusability": "How easy is the mistake to overlook during execution? (1 = obvious, 5 = very easy to miss)",
    "procedure_logic": "Does the mistake break the logic of the whole procedure? Add your confidence (1-3).",
    "sequence_consistency": "Does the edited step order remain executable as a coherent procedure? (1-5)",
    "state_change_coherence": "Does the implied world state stay coherent (no impossible transitions)?",
    "video_plausibility": "Does the visual depiction look natural? (1-5; skip when no video)",
    "text_video_grounding": "Does the textual trace match the video at the episode level? (1-5; skip when no video)",
    "taxonomy_fit": "Which error category fits the mistake: D, I, S, T, WE, or C?",
}


class RatingIn(BaseModel):
    metric: str
    value: int | str
    confidence: int | None = None


class SubmissionIn(BaseModel):
    ratings: list[RatingIn]


def metric_descriptors(include_video=True):
    out = []
    for name, (kind, scale) in METRICS.items():
        if not include_video and name in ("video_plausibility", "text_video_grounding"):
            continue
        out.append({
            "name": name,
            "kind": kind,
            "scale": list(scale),
            "confidence_scale": list(CONFIDENCE_SCALE) if kind == "binary_confidence" else None,
            "guidance": METRIC_GUIDANCE[name],
        })
    return out


class AnnotationStore:
    """Append-only jsonl event log with a latest-wins view."""

    def __init__(self, log_path):
        self.log_path = log_path
        self._lock = threading.Lock()

    def append(self, events):
        with self._lock:
            with open(self.log_path, "a") as fh:
                for event in events:
                    fh.write(json.dumps(event) + "\n")

    def events(self):
        if not os.path.exists(self.log_path):
            return []
        with open(self.log_path) as fh:
            return [json.loads(line) for line in fh if line.strip()]

    def latest(self):
        view = {}
        for event in self.events():
            view[(event["sample_id"], event["rater_id"], event["metric"])] = event
        return view

    def to_annotations(self):
        return [
            RubricAnnotation(
                sample_id=e["sample_id"], rater_id=e["rater_id"],
                metric=e["metric"], value=e["value"],
                confidence=e.get("confidence"),
            )
            for e in self.latest().values()
        ]


def _load_samples(records_dir):
    samples = {}
    for path in sorted(glob.glob(os.path.join(records_dir, "*.procedure.json"))):
        proc_id = os.path.basename(path)[: -len(".procedure.json")]
        with open(path) as fh:
            procedure = json.load(fh)
        trace_path = os.path.join(records_dir, proc_id + ".trace.json")
        if not os.path.exists(trace_path):
            continue
        with open(trace_path) as fh:
            trace = json.load(fh)
        media_path = os.path.join(records_dir, proc_id + ".media.json")
        media = None
        if os.path.exists(media_path):
            with open(media_path) as fh:
                media = json.load(fh)
        samples[proc_id] = {"procedure": procedure, "trace": trace, "media": media}
    return samples


def create_app(records_dir, roster, log_path, static_dir=None):
    """roster maps token -> rater id."""
    app = FastAPI(title="trace annotation service")
    store = AnnotationStore(log_path)
    samples = _load_samples(records_dir)
    app.state.store = store
    app.state.samples = samples

    def rater_for(token):
        if token not in roster:
            raise HTTPException(status_code=401, detail="unknown rater token")
        return roster[token]

    @app.get("/api/samples")
    def list_samples(x_rater_token: str = Header(...)):
        rater = rater_for(x_rater_token)
        view = store.latest()
        out = []
        for sample_id, sample in samples.items():
            has_video = sample["media"] is not None
            metrics = metric_descriptors(include_video=has_video)
            done = sum(1 for m in metrics if (sample_id, rater, m["name"]) in view)
            out.append({"id": sample_id, "rated": done, "total": len(metrics)})
        return {"samples": out, "rater": rater}

    @app.get("/api/samples/{sample_id}")
    def get_sample(sample_id: str, x_rater_token: str = Header(...)):
        rater = rater_for(x_rater_token)
        sample = samples.get(sample_id)
        if sample is None:
            raise HTTPException(status_code=404, detail="unknown sample")
        view = store.latest()
        ratings = {}
        for (sid, rid, metric), event in view.items():
            if sid == sample_id and rid == rater:
                ratings[metric] = {"value": event["value"],
                                   "confidence": event.get("confidence")}
        trace = sample["trace"]
        trace_steps = [
            {"text": text, "source_idx": row[0], "mod": row[1],
             "error_id": row[2], "correction_id": row[3]}
            for text, row in zip(trace["final_steps"], trace["meta"])
        ]
        has_video = sample["media"] is not None
        return {
            "id": sample_id,
            "reference_steps": [s["text"] for s in sample["procedure"]["steps"]],
            "trace_steps": trace_steps,
            "deletions": trace.get("del", []),
            "metrics": metric_descriptors(include_video=has_video),
            "ratings": ratings,
            "media": sample["media"],
        }

    @app.post("/api/samples/{sample_id}/ratings")
    def submit(sample_id: str, body: SubmissionIn, x_rater_token: str = Header(...)):
        rater = rater_for(x_rater_token)
        if sample_id not in samples:
            raise HTTPException(status_code=404, detail="unknown sample")
        problems = []
        events = []
        now = time.time()
        for rating in body.ratings:
            try:
                check_value(rating.metric, rating.value, rating.confidence)
            except ScaleError as exc:
                problems.append({"metric": rating.metric, "message": str(exc)})
                continue
            events.append({
                "ts": now, "sample_id": sample_id, "rater_id": rater,
                "metric": rating.metric, "value": rating.value,
                "confidence": rating.confidence,
            })
        if problems:
            raise HTTPException(status_code=422, detail=problems)
        store.append(events)
        return {"accepted": len(events)}

    @app.get("/api/export")
    def export():
        return {"annotations": [
            {"sample_id": a.sample_id, "rater_id": a.rater_id, "metric": a.metric,
             "value": a.value, "confidence": a.confidence}
            for a in store.to_annotations()
        ]}

    if static_dir and os.path.isdir(static_dir):
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app


def export_annotations_csv(log_path, out_path):
    store = AnnotationStore(log_path)
    save_annotations(store.to_annotations(), out_path)
