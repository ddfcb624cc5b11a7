"""Nine-metric assessment rubric: annotation model, aggregation,
confidence-weighted procedure-logic scoring, and Krippendorff's alpha."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

# metric name -> (kind, allowed values / scale)
METRICS = {
    "error_validity": ("binary", (0, 1)),
    "human_plausibility": ("likert", (1, 5)),
    "confusability": ("likert", (1, 5)),
    "procedure_logic": ("binary_confidence", (0, 1)),
    "sequence_consistency": ("likert", (1, 5)),
    "state_change_coherence": ("binary", (0, 1)),
    "video_plausibility": ("likert", (1, 5)),
    "text_video_grounding": ("likert", (1, 5)),
    "taxonomy_fit": ("category", ("D", "I", "S", "T", "WE", "C")),
}

CONFIDENCE_SCALE = (1, 2, 3)

TEXT_ONLY_METRICS = tuple(m for m in METRICS
                          if m not in ("video_plausibility", "text_video_grounding"))

# alpha measurement level per metric
ALPHA_LEVELS = {
    name: ("ordinal" if kind == "likert" else "nominal")
    for name, (kind, _) in METRICS.items()
}


class ScaleError(ValueError):
    pass


def check_value(metric, value, confidence=None):
    """Validate one rating against its metric scale; raises ScaleError."""
    if metric not in METRICS:
        raise ScaleError(f"unknown metric {metric!r}")
    kind, scale = METRICS[metric]
    if kind in ("binary", "binary_confidence"):
        if value not in (0, 1):
            raise ScaleError(f"{metric}: value must be 0 or 1, got {value!r}")
    elif kind == "likert":
        lo, hi = scale
        if not isinstance(value, (int, np.integer)) or not lo <= value <= hi:
            raise ScaleError(f"{metric}: value must be an integer in [{lo}, {hi}], got {value!r}")
    elif kind == "category":
        if value not in scale:
            raise ScaleError(f"{metric}: value must be one of {scale}, got {value!r}")
    if kind == "binary_confidence":
        if confidence not in CONFIDENCE_SCALE:
            raise ScaleError(f"{metric}: confidence must be in {CONFIDENCE_SCALE}, got {confidence!r}")
    elif confidence is not None:
        raise ScaleError(f"{metric}: confidence is only valid for procedure_logic")


@dataclass
class RubricAnnotation:
    sample_id: str
    rater_id: str
    metric: str
    value: object
    confidence: int | None = None

    def __post_init__(self):
        check_value(self.metric, self.value, self.confidence)


def procedure_logic_score(decisions):
    """Confidence-weighted fraction of 'logic broken' votes: sum(q*y)/sum(q)."""
    if not decisions:
        raise ValueError("at least one rater decision is required")
    num = sum(q * y for y, q in decisions)
    den = sum(q for _, q in decisions)
    return num / den


def _by_sample(annotations, metric):
    samples = {}
    for ann in annotations:
        if ann.metric == metric:
            samples.setdefault(ann.sample_id, []).append(ann)
    return samples


def aggregate(annotations, metric):
    """Aggregate one metric over annotations.

    binaries -> percent yes over sample-level majority votes (ties reported
    separately); Likert -> arithmetic mean of all ratings; taxonomy -> label
    distribution; procedure_logic -> mean confidence-weighted score.
    Returns a dict; {"available": False} when no data exists.
    """
    kind, _ = METRICS[metric]
    samples = _by_sample(annotations, metric)
    if not samples:
        return {"metric": metric, "available": False, "value": "--", "n_samples": 0}
    if kind == "binary":
        yes = no = ties = 0
        for anns in samples.values():
            votes = [a.value for a in anns]
            ones, zeros = votes.count(1), votes.count(0)
            if ones > zeros:
                yes += 1
            elif zeros > ones:
                no += 1
            else:
                ties += 1
        decided = yes + no
        return {
            "metric": metric, "available": True,
            "value": 100.0 * yes / decided if decided else "--",
            "n_samples": len(samples), "ties": ties,
        }
    if kind == "likert":
        values = [a.value for anns in samples.values() for a in anns]
        return {"metric": metric, "available": True,
                "value": float(np.mean(values)), "n_samples": len(samples)}
    if kind == "binary_confidence":
        scores = {
            sid: procedure_logic_score([(a.value, a.confidence) for a in anns])
            for sid, anns in samples.items()
        }
        return {"metric": metric, "available": True,
                "value": float(np.mean(list(scores.values()))),
                "per_sample": scores, "n_samples": len(samples)}
    # category
    dist = {}
    total = 0
    for anns in samples.values():
        for a in anns:
            dist[a.value] = dist.get(a.value, 0) + 1
            total += 1
    return {"metric": metric, "available": True,
            "value": {k: v / total for k, v in dist.items()},
            "n_samples": len(samples)}


def krippendorff_alpha(matrix, level="nominal"):
    """Krippendorff's alpha via the coincidence matrix.

    matrix: raters x items, None marking missing cells. Values must be
    hashable; for ordinal data they must be orderable.
    """
    n_raters = len(matrix)
    if n_raters < 2:
        raise ValueError("need at least two raters")
    n_items = len(matrix[0])
    units = []
    for j in range(n_items):
        vals = [matrix[i][j] for i in range(n_raters) if matrix[i][j] is not None]
        if len(vals) >= 2:  # only pairable units contribute
            units.append(vals)
    if not units:
        raise ValueError("no item is rated by two or more raters")

    values = sorted({v for unit in units for v in unit})
    index = {v: i for i, v in enumerate(values)}
    V = len(values)
    coincidence = np.zeros((V, V))
    for unit in units:
        m = len(unit)
        counts = np.zeros(V)
        for v in unit:
            counts[index[v]] += 1
        pair = np.outer(counts, counts) - np.diag(counts)
        coincidence += pair / (m - 1)

    n_c = coincidence.sum(axis=1)
    n_total = n_c.sum()
    delta = _distance_matrix(values, n_c, level)
    d_o = float((coincidence * delta).sum())
    expected = np.outer(n_c, n_c) - np.diag(n_c)
    d_e = float((expected * delta).sum() / (n_total - 1))
    if d_e == 0.0:
        return 1.0  # no expected disagreement anywhere: perfect by definition
    return 1.0 - d_o / d_e


def _distance_matrix(values, n_c, level):
    V = len(values)
    delta = np.zeros((V, V))
    for i in range(V):
        for j in range(V):
            if i == j:
                continue
            if level == "nominal":
                delta[i, j] = 1.0
            elif level == "ordinal":
                lo, hi = min(i, j), max(i, j)
                span = n_c[lo:hi + 1].sum() - (n_c[lo] + n_c[hi]) / 2.0
                delta[i, j] = span ** 2
            else:
                raise ValueError(f"unknown level {level!r}")
    return delta


def alpha_matrix(annotations, metric):
    """Build the raters x items value matrix for one metric."""
    raters = sorted({a.rater_id for a in annotations if a.metric == metric})
    samples = sorted({a.sample_id for a in annotations if a.metric == metric})
    lut = {(a.rater_id, a.sample_id): a.value
           for a in annotations if a.metric == metric}
    return [[lut.get((r, s)) for s in samples] for r in raters]


@dataclass
class AuditReport:
    aggregates: dict
    alphas: dict
    procedure_logic: dict = field(default_factory=dict)

    def to_dict(self):
        return {"aggregates": self.aggregates, "alphas": self.alphas,
                "procedure_logic": self.procedure_logic}

    def table(self):
        """Human-readable per-metric summary lines."""
        lines = [f"{'metric':24s} {'aggregate':>12s} {'alpha':>8s} {'n':>5s}"]
        for metric in METRICS:
            agg = self.aggregates.get(metric, {})
            value = agg.get("value", "--")
            if isinstance(value, float):
                value = f"{value:.3f}"
            elif isinstance(value, dict):
                value = ",".join(f"{k}:{v:.2f}" for k, v in sorted(value.items()))
            alpha = self.alphas.get(metric)
            alpha_s = f"{alpha:.3f}" if isinstance(alpha, float) else "--"
            lines.append(f"{metric:24s} {str(value):>12s} {alpha_s:>8s} "
                         f"{agg.get('n_samples', 0):>5d}")
        return "\n".join(lines)


def audit(annotations):
    """Full audit: aggregates plus per-metric agreement."""
    aggregates = {}
    alphas = {}
    for metric in METRICS:
        aggregates[metric] = aggregate(annotations, metric)
        matrix = alpha_matrix(annotations, metric)
        pairable = (
            len(matrix) >= 2
            and any(sum(v is not None for v in col) >= 2
                    for col in zip(*matrix))
        )
        if pairable:
            try:
                alphas[metric] = krippendorff_alpha(matrix, ALPHA_LEVELS[metric])
            except ValueError:
                alphas[metric] = None
        else:
            alphas[metric] = None
    pl = aggregates["procedure_logic"].get("per_sample", {})
    return AuditReport(aggregates, alphas, procedure_logic=pl)


def load_annotations(path):
    """Read annotation rows from .csv/.tsv or a JSON list."""
    annotations = []
    if path.endswith(".json"):
        with open(path) as fh:
            rows = json.load(fh)
    else:
        delimiter = "\t" if path.endswith(".tsv") else ","
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh, delimiter=delimiter))
    for row in rows:
        value = row["value"]
        kind, _ = METRICS.get(row["metric"], ("category", ()))
        if kind != "category":
            value = int(value)
        confidence = row.get("confidence")
        if confidence in ("", None):
            confidence = None
        else:
            confidence = int(confidence)
        annotations.append(RubricAnnotation(
            sample_id=str(row["sample_id"]),
            rater_id=str(row["rater_id"]),
            metric=row["metric"],
            value=value,
            confidence=confidence,
        ))
    return annotations


def save_annotations(annotations, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sample_id", "rater_id", "metric", "value", "confidence"])
        for a in annotations:
            writer.writerow([a.sample_id, a.rater_id, a.metric, a.value,
                             a.confidence if a.confidence is not None else ""])


def proxy_score(trace, procedure, client):
    """Predict the text-only rubric metrics for one trace via the client."""
    raw = client.submit({
        "task": "Predict rubric metric values for this mistake-aware trace.",
        "metrics": {m: str(METRICS[m]) for m in TEXT_ONLY_METRICS},
        "procedure": procedure,
        "trace": {"contract": json.dumps(trace.to_contract())},
    }, schema="rubric_proxy")
    try:
        data = json.loads(raw)
    except json.JSONDecodeError:
        return {m: None for m in TEXT_ONLY_METRICS}
    out = {}
    for metric in TEXT_ONLY_METRICS:
        value = data.get(metric)
        confidence = None
        if isinstance(value, dict):
            confidence = value.get("confidence")
            value = value.get("value")
        try:
            check_value(metric, value, confidence)
        except ScaleError:
            out[metric] = None
            continue
        out[metric] = {"value": value, "confidence": confidence} if confidence else value
    return out


def calibrate(predictions, gold):
    """Compare proxy predictions to gold labels per metric.

    predictions/gold: sample_id -> {metric: value}. Binaries and categories
    report agreement rate; Likert metrics report mean absolute error.
    """
    report = {}
    for metric in TEXT_ONLY_METRICS:
        kind, _ = METRICS[metric]
        pairs = []
        for sid, pred in predictions.items():
            if sid in gold and metric in pred and metric in gold[sid]:
                p, g = pred[metric], gold[sid][metric]
                if isinstance(p, dict):
                    p = p["value"]
                if isinstance(g, dict):
                    g = g["value"]
                if p is not None and g is not None:
                    pairs.append((p, g))
        if not pairs:
            report[metric] = {"available": False}
        elif kind == "likert":
            report[metric] = {
                "available": True,
                "mae": float(np.mean([abs(p - g) for p, g in pairs])),
                "n": len(pairs),
            }
        else:
            report[metric] = {
                "available": True,
                "agreement": float(np.mean([p == g for p, g in pairs])),
                "n": len(pairs),
            }
    return report
