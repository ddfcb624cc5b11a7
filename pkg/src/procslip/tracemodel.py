"""Edited traces with provenance, template realization, validation, and
video edit-window planning.

A trace is a list of steps each carrying a source index, a mod code, and
optional error/correction ids:

    u   unchanged (verbatim)         ms  moved source (transposition)
    we  wrong execution              mt  moved target (transposition)
    s   substitution                 c   correction
    i   insertion                    a   cascade rewrite

Deletions are tracked separately as (source_idx, error_id) records, and a
rewrite map remembers value replacements that must propagate downstream.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

MODS = ("u", "we", "s", "ms", "mt", "c", "i", "a")

STYLE_LOCK = (
    "Egocentric head-mounted camera, fixed POV, same fisheye lens and same "
    "dark circular vignette. Same scene, same objects, same hands and body, "
    "same lighting. No new objects, no swaps, no text overlays, no "
    "reframing, no cut."
)

ACQUISITION_VERBS = ("get", "take", "pick", "retrieve", "grab")

BRIDGE_DURATION = 2.5
INSERT_CLIP_DURATION = 4.0

_STOPWORDS = frozenset(
    "a an the to of in on at with from into onto for and or your her his its "
    "their then it this that is are be".split()
)


@dataclass
class TraceStep:
    text: str
    source_idx: int | None
    mod: str
    error_id: str | None = None
    correction_id: str | None = None

    def to_meta(self):
        return [self.source_idx, self.mod, self.error_id, self.correction_id]


@dataclass
class EditedTrace:
    final_steps: list
    deletions: list = field(default_factory=list)   # (source_idx, error_id)
    rewrite_map: dict = field(default_factory=dict)  # orig value -> {"to", "error_id"}

    def to_contract(self):
        return {
            "final_steps": [s.text for s in self.final_steps],
            "meta": [s.to_meta() for s in self.final_steps],
            "del": [[idx, eid] for idx, eid in self.deletions],
            "rewrite_map": self.rewrite_map,
        }

    @classmethod
    def from_contract(cls, data):
        texts = data["final_steps"]
        meta = data["meta"]
        if len(texts) != len(meta):
            raise ValueError("final_steps and meta must have the same length")
        steps = []
        for text, row in zip(texts, meta):
            if isinstance(row, dict):  # inline-record form accepted on ingest
                row = [row.get("source_idx"), row.get("mod"),
                       row.get("error_id"), row.get("correction_id")]
            src, mod, eid, cid = row
            steps.append(TraceStep(text, src, mod, eid, cid))
        deletions = [(row[0], row[1]) for row in data.get("del", [])]
        return cls(steps, deletions, dict(data.get("rewrite_map", {})))


def humanize(value):
    """Turn a lowercase_with_underscores value into plain words."""
    return re.sub(r"[_]+", " ", value).strip()


def _mention_pattern(value):
    return re.compile(r"\b" + re.escape(humanize(value)) + r"\b", re.IGNORECASE)


def mentions(text, value):
    return bool(_mention_pattern(value).search(text))


def replace_value(text, original, replacement):
    return _mention_pattern(original).sub(humanize(replacement), text)


def normalize_text(text):
    return " ".join(re.sub(r"[^\w\s]", " ", text.lower()).split())


def meaningfully_differs(new_text, original_text):
    """Normalized inequality plus at least one changed content token."""
    if normalize_text(new_text) == normalize_text(original_text):
        return False
    a = {t for t in normalize_text(new_text).split() if t not in _STOPWORDS}
    b = {t for t in normalize_text(original_text).split() if t not in _STOPWORDS}
    return bool(a ^ b)


# --- template writer -------------------------------------------------------

_ROLE_PREPOSITIONS = {
    "Coobject": "together with",
    "Instrument": "with",
    "Location": "in",
    "Destination": "to",
    "Origin": "from",
    "Purpose": "for",
    "Result": "into",
}


def template_step_text(rep):
    """Deterministic imperative text for a representation, used by the mock
    writer and by synthetic corpora so role values always surface in the text."""
    verb = humanize(rep.predicate.lower())
    parts = [verb.capitalize()]
    obj = rep.role_value("Object")
    if obj is not None:
        parts.append("the " + humanize(_leaf_value(obj)))
    for role, node in rep.roles.items():
        if role in ("Agent", "Object", "Manner"):
            continue
        prep = _ROLE_PREPOSITIONS.get(role)
        if prep:
            parts.append(f"{prep} the {humanize(_leaf_value(node))}")
    manner = rep.role_value("Manner")
    if manner is not None:
        parts.append(humanize(_leaf_value(manner)))
    return " ".join(parts)


def _leaf_value(node):
    """Innermost atom of a value tree, e.g. from(nostril(of(her))) -> her."""
    while node.args:
        role_children = [c for _, c in node.args]
        node = role_children[0]
    return node.head


_INSERTION_TEMPLATES = {
    "unnecessary_repetition": "Repeat the previous action one more time",
    "extra_check": "Pause and double-check the {anchor_object}",
    "redundant_cleaning": "Wipe down the {anchor_object} unnecessarily",
    "irrelevant_adjustment": "Fiddle with the {anchor_object} without need",
}


def _insertion_text(intent, anchor_text, rep):
    obj = "workspace"
    if rep is not None:
        node = rep.role_value("Object")
        if node is not None:
            obj = humanize(_leaf_value(node))
    template = _INSERTION_TEMPLATES.get(intent, "Do something unplanned near the {anchor_object}")
    return template.format(anchor_object=obj)


def _correction_text(kappa, trigger, procedure, trace_texts):
    t = trigger.target
    original = procedure.steps[t].text
    if kappa == "redo":
        return f"Redo: {original}"
    if kappa == "rollback_and_redo":
        return f"Return to step {t + 1} and redo the following steps in order"
    if kappa == "undo_extra_step":
        inserted = trace_texts.get(trigger.error_id, "the extra step")
        return f"Undo the extra step: {inserted}"
    target = trigger.payload.get("mutations", [{}])[0].get("role", f"step {t + 1}")
    return f"Stop and fix {target}: {original}"


# --- cascades --------------------------------------------------------------

def cascade_apply(rewrite_map, steps, start_pos=0):
    """Rewrite later steps that mention a mapped value.

    rewrite_map: {original_value: {"to": replacement, "error_id": eid}}.
    Only verbatim (mod 'u') steps after start_pos are rewritten; rewritten
    steps become mod 'a' with the triggering error id.
    """
    out = list(steps)
    for i in range(start_pos, len(out)):
        step = out[i]
        if step.mod != "u":
            continue
        text = step.text
        hit_eid = None
        for original, entry in rewrite_map.items():
            if mentions(text, original):
                text = replace_value(text, original, entry["to"])
                hit_eid = entry["error_id"]
        if hit_eid is not None:
            out[i] = TraceStep(text, step.source_idx, "a", hit_eid, None)
    return out


def _is_acquisition(text):
    first = normalize_text(text).split()[:1]
    return bool(first) and first[0] in ACQUISITION_VERBS


def _diff_values(old_text, new_text):
    """Changed spans of two step texts as (original, replacement) value
    tokens, underscore-joined. Used when no representation is available."""
    a = normalize_text(old_text).split()
    b = normalize_text(new_text).split()
    i = 0
    while i < min(len(a), len(b)) and a[i] == b[i]:
        i += 1
    j = 0
    while j < min(len(a), len(b)) - i and a[-1 - j] == b[-1 - j]:
        j += 1
    old_span = a[i:len(a) - j]
    new_span = b[i:len(b) - j]
    if old_span and new_span:
        return "_".join(old_span), "_".join(new_span)
    return None, None


# --- realization -----------------------------------------------------------

def realize_with_templates(procedure, plan, semreps=None):
    """Deterministic writer: apply the plan structurally and via templates.

    semreps maps step index -> SemRep; it is required for faithful WE
    rendering, otherwise a value-replacement fallback is used.
    """
    semreps = semreps or {}
    records = [
        TraceStep(step.text, step.index, "u") for step in procedure.steps
    ]
    rewrite_map = {}
    trigger_pos = {}       # error_id -> index in records where the edit landed
    inserted_texts = {}    # error_id -> inserted step text (for undo templates)
    deletions = []

    def locate(source_idx):
        for i, rec in enumerate(records):
            if rec.source_idx == source_idx:
                return i
        return None

    # Transpositions first: pure reorder of verbatim steps.
    for error in plan.errors:
        if error.type != "T":
            continue
        i, j = locate(error.target), locate(error.payload["partner"])
        records[i], records[j] = records[j], records[i]
        for pos, mod in ((locate(error.target), "ms"), (locate(error.payload["partner"]), "mt")):
            rec = records[pos]
            records[pos] = TraceStep(rec.text, rec.source_idx, mod, error.error_id, None)
            trigger_pos[error.error_id] = min(trigger_pos.get(error.error_id, pos), pos)

    # Text-level edits (WE, S).
    for error in plan.errors:
        if error.type not in ("WE", "S"):
            continue
        pos = locate(error.target)
        rec = records[pos]
        rep = semreps.get(error.target)
        if "mutations" in error.payload:
            text = rec.text
            new_rep = rep
            for mut in error.payload["mutations"]:
                if new_rep is not None and mut["role"] in new_rep.roles:
                    from .semrep import parse, ValueNode
                    new_rep = new_rep.with_role_value(mut["role"], ValueNode(mut["mutated"]))
                if mentions(text, mut["original"]):
                    text = replace_value(text, mut["original"], mut["mutated"])
                else:
                    text = None
                    break
            if text is None:
                text = template_step_text(new_rep) if new_rep is not None else (
                    rec.text + f" using {humanize(error.payload['mutations'][0]['mutated'])}"
                )
            mod = "we" if error.type == "WE" else "s"
            records[pos] = TraceStep(text, rec.source_idx, mod, error.error_id, None)
            if rep is not None and _is_acquisition(rec.text):
                for mut in error.payload["mutations"]:
                    rewrite_map[mut["original"]] = {"to": mut["mutated"], "error_id": error.error_id}
        else:
            sub_text = error.payload["substitute_text"]
            records[pos] = TraceStep(sub_text, rec.source_idx, "s", error.error_id, None)
            if _is_acquisition(rec.text):
                old_rep = rep
                new_rep = semreps.get(error.payload.get("substitute_index"))
                old_obj = old_rep.role_value("Object") if old_rep else None
                new_obj = new_rep.role_value("Object") if new_rep else None
                if old_obj is not None and new_obj is not None and old_obj.render() != new_obj.render():
                    rewrite_map[old_obj.render()] = {"to": new_obj.render(), "error_id": error.error_id}
                else:
                    orig_val, new_val = _diff_values(rec.text, sub_text)
                    if orig_val is not None and orig_val != new_val:
                        rewrite_map[orig_val] = {"to": new_val, "error_id": error.error_id}
        trigger_pos[error.error_id] = pos

    # Deletions.
    for error in plan.errors:
        if error.type != "D":
            continue
        pos = locate(error.target)
        del records[pos]
        deletions.append((error.target, error.error_id))
        trigger_pos[error.error_id] = pos

    # Insertions.
    for error in plan.errors:
        if error.type != "I":
            continue
        anchor = error.payload["anchor"]
        pos = locate(anchor)
        if pos is None:  # defensive: anchor gone, append at the end
            pos = len(records) - 1
        text = _insertion_text(error.payload["intent"], records[pos].text, semreps.get(anchor))
        records.insert(pos + 1, TraceStep(text, anchor, "i", error.error_id, None))
        inserted_texts[error.error_id] = text
        trigger_pos[error.error_id] = pos + 1

    # Cascade rewrites for value changes that alter later availability.
    if rewrite_map:
        for eid in sorted({entry["error_id"] for entry in rewrite_map.values()}):
            start = next(
                (i for i, rec in enumerate(records)
                 if rec.error_id == eid and rec.mod in ("we", "s")),
                -1,
            ) + 1
            active = {k: v for k, v in rewrite_map.items() if v["error_id"] == eid}
            records = cascade_apply(active, records, start_pos=start)

    # Corrections last so cascades never touch them.
    errors_by_id = {e.error_id: e for e in plan.errors}
    for corr in plan.corrections:
        trigger = errors_by_id[corr.trigger_error_id]
        pos = locate(corr.position)
        if pos is None:
            pos = trigger_pos.get(corr.trigger_error_id, len(records) - 1)
            pos = min(pos, len(records) - 1)
        text = _correction_text(corr.type, trigger, procedure, inserted_texts)
        records.insert(pos + 1, TraceStep(text, None, "c", corr.trigger_error_id, corr.correction_id))

    return EditedTrace(records, deletions, rewrite_map)


# --- validation ------------------------------------------------------------

@dataclass
class Violation:
    code: str
    position: int
    message: str


@dataclass
class ValidationReport:
    violations: list

    @property
    def ok(self):
        return not self.violations

    def codes(self):
        return [v.code for v in self.violations]


def validate_trace(trace, plan, procedure):
    """Deterministic judge: check every trace invariant against the plan."""
    v = []
    T = len(procedure)
    originals = [s.text for s in procedure.steps]

    for pos, step in enumerate(trace.final_steps):
        if step.mod not in MODS:
            v.append(Violation("UNKNOWN_MOD", pos, f"unknown mod {step.mod!r}"))
            continue
        if step.source_idx is not None and not (0 <= step.source_idx < T):
            v.append(Violation("SOURCE_IDX_RANGE", pos,
                               f"source_idx {step.source_idx} outside [0, {T - 1}]"))
            continue
        if step.mod in ("we", "s", "i", "ms", "mt", "a") and not step.error_id:
            v.append(Violation("ERROR_ID_MISSING", pos, f"mod {step.mod!r} requires an error id"))
        if step.mod == "c" and not step.correction_id:
            v.append(Violation("CORRECTION_ID_MISSING", pos, "correction step without correction id"))
        if step.source_idx is None:
            continue
        original = originals[step.source_idx]
        if step.mod == "u" and step.text != original:
            v.append(Violation("UNCHANGED_NOT_VERBATIM", pos,
                               "mod 'u' step text differs from the original"))
        if step.mod in ("ms", "mt") and step.text != original:
            v.append(Violation("MOVED_NOT_VERBATIM", pos,
                               "transposed step text must stay verbatim"))
        if step.mod in ("we", "s") and not meaningfully_differs(step.text, original):
            v.append(Violation("FAKE_ERROR", pos,
                               "mod requires a meaningful change but text matches the original"))
        if step.mod == "i" and normalize_text(step.text) == normalize_text(original):
            v.append(Violation("INSERTION_NOT_NOVEL", pos,
                               "inserted text duplicates its anchor step"))

    # Transposition pairing: exactly one ms and one mt per transposition id.
    by_eid = {}
    for pos, step in enumerate(trace.final_steps):
        if step.mod in ("ms", "mt") and step.error_id:
            by_eid.setdefault(step.error_id, []).append(step.mod)
    for eid, mods in by_eid.items():
        if sorted(mods) != ["ms", "mt"]:
            v.append(Violation("TRANSPOSITION_UNPAIRED", -1,
                               f"{eid}: expected exactly one ms and one mt, got {mods}"))

    # Planned coverage.
    step_eids = {s.error_id for s in trace.final_steps if s.error_id}
    deletion_eids = [eid for _, eid in trace.deletions]
    for error in plan.errors:
        if error.error_id not in step_eids and error.error_id not in deletion_eids:
            v.append(Violation("PLAN_ERROR_MISSING", -1,
                               f"planned error {error.error_id} not realized"))
    if len(set(deletion_eids)) != len(deletion_eids):
        v.append(Violation("DELETION_ID_DUPLICATED", -1, "deletion error ids must be unique"))
    cid_counts = {}
    for step in trace.final_steps:
        if step.correction_id:
            cid_counts[step.correction_id] = cid_counts.get(step.correction_id, 0) + 1
    for corr in plan.corrections:
        n = cid_counts.get(corr.correction_id, 0)
        if n == 0:
            v.append(Violation("PLAN_CORRECTION_MISSING", -1,
                               f"planned correction {corr.correction_id} not realized"))
        elif n > 1:
            v.append(Violation("CORRECTION_DUPLICATED", -1,
                               f"correction {corr.correction_id} appears {n} times"))

    # Cascade id reuse: mod 'a' must share the id of a planned error.
    planned_eids = {e.error_id for e in plan.errors}
    for pos, step in enumerate(trace.final_steps):
        if step.mod == "a" and step.error_id not in planned_eids:
            v.append(Violation("CASCADE_ID_MISMATCH", pos,
                               f"cascade step carries unknown error id {step.error_id!r}"))

    v.extend(_check_availability(trace))
    return ValidationReport(v)


def _check_availability(trace):
    """Values substituted away at an acquisition step must not be referenced
    later unless explicitly re-acquired."""
    out = []
    for original, entry in trace.rewrite_map.items():
        eid = entry["error_id"]
        sub_pos = next(
            (i for i, s in enumerate(trace.final_steps)
             if s.error_id == eid and s.mod in ("we", "s")),
            None,
        )
        if sub_pos is None:
            continue
        if not _is_acquisition_text(trace.final_steps[sub_pos].text):
            continue
        reacquired = False
        for i in range(sub_pos + 1, len(trace.final_steps)):
            step = trace.final_steps[i]
            if not mentions(step.text, original):
                continue
            if _is_acquisition_text(step.text):
                reacquired = True
                continue
            if step.mod == "c":
                continue  # corrections may legitimately name the repaired value
            if not reacquired:
                out.append(Violation(
                    "UNAVAILABLE_VALUE", i,
                    f"step references {original!r}, which was substituted away at "
                    f"position {sub_pos} and never re-acquired",
                ))
    return out


def _is_acquisition_text(text):
    return _is_acquisition(text)


# --- video edit windows ----------------------------------------------------

@dataclass
class VideoEditWindow:
    kind: str                   # replace_step | insert_clip | regenerate_window | bridge
    span: tuple                 # (first original step idx, last original step idx)
    anchor_before: float        # end timestamp of the preceding step
    anchor_after: float         # start timestamp of the following step
    target_duration: float
    prompt_stub: str

    def to_dict(self):
        return {
            "kind": self.kind,
            "span": list(self.span),
            "anchor_before": self.anchor_before,
            "anchor_after": self.anchor_after,
            "target_duration": self.target_duration,
            "prompt_stub": self.prompt_stub,
        }


@dataclass
class EditPlanResult:
    windows: list
    diagnostics: list


def video_edit_plan(trace, plan, procedure):
    """Plan per-error/correction edit windows over the original timeline."""
    steps = procedure.steps
    T = len(steps)

    def has_timestamps(idx):
        return steps[idx].end > steps[idx].start

    episode_start = steps[0].start
    episode_end = steps[-1].end

    def anchors(lo, hi):
        before = steps[lo - 1].end if lo > 0 else episode_start
        after = steps[hi + 1].start if hi < T - 1 else episode_end
        before = min(max(before, episode_start), episode_end)
        after = min(max(after, before), episode_end)
        return before, after

    edited_text = {}
    for step in trace.final_steps:
        if step.error_id and step.error_id not in edited_text and step.mod != "u":
            edited_text[step.error_id] = step.text
    correction_text = {
        s.correction_id: s.text for s in trace.final_steps if s.correction_id
    }

    windows = []
    diagnostics = []

    def stub(text):
        return f"{STYLE_LOCK} Action: {text}"

    for error in plan.errors:
        t = error.target
        if error.type == "T":
            lo = min(t, error.payload["partner"])
            hi = max(t, error.payload["partner"])
        else:
            lo = hi = t
        if not all(has_timestamps(i) for i in range(lo, hi + 1)):
            diagnostics.append(
                f"{error.error_id}: missing timestamps for steps {lo}..{hi}; window rejected"
            )
            continue
        before, after = anchors(lo, hi)
        text = edited_text.get(error.error_id, steps[t].text)
        if error.type in ("WE", "S"):
            windows.append(VideoEditWindow("replace_step", (lo, hi), before, after,
                                           steps[t].duration, stub(text)))
        elif error.type == "I":
            windows.append(VideoEditWindow("insert_clip", (lo, hi), steps[t].end,
                                           after, INSERT_CLIP_DURATION, stub(text)))
        elif error.type == "T":
            duration = sum(steps[i].duration for i in range(lo, hi + 1))
            windows.append(VideoEditWindow("regenerate_window", (lo, hi), before, after,
                                           duration, stub(text)))
        elif error.type == "D":
            windows.append(VideoEditWindow("bridge", (lo, hi), before, after,
                                           BRIDGE_DURATION, stub(f"Transition past: {steps[t].text}")))

    for corr in plan.corrections:
        p = min(corr.position, T - 1)
        if not has_timestamps(p):
            diagnostics.append(
                f"{corr.correction_id}: missing timestamps for step {p}; window rejected"
            )
            continue
        before, after = anchors(p, p)
        text = correction_text.get(corr.correction_id, corr.type)
        windows.append(VideoEditWindow("insert_clip", (p, p), steps[p].end, after,
                                       INSERT_CLIP_DURATION, stub(text)))

    return EditPlanResult(windows, diagnostics)
