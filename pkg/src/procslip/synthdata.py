"""Synthetic procedures with matching representation caches.

Used by the demo scripts, the offline end-to-end pipeline tests, and the
calibration sweeps. Step texts are rendered from the representations with
the same template the mock writer uses, so role values always surface in
the text and value-level edits stay visible.
"""

from __future__ import annotations

import numpy as np

from .corpusio import Procedure, Step
from .semrep import SemRep, SemRepCache, ValueNode, parse
from .tracemodel import template_step_text

_PREDICATES = {
    "GET": ("Object", "Origin"),
    "WASH": ("Object", "Instrument"),
    "CHOP": ("Object", "Instrument", "Location"),
    "ADD": ("Object", "Destination"),
    "MIX": ("Object", "Instrument"),
    "POUR": ("Object", "Destination"),
    "PLACE": ("Object", "Location"),
    "HEAT": ("Object", "Instrument"),
    "WIPE": ("Object", "Instrument"),
    "INSPECT": ("Object",),
}

_VALUES = {
    "Object": ("cucumber", "bell_pepper", "onion", "carrot", "bowl", "pan",
               "knife", "chain", "wheel", "test_swab", "coffee_grounds", "lid"),
    "Origin": ("refrigerator", "drawer", "shelf", "counter", "toolbox"),
    "Instrument": ("knife", "spoon", "brush", "towel", "wrench"),
    "Location": ("cutting_board", "counter", "stove", "table"),
    "Destination": ("bowl", "pan", "pot", "plate"),
}


def make_step_rep(rng, predicate=None):
    if predicate is None:
        predicate = list(_PREDICATES)[int(rng.integers(len(_PREDICATES)))]
    roles = _PREDICATES[predicate]
    args = [("Agent", ValueNode("you"))]
    for role in roles:
        pool = _VALUES[role]
        args.append((role, ValueNode(pool[int(rng.integers(len(pool)))])))
    return SemRep(predicate, tuple(args))


def make_procedure(proc_id, n_steps, seed, task="synthetic_task"):
    """One synthetic procedure plus its representation cache.

    Returns (procedure, cache, semreps) with semreps keyed by step index.
    """
    rng = np.random.default_rng(seed)
    cache = SemRepCache()
    steps = []
    semreps = {}
    clock = 0.0
    for i in range(n_steps):
        rep = make_step_rep(rng)
        text = template_step_text(rep)
        # de-duplicate texts so substitution candidates always differ
        if any(s.text == text for s in steps):
            text = f"{text} again"
        duration = float(rng.uniform(3.0, 40.0))
        step = Step(
            index=i,
            step_id=f"{proc_id}_{i}",
            text=text,
            duration=duration,
            start=clock,
            end=clock + duration,
            essential=bool(rng.random() < 0.8),
            semrep_id=f"{proc_id}_{i}",
            parent_id=f"block_{i // 4}",
        )
        clock += duration
        steps.append(step)
        cache.add(step.semrep_id, text, rep.render())
        semreps[i] = parse(rep.render())
    return Procedure(proc_id, task, f"scenario_{seed}", steps), cache, semreps


def make_corpus(n_procedures, n_steps=26, seed=0, task="synthetic_task"):
    """A batch of procedures sharing one merged representation cache."""
    procedures = []
    merged = SemRepCache()
    all_semreps = {}
    for k in range(n_procedures):
        proc, cache, semreps = make_procedure(f"proc_{k:03d}", n_steps, seed + k, task)
        procedures.append(proc)
        for step_id, entry in cache.entries.items():
            merged.add(step_id, entry["step_description"], entry["semantic_representation"])
        all_semreps[proc.proc_id] = semreps
    return procedures, merged, all_semreps


def cucumber_scenario():
    """The acquisition-substitution cascade fixture: an early GET step whose
    object is later washed, chopped (twice), and added downstream."""
    reps = [
        "GET(Agent: you, Object: cucumber, Origin: refrigerator)",
        "WASH(Agent: you, Object: cucumber, Instrument: water)",
        "PLACE(Agent: you, Object: cucumber, Location: chopping_board)",
        "CHOP(Agent: you, Object: cucumber, Instrument: knife, Location: chopping_board)",
        "CHOP(Agent: you, Object: cucumber, Instrument: knife, Location: chopping_board)",
        "ADD(Agent: you, Object: chopped_cucumber, Destination: bowl)",
        "MIX(Agent: you, Object: salad, Instrument: spoon)",
    ]
    texts = [
        "Get cucumber from the refrigerator",
        "Wash cucumber with water",
        "Place cucumber on the chopping board",
        "Chop cucumber with knife on the chopping board",
        "Chop cucumber with knife on the chopping board again",
        "Add chopped cucumber into the bowl",
        "Mix the salad with a spoon",
    ]
    cache = SemRepCache()
    steps = []
    semreps = {}
    clock = 0.0
    for i, (rep_text, text) in enumerate(zip(reps, texts)):
        duration = 8.0
        steps.append(Step(index=i, step_id=str(i), text=text, duration=duration,
                          start=clock, end=clock + duration, semrep_id=str(i)))
        clock += duration
        cache.add(str(i), text, rep_text)
        semreps[i] = parse(rep_text)
    proc = Procedure("sfu_cooking_demo", "cooking", "cucumber_salad", steps)
    return proc, cache, semreps
