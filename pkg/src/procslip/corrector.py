"""Correction simulation: does the executor notice a mistake, act, and how.

Detection is a factorized probability over error type and phase, modulated
multiplicatively by severity, essentiality, predicate salience, and load,
then clamped away from certainty. Conditioned on detection and action, a
latency in steps and a correction type compatible with the triggering error
are sampled.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict

import numpy as np

CORRECTION_TYPES = ("stop_and_fix", "redo", "rollback_and_redo", "undo_extra_step")

# Correction types each error type can receive.
DEFAULT_COMPATIBILITY = {
    "WE": ("stop_and_fix", "redo"),
    "S": ("stop_and_fix", "redo"),
    "D": ("stop_and_fix",),
    "I": ("undo_extra_step",),
    "T": ("rollback_and_redo",),
}

# Base detectability by error type and phase bucket (early, mid, late).
# Salient execution failures are more detectable than quiet omissions,
# and detectability drops as the procedure wears on.
DEFAULT_BASE_TABLE = {
    "WE": (0.55, 0.50, 0.45),
    "S": (0.45, 0.40, 0.35),
    "I": (0.40, 0.35, 0.30),
    "T": (0.35, 0.30, 0.25),
    "D": (0.30, 0.25, 0.20),
}

_BUCKETS = {"phase_1": 0, "phase_2": 1, "phase_3": 2}


@dataclass
class DetectionModel:
    base_table: dict = field(default_factory=lambda: dict(DEFAULT_BASE_TABLE))
    severity_factors: dict = field(default_factory=lambda: {"high": 1.15, "medium": 1.0, "low": 0.85})
    essential_factors: dict = field(default_factory=lambda: {True: 1.1, False: 0.9})
    predicate_factors: dict = field(default_factory=lambda: {"salient": 1.05, "other": 0.95})
    clamp: tuple = (0.02, 0.95)
    action_probability: float = 0.8
    latency_p: float = 0.6
    latency_cap: int = 3
    compatibility: dict = field(default_factory=lambda: dict(DEFAULT_COMPATIBILITY))

    def __post_init__(self):
        lo, hi = self.clamp
        if not (0.0 < lo < hi < 1.0):
            raise ValueError("clamp bounds must satisfy 0 < lo < hi < 1")
        for tau, row in self.base_table.items():
            if any(not 0.0 < v < 1.0 for v in row):
                raise ValueError(f"base detectability for {tau} must lie in (0, 1)")
        missing = set(DEFAULT_COMPATIBILITY) - set(self.compatibility)
        if missing:
            raise ValueError(f"compatibility map misses error types: {sorted(missing)}")

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            data = json.load(fh)
        if "base_table" in data:
            data["base_table"] = {k: tuple(v) for k, v in data["base_table"].items()}
        if "essential_factors" in data:
            data["essential_factors"] = {
                k in ("true", "True", True): v for k, v in data["essential_factors"].items()
            }
        if "clamp" in data:
            data["clamp"] = tuple(data["clamp"])
        if "compatibility" in data:
            data["compatibility"] = {k: tuple(v) for k, v in data["compatibility"].items()}
        return cls(**data)

    def to_dict(self):
        data = asdict(self)
        data["essential_factors"] = {str(k).lower(): v for k, v in self.essential_factors.items()}
        data["clamp"] = list(self.clamp)
        return data


@dataclass
class CorrectionEvent:
    position: int          # insertion point, in original-step coordinates
    type: str
    trigger_error_id: str
    repair_target: str
    latency: int
    correction_id: str

    def to_dict(self):
        return {
            "position": self.position,
            "type": self.type,
            "trigger_error_id": self.trigger_error_id,
            "repair_target": self.repair_target,
            "latency": self.latency,
            "correction_id": self.correction_id,
        }


def detection_probability(error, phase, essential, predicate_salient, load, model):
    """Clamped product of base detectability and the four modulation factors."""
    base = model.base_table[error.type][_BUCKETS[phase]]
    f_sev = model.severity_factors[error.severity]
    f_ess = model.essential_factors[bool(essential)]
    f_pred = model.predicate_factors["salient" if predicate_salient else "other"]
    f_load = max(0.70, 1.0 - 0.25 * load)
    lo, hi = model.clamp
    return float(min(hi, max(lo, base * f_sev * f_ess * f_pred * f_load)))


def _salient_predicates(semreps):
    """Top-quartile-frequency predicates across the procedure's steps."""
    counts = {}
    for rep in semreps.values():
        if rep is not None:
            counts[rep.predicate] = counts.get(rep.predicate, 0) + 1
    if not counts:
        return set()
    ordered = sorted(counts, key=lambda p: (-counts[p], p))
    keep = max(1, len(ordered) // 4)
    return set(ordered[:keep])


def plan_corrections(plan, procedure, profile, model, semreps=None, rng=None):
    """Populate plan.corrections conditioned on the planned errors."""
    if rng is None:
        rng = np.random.default_rng(plan.seed + 1)
    semreps = semreps or {}
    salient = _salient_predicates(semreps)
    T = len(procedure)
    corrections = []
    for error in plan.errors:
        t = error.target
        rep = semreps.get(t)
        p = detection_probability(
            error,
            phase=profile.phases[t],
            essential=procedure.steps[t].essential,
            predicate_salient=(rep is not None and rep.predicate in salient),
            load=float(profile.loads[t]),
            model=model,
        )
        if rng.random() >= p:
            continue
        if rng.random() >= model.action_probability:
            continue
        latency = min(model.latency_cap, int(rng.geometric(model.latency_p)) - 1)
        latency = min(latency, max(0, T - 1 - t))
        kappa_options = model.compatibility[error.type]
        kappa = kappa_options[int(rng.integers(len(kappa_options)))]
        target = _repair_target(error)
        corrections.append(CorrectionEvent(
            position=t + latency,
            type=kappa,
            trigger_error_id=error.error_id,
            repair_target=target,
            latency=latency,
            correction_id=f"C{len(corrections) + 1:02d}",
        ))
    plan.corrections = corrections
    return plan


def _repair_target(error):
    mutations = error.payload.get("mutations")
    if mutations:
        return mutations[0]["role"]
    if error.type == "T":
        return f"order_of_steps_{error.target}_{error.payload['partner']}"
    return f"step_{error.target}"
