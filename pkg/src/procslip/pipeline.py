"""End-to-end orchestration: profile -> plan -> corrections -> trace -> judge
-> edit windows, for single procedures and batches."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .corpusio import GenerationRecord
from .corrector import DetectionModel, plan_corrections
from .llm import MockGenerationClient, judge_and_repair, write_trace
from .loadphase import compute_profile
from .planner import PlannerConfig, plan_errors
from .semrep import complexity
from .tracemodel import video_edit_plan


@dataclass
class RunConfig:
    seed: int = 0
    planner: PlannerConfig = field(default_factory=PlannerConfig)
    detection: DetectionModel = field(default_factory=DetectionModel)
    client: str = "mock"               # mock | remote
    max_repair_rounds: int = 3
    w_c: float = 0.5
    w_t: float = 0.5

    def to_dict(self):
        return {
            "seed": self.seed,
            "planner": self.planner.to_dict(),
            "detection": self.detection.to_dict(),
            "client": self.client,
            "max_repair_rounds": self.max_repair_rounds,
            "w_c": self.w_c,
            "w_t": self.w_t,
        }

    def config_hash(self):
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def profile_for(procedure, semreps, config):
    complexities = [
        complexity(semreps[i]) if semreps.get(i) is not None else 0.0
        for i in range(len(procedure))
    ]
    durations = [s.duration for s in procedure.steps]
    return compute_profile(durations, complexities, w_c=config.w_c, w_t=config.w_t)


def plan_procedure(procedure, semreps, config, seed=None):
    """Plan errors and corrections for one procedure, deterministically."""
    seed = config.seed if seed is None else seed
    planner_config = PlannerConfig(**{**config.planner.to_dict(), "seed": seed})
    profile = profile_for(procedure, semreps, config)
    rng = np.random.default_rng(seed)
    plan = plan_errors(procedure, semreps, profile, planner_config, rng=rng)
    plan_corrections(plan, procedure, profile, config.detection, semreps=semreps, rng=rng)
    return plan, profile


def run_procedure(procedure, semreps, config, client=None, seed=None):
    """Full pipeline for one procedure; returns (record, judge outcome)."""
    if client is None:
        client = MockGenerationClient()
    plan, profile = plan_procedure(procedure, semreps, config, seed=seed)
    trace = write_trace(procedure, plan, semreps, client)
    outcome = judge_and_repair(trace, plan, procedure, client,
                               max_rounds=config.max_repair_rounds, semreps=semreps)
    edit_plan = video_edit_plan(outcome.trace, plan, procedure)
    record = GenerationRecord(
        procedure=procedure,
        plan=plan.to_dict(),
        trace=outcome.trace.to_contract(),
        edit_plan=[w.to_dict() for w in edit_plan.windows],
        provenance={
            "seed": plan.seed,
            "client": config.client,
            "config_hash": config.config_hash(),
            "judge_status": outcome.status,
            "judge_rounds": outcome.rounds_used,
            "edit_plan_diagnostics": edit_plan.diagnostics,
        },
    )
    return record, outcome


def run_batch(procedures, semreps_by_proc, config, client=None):
    """Run the pipeline over a corpus; per-procedure seeds derive from the
    run seed and the procedure position so batches are reproducible."""
    records = []
    outcomes = []
    for k, proc in enumerate(procedures):
        record, outcome = run_procedure(
            proc, semreps_by_proc.get(proc.proc_id, {}), config,
            client=client, seed=config.seed + k,
        )
        records.append(record)
        outcomes.append(outcome)
    return records, outcomes
