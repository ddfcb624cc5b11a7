"""Plan mistakes and corrections for one synthetic procedure.

Shows the load profile, phase assignment, the sampled error plan, and the
corrections the simulated executor schedules.

Run with: python3 demos/02_plan_mistakes.py
"""

import numpy as np

from procslip.corrector import DetectionModel, plan_corrections
from procslip.loadphase import compute_profile
from procslip.planner import PlannerConfig, plan_errors
from procslip.semrep import complexity
from procslip.synthdata import make_procedure


def main():
    proc, cache, semreps = make_procedure("demo", n_steps=14, seed=42)
    durations = [s.duration for s in proc.steps]
    complexities = [complexity(semreps[i]) for i in range(len(proc))]
    profile = compute_profile(durations, complexities)

    print("== load profile ==")
    for step, load, phase in zip(proc.steps, profile.loads, profile.phases):
        print(f"{step.index:2d} {phase}  load={load:.2f}  {step.text}")

    config = PlannerConfig(seed=42)
    rng = np.random.default_rng(42)
    plan = plan_errors(proc, semreps, profile, config, rng=rng)
    plan_corrections(plan, proc, profile, DetectionModel(), semreps=semreps, rng=rng)

    print("\n== planned errors ==")
    for e in plan.errors:
        print(f"{e.error_id} {e.type:2s} at step {e.target} severity={e.severity} "
              f"payload={e.payload}")

    print("\n== planned corrections ==")
    if not plan.corrections:
        print("(none detected this run)")
    for c in plan.corrections:
        print(f"{c.correction_id} {c.type} for {c.trigger_error_id} "
              f"at position {c.position} (latency {c.latency})")


if __name__ == "__main__":
    main()
