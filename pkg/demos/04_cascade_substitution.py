"""Acquisition-substitution cascade: swap what gets fetched early and watch
every later reference follow.

Run with: python3 demos/04_cascade_substitution.py
"""

from procslip.loadphase import compute_profile
from procslip.planner import ErrorEvent, Plan, PlannerConfig
from procslip.synthdata import cucumber_scenario
from procslip.tracemodel import realize_with_templates, validate_trace


def main():
    proc, cache, semreps = cucumber_scenario()
    error = ErrorEvent(
        target=0,
        type="S",
        payload={"substitute_index": None,
                 "substitute_text": "Get bell pepper from the refrigerator"},
        severity="high",
        error_id="E01",
    )
    profile = compute_profile([s.duration for s in proc.steps],
                              list(range(len(proc))))
    plan = Plan([error], [], 0, PlannerConfig().to_dict(), profile.to_dict())

    trace = realize_with_templates(proc, plan, semreps)
    print("rewrite map:", trace.rewrite_map)
    print()
    for original, step in zip(proc.steps, trace.final_steps):
        marker = "->" if step.mod != "u" else "  "
        print(f"{step.mod:2s} {marker} {step.text}")

    report = validate_trace(trace, plan, proc)
    print("\nvalidation:", "clean" if report.ok else report.codes())


if __name__ == "__main__":
    main()
