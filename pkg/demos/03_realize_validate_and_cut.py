"""Realize a plan into an edited trace, validate it, and plan edit windows.

Run with: python3 demos/03_realize_validate_and_cut.py
"""

from procslip.llm import MockGenerationClient, judge_and_repair, write_trace
from procslip.pipeline import RunConfig, plan_procedure
from procslip.synthdata import make_procedure
from procslip.tracemodel import video_edit_plan


def main():
    proc, cache, semreps = make_procedure("demo", n_steps=10, seed=7)
    config = RunConfig(seed=7)
    plan, profile = plan_procedure(proc, semreps, config)

    client = MockGenerationClient()
    trace = write_trace(proc, plan, semreps, client)
    outcome = judge_and_repair(trace, plan, proc, client, semreps=semreps)
    print(f"judge status: {outcome.status} (rounds used: {outcome.rounds_used})")

    print("\n== edited trace ==")
    for step in outcome.trace.final_steps:
        tag = step.error_id or step.correction_id or ""
        print(f"{step.mod:2s} {tag:4s} | {step.text}")
    for idx, eid in outcome.trace.deletions:
        print(f"-- {eid:4s} | (deleted original step {idx})")

    result = video_edit_plan(outcome.trace, plan, proc)
    print("\n== video edit windows ==")
    for w in result.windows:
        print(f"{w.kind:18s} span={w.span} "
              f"[{w.anchor_before:7.1f}s -> {w.anchor_after:7.1f}s] "
              f"duration={w.target_duration:.1f}s")
    if result.diagnostics:
        print("diagnostics:", result.diagnostics)


if __name__ == "__main__":
    main()
