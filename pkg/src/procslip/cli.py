"""Command-line driver: simulate, write, judge, audit, alpha, export, serve."""

from __future__ import annotations

import glob
import json
import os
import sys

import click

from .corpusio import GenerationRecord, export_benchmark, load_procedures
from .corrector import DetectionModel
from .llm import MockGenerationClient, RemoteGenerationClient, judge_and_repair, write_trace
from .pipeline import RunConfig, plan_procedure
from .planner import Plan, PlannerConfig
from .rubric import audit as rubric_audit
from .rubric import alpha_matrix, krippendorff_alpha, ALPHA_LEVELS, METRICS, load_annotations
from .semrep import SemRepCache
from .tracemodel import EditedTrace, validate_trace, video_edit_plan


def _load_inputs(procedures_path, cache_path):
    cache = SemRepCache.load(cache_path) if cache_path else None
    procedures, unresolved = load_procedures(procedures_path, semrep_cache=cache)
    if unresolved:
        click.echo(f"warning: {len(unresolved)} steps without a resolvable representation",
                   err=True)
    semreps_by_proc = {}
    for proc in procedures:
        semreps = {}
        if cache is not None:
            for step in proc.steps:
                if step.semrep_id in cache.reps:
                    semreps[step.index] = cache.reps[step.semrep_id]
        semreps_by_proc[proc.proc_id] = semreps
    return procedures, semreps_by_proc, cache


def _run_config(seed, detection_config):
    detection = DetectionModel.load(detection_config) if detection_config else DetectionModel()
    return RunConfig(seed=seed, planner=PlannerConfig(seed=seed), detection=detection)


def _make_client(name, base_url=None, model=None, audit_dir=None):
    if name == "mock":
        return MockGenerationClient()
    if name == "remote":
        if not base_url or not model:
            raise click.UsageError("--base-url and --model are required for the remote client")
        return RemoteGenerationClient(base_url, model, audit_dir=audit_dir)
    raise click.UsageError(f"unknown client {name!r}")


@click.group()
def main():
    """Mistake/correction injection pipeline for procedural step traces."""


@main.command()
@click.option("--procedures", "procedures_path", required=True, type=click.Path())
@click.option("--semrep-cache", "cache_path", type=click.Path())
@click.option("--out-dir", required=True, type=click.Path())
@click.option("--seed", default=0, show_default=True)
@click.option("--detection-config", type=click.Path())
def simulate(procedures_path, cache_path, out_dir, seed, detection_config):
    """Plan errors and corrections; one plan file per procedure."""
    try:
        procedures, semreps_by_proc, _ = _load_inputs(procedures_path, cache_path)
    except Exception as exc:
        raise click.ClickException(str(exc))
    config = _run_config(seed, detection_config)
    os.makedirs(out_dir, exist_ok=True)
    for k, proc in enumerate(procedures):
        plan, _ = plan_procedure(proc, semreps_by_proc[proc.proc_id], config, seed=seed + k)
        with open(os.path.join(out_dir, f"{proc.proc_id}.plan.json"), "w") as fh:
            json.dump(plan.to_dict(), fh, indent=2, sort_keys=True)
    click.echo(f"planned {len(procedures)} procedures -> {out_dir}")


@main.command()
@click.option("--procedures", "procedures_path", required=True, type=click.Path())
@click.option("--semrep-cache", "cache_path", type=click.Path())
@click.option("--plans-dir", required=True, type=click.Path())
@click.option("--out-dir", required=True, type=click.Path())
@click.option("--client", default="mock", show_default=True)
@click.option("--base-url")
@click.option("--model")
@click.option("--audit-dir", type=click.Path())
def write(procedures_path, cache_path, plans_dir, out_dir, client, base_url, model, audit_dir):
    """Realize plans into edited traces."""
    procedures, semreps_by_proc, _ = _load_inputs(procedures_path, cache_path)
    gen = _make_client(client, base_url, model, audit_dir)
    os.makedirs(out_dir, exist_ok=True)
    for proc in procedures:
        plan_path = os.path.join(plans_dir, f"{proc.proc_id}.plan.json")
        if not os.path.exists(plan_path):
            continue
        with open(plan_path) as fh:
            plan = Plan.from_dict(json.load(fh))
        trace = write_trace(proc, plan, semreps_by_proc[proc.proc_id], gen)
        with open(os.path.join(out_dir, f"{proc.proc_id}.trace.json"), "w") as fh:
            json.dump(trace.to_contract(), fh, indent=2)
    click.echo(f"wrote traces -> {out_dir}")


@main.command()
@click.option("--procedures", "procedures_path", required=True, type=click.Path())
@click.option("--semrep-cache", "cache_path", type=click.Path())
@click.option("--plans-dir", required=True, type=click.Path())
@click.option("--traces-dir", required=True, type=click.Path())
@click.option("--out-dir", required=True, type=click.Path())
@click.option("--client", default="mock", show_default=True)
@click.option("--base-url")
@click.option("--model")
@click.option("--max-rounds", default=3, show_default=True)
def judge(procedures_path, cache_path, plans_dir, traces_dir, out_dir,
          client, base_url, model, max_rounds):
    """Validate traces against their plans, repairing within a bounded loop."""
    procedures, semreps_by_proc, _ = _load_inputs(procedures_path, cache_path)
    gen = _make_client(client, base_url, model)
    os.makedirs(out_dir, exist_ok=True)
    failed = 0
    for proc in procedures:
        plan_path = os.path.join(plans_dir, f"{proc.proc_id}.plan.json")
        trace_path = os.path.join(traces_dir, f"{proc.proc_id}.trace.json")
        if not (os.path.exists(plan_path) and os.path.exists(trace_path)):
            continue
        with open(plan_path) as fh:
            plan = Plan.from_dict(json.load(fh))
        with open(trace_path) as fh:
            trace = EditedTrace.from_contract(json.load(fh))
        outcome = judge_and_repair(trace, plan, proc, gen, max_rounds=max_rounds,
                                   semreps=semreps_by_proc[proc.proc_id])
        with open(os.path.join(out_dir, f"{proc.proc_id}.trace.json"), "w") as fh:
            json.dump(outcome.trace.to_contract(), fh, indent=2)
        with open(os.path.join(out_dir, f"{proc.proc_id}.judge.json"), "w") as fh:
            json.dump({
                "status": outcome.status,
                "rounds_used": outcome.rounds_used,
                "violations": [[v.code, v.position, v.message]
                               for v in outcome.reports[-1].violations],
            }, fh, indent=2)
        if outcome.status == "failed":
            failed += 1
    click.echo(f"judged traces -> {out_dir} ({failed} failed)")
    if failed:
        sys.exit(1)


@main.command()
@click.option("--procedures", "procedures_path", required=True, type=click.Path())
@click.option("--plans-dir", required=True, type=click.Path())
@click.option("--traces-dir", required=True, type=click.Path())
@click.option("--out-dir", required=True, type=click.Path())
def export(procedures_path, plans_dir, traces_dir, out_dir):
    """Bundle plans, traces, and edit windows into a benchmark directory."""
    procedures, _ = load_procedures(procedures_path)
    records = []
    for proc in procedures:
        plan_path = os.path.join(plans_dir, f"{proc.proc_id}.plan.json")
        trace_path = os.path.join(traces_dir, f"{proc.proc_id}.trace.json")
        if not (os.path.exists(plan_path) and os.path.exists(trace_path)):
            continue
        with open(plan_path) as fh:
            plan_data = json.load(fh)
        with open(trace_path) as fh:
            trace_data = json.load(fh)
        plan = Plan.from_dict(plan_data)
        trace = EditedTrace.from_contract(trace_data)
        edit = video_edit_plan(trace, plan, proc)
        records.append(GenerationRecord(
            procedure=proc, plan=plan_data, trace=trace_data,
            edit_plan=[w.to_dict() for w in edit.windows],
            provenance={"edit_plan_diagnostics": edit.diagnostics},
        ))
    manifest = export_benchmark(records, out_dir)
    totals = manifest["totals"]
    click.echo(f"exported {totals['videos']} records; "
               f"mistakes/video={totals['mistakes_per_video']:.2f}")


@main.command()
@click.option("--annotations", "annotations_path", required=True, type=click.Path())
@click.option("--out", "out_path", type=click.Path())
def audit(annotations_path, out_path):
    """Aggregate annotations into per-metric statistics and agreement."""
    annotations = load_annotations(annotations_path)
    report = rubric_audit(annotations)
    click.echo(report.table())
    if out_path:
        with open(out_path, "w") as fh:
            json.dump(report.to_dict(), fh, indent=2)


@main.command()
@click.option("--annotations", "annotations_path", required=True, type=click.Path())
def alpha(annotations_path):
    """Krippendorff's alpha per metric."""
    annotations = load_annotations(annotations_path)
    for metric in METRICS:
        matrix = alpha_matrix(annotations, metric)
        try:
            value = krippendorff_alpha(matrix, ALPHA_LEVELS[metric])
            click.echo(f"{metric:24s} {value:.3f} ({ALPHA_LEVELS[metric]})")
        except ValueError:
            click.echo(f"{metric:24s} --")


@main.command()
@click.option("--records-dir", required=True, type=click.Path())
@click.option("--roster", "roster_path", required=True, type=click.Path(),
              help="JSON mapping rater token -> rater id")
@click.option("--log", "log_path", required=True, type=click.Path())
@click.option("--static-dir", type=click.Path())
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8901, show_default=True)
def serve(records_dir, roster_path, log_path, static_dir, host, port):
    """Run the annotation HTTP service."""
    import uvicorn

    from .service import create_app

    with open(roster_path) as fh:
        roster = json.load(fh)
    app = create_app(records_dir, roster, log_path, static_dir=static_dir)
    uvicorn.run(app, host=host, port=port)


@main.command("export-annotations")
@click.option("--log", "log_path", required=True, type=click.Path())
@click.option("--out", "out_path", required=True, type=click.Path())
def export_annotations(log_path, out_path):
    """Flatten the service event log into an audit-ready annotation file."""
    from .service import export_annotations_csv

    export_annotations_csv(log_path, out_path)
    click.echo(f"annotations -> {out_path}")


if __name__ == "__main__":
    main()
