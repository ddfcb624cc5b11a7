import json

import numpy as np
import pytest

from procslip.corrector import DetectionModel, plan_corrections
from procslip.llm import (
    GenerationClient,
    JudgeOutcome,
    MockGenerationClient,
    RemoteGenerationClient,
    WriterError,
    generate_semrep,
    judge_and_repair,
    write_trace,
)
from procslip.loadphase import compute_profile
from procslip.planner import PlannerConfig, plan_errors
from procslip.semrep import SemRepCache, parse
from procslip.synthdata import make_procedure
from procslip.tracemodel import EditedTrace, TraceStep, validate_trace


def _setup(seed=0, T=12):
    proc, cache, semreps = make_procedure(f"p{seed}", T, seed=seed)
    profile = compute_profile([s.duration for s in proc.steps], list(range(T)))
    rng = np.random.default_rng(seed)
    plan = plan_errors(proc, semreps, profile, PlannerConfig(seed=seed), rng=rng)
    plan_corrections(plan, proc, profile, DetectionModel(), semreps=semreps, rng=rng)
    return proc, cache, semreps, plan


class GarbageClient(GenerationClient):
    def __init__(self):
        self.calls = 0
        self.seen_parts = []

    def submit(self, parts, schema, params=None):
        self.calls += 1
        self.seen_parts.append(parts)
        return "not json at all"


class TestMockWriter:
    def test_write_trace_is_contract_conformant(self):
        proc, _, semreps, plan = _setup()
        client = MockGenerationClient()
        trace = write_trace(proc, plan, semreps, client)
        assert isinstance(trace, EditedTrace)
        assert validate_trace(trace, plan, proc).ok
        assert client.calls == 1

    def test_writer_error_preserves_raw_output(self):
        proc, _, semreps, plan = _setup()
        client = GarbageClient()
        with pytest.raises(WriterError) as exc:
            write_trace(proc, plan, semreps, client, max_parse_retries=1)
        assert exc.value.raw_output == "not json at all"
        assert client.calls == 2  # initial attempt + one retry


class TestJudgeAndRepair:
    def test_clean_trace_accepted_round_zero(self):
        proc, _, semreps, plan = _setup(1)
        client = MockGenerationClient()
        trace = write_trace(proc, plan, semreps, client)
        outcome = judge_and_repair(trace, plan, proc, client, semreps=semreps)
        assert outcome.status == "accepted"
        assert outcome.rounds_used == 0
        assert client.calls == 1  # no repair submissions

    def test_broken_trace_repaired_by_mock(self):
        proc, _, semreps, plan = _setup(2)
        client = MockGenerationClient()
        trace = write_trace(proc, plan, semreps, client)
        trace.final_steps[0] = TraceStep("Corrupted step", 0, "u")
        outcome = judge_and_repair(trace, plan, proc, client, semreps=semreps)
        assert outcome.status == "repaired"
        assert 1 <= outcome.rounds_used <= 3
        assert validate_trace(outcome.trace, plan, proc).ok

    def test_plan_ids_preserved_across_repair(self):
        proc, _, semreps, plan = _setup(3)
        client = MockGenerationClient()
        trace = write_trace(proc, plan, semreps, client)
        trace.final_steps[0] = TraceStep("Corrupted step", 0, "u")
        outcome = judge_and_repair(trace, plan, proc, client, semreps=semreps)
        realized = {s.error_id for s in outcome.trace.final_steps if s.error_id}
        realized |= {eid for _, eid in outcome.trace.deletions}
        assert realized == {e.error_id for e in plan.errors}

    def test_unrepairable_fails_with_bounded_rounds(self):
        proc, _, semreps, plan = _setup(4)
        mock = MockGenerationClient()
        trace = write_trace(proc, plan, semreps, mock)
        trace.final_steps[0] = TraceStep("Corrupted step", 0, "u")
        garbage = GarbageClient()
        outcome = judge_and_repair(trace, plan, proc, garbage, max_rounds=3)
        assert outcome.status == "failed"
        assert outcome.rounds_used == 3
        assert garbage.calls == 3  # budget: at most max_rounds repair calls

    def test_frame_refs_attached_only_on_last_round(self):
        proc, _, semreps, plan = _setup(5)
        mock = MockGenerationClient()
        trace = write_trace(proc, plan, semreps, mock)
        trace.final_steps[0] = TraceStep("Corrupted step", 0, "u")
        garbage = GarbageClient()
        outcome = judge_and_repair(trace, plan, proc, garbage, max_rounds=3,
                                   frame_refs=["frames/0001.jpg"])
        assert [("frames" in p) for p in garbage.seen_parts] == [False, False, True]
        assert outcome.frame_references == ["frames/0001.jpg"]

    def test_max_rounds_validation(self):
        proc, _, semreps, plan = _setup(6)
        with pytest.raises(ValueError):
            judge_and_repair(EditedTrace([]), plan, proc, MockGenerationClient(),
                             max_rounds=0)


class TestGenerateSemrep:
    def test_cache_hit_makes_no_client_calls(self):
        _, cache, _, _ = _setup(7)
        texts = {sid: entry["step_description"] for sid, entry in cache.entries.items()}
        client = MockGenerationClient()
        entries, rejected = generate_semrep(texts, client, cache=cache)
        assert client.calls == 0
        assert rejected == []
        assert set(entries) == set(texts)

    def test_mock_fallback_parses_and_is_cached(self):
        cache = SemRepCache()
        client = MockGenerationClient()
        entries, rejected = generate_semrep({"s1": "Tighten the bolt firmly"},
                                            client, cache=cache)
        assert rejected == []
        rep = parse(entries["s1"]["semantic_representation"])
        assert rep.predicate == "ACT"
        assert cache.lookup("Tighten the bolt firmly") == "s1"

    def test_mismatched_description_rejected(self):
        class EchoClient(GenerationClient):
            def submit(self, parts, schema, params=None):
                return json.dumps({
                    "s1": {"step_description": "something else",
                           "semantic_representation": "ACT(Agent: you, Object: bolt)"},
                })

        entries, rejected = generate_semrep({"s1": "Tighten the bolt"}, EchoClient())
        assert rejected == ["s1"]
        assert "s1" not in entries

    def test_unparsable_representation_rejected(self):
        class BadRepClient(GenerationClient):
            def submit(self, parts, schema, params=None):
                return json.dumps({
                    "s1": {"step_description": "Tighten the bolt",
                           "semantic_representation": "not a rep("},
                })

        entries, rejected = generate_semrep({"s1": "Tighten the bolt"}, BadRepClient())
        assert rejected == ["s1"]


class TestRemoteClient:
    def test_missing_credential_raises_without_network(self, monkeypatch):
        monkeypatch.delenv("GENERATION_API_KEY", raising=False)
        client = RemoteGenerationClient("https://example.invalid/v1", "some-model")
        with pytest.raises(RuntimeError, match="GENERATION_API_KEY"):
            client.submit({"task": "x"}, schema="trace")

    def test_credential_never_written_to_audit_log(self, monkeypatch, tmp_path):
        monkeypatch.setenv("GENERATION_API_KEY", "supersecretvalue")

        class FakeResponse:
            def raise_for_status(self):
                pass

            def json(self):
                return {"choices": [{"message": {"content": "{}"}}]}

        def fake_post(url, json=None, headers=None, timeout=None):
            return FakeResponse()

        import requests

        monkeypatch.setattr(requests, "post", fake_post)
        client = RemoteGenerationClient("https://example.invalid/v1", "some-model",
                                        audit_dir=str(tmp_path))
        client.submit({"task": "x"}, schema="trace")
        log = (tmp_path / "requests.jsonl").read_text()
        assert "supersecretvalue" not in log
        assert "some-model" in log
