import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from procslip.loadphase import compute_profile, phase_multipliers
from procslip.planner import (
    DEFAULT_TYPE_PRIORS,
    ERROR_TYPES,
    PlannerConfig,
    Plan,
    _has_long_run,
    location_weights,
    plan_errors,
    sample_error_count,
    sample_error_locations,
    sample_error_type,
    sample_roles,
    transposition_partners,
    type_modifiers,
)
from procslip.semrep import RoleImpactMap, build_role_priors, parse
from procslip.synthdata import make_procedure

from conftest import make_simple_procedure

_IMPACT_ORDER = {"low": 0, "medium": 1, "high": 2}


def _profile_for(T, seed=0):
    rng = np.random.default_rng(seed)
    return compute_profile(rng.uniform(2, 40, T), rng.uniform(1, 10, T))


class TestErrorCount:
    def test_bounds_hold(self):
        rng = np.random.default_rng(0)
        config = PlannerConfig()
        counts = [sample_error_count(30, config, rng) for _ in range(2000)]
        assert min(counts) >= 1 and max(counts) <= config.max_errors

    def test_zero_rate_gives_one(self):
        rng = np.random.default_rng(0)
        config = PlannerConfig(error_count_rate=0.0)
        assert all(sample_error_count(30, config, rng) == 1 for _ in range(100))

    def test_rejects_empty_procedure(self):
        with pytest.raises(ValueError):
            sample_error_count(0, PlannerConfig(), np.random.default_rng(0))


class TestLocationWeights:
    def test_formula_matches_manual_oracle(self):
        config = PlannerConfig()
        profile = _profile_for(6)
        mults = dict(zip(("phase_1", "phase_2", "phase_3"),
                         phase_multipliers(config.phase_rates)))
        expected = [
            (0.15 + 0.85 * load) * mults[phase]
            for load, phase in zip(profile.loads, profile.phases)
        ]
        assert np.allclose(location_weights(profile, config), expected)

    def test_floor_keeps_weights_positive(self):
        profile = compute_profile([1, 1, 1], [0, 0, 10])
        w = location_weights(profile, PlannerConfig())
        assert (w > 0).all()


class TestRunConstraint:
    @pytest.mark.parametrize("indices,cap,expected", [
        ([0, 1, 2], 3, False),
        ([0, 1, 2, 3], 3, True),
        ([0, 2, 3, 5], 3, False),
        ([], 3, False),
        ([4], 1, False),
        ([4, 5], 1, True),
    ])
    def test_has_long_run(self, indices, cap, expected):
        assert _has_long_run(indices, cap) is expected

    def test_sampled_locations_respect_cap(self):
        config = PlannerConfig()
        profile = _profile_for(12)
        rng = np.random.default_rng(1)
        for _ in range(200):
            locs = sample_error_locations(profile, 5, config, rng)
            assert locs == sorted(locs)
            assert len(set(locs)) == 5
            assert not _has_long_run(locs, config.max_consecutive)

    def test_infeasible_k_rejected(self):
        profile = _profile_for(3)
        with pytest.raises(ValueError):
            sample_error_locations(profile, 4, PlannerConfig(), np.random.default_rng(0))


class TestTranspositionWindow:
    def test_span_semantics(self):
        config = PlannerConfig()
        partners = transposition_partners(0, 20, config)
        assert partners == [1, 2, 3, 4, 5]
        partners = transposition_partners(10, 20, config)
        assert partners == [5, 6, 7, 8, 9, 11, 12, 13, 14, 15]

    def test_blocked_indices_excluded(self):
        partners = transposition_partners(0, 10, PlannerConfig(), blocked={1, 2})
        assert partners == [3, 4, 5]


class TestTypeSampling:
    def test_deletion_gate_below_min_length(self):
        config = PlannerConfig()
        mods = type_modifiers("phase_1", 4, True, config, set(ERROR_TYPES))
        assert mods["D"] == 0.0
        mods = type_modifiers("phase_1", 5, True, config, set(ERROR_TYPES))
        assert mods["D"] == 1.0

    def test_insertion_bias_on_nonessential(self):
        config = PlannerConfig()
        mods = type_modifiers("phase_2", 10, False, config, set(ERROR_TYPES))
        assert mods["I"] == config.insertion_nonessential_bias

    def test_infeasible_set_raises(self):
        with pytest.raises(ValueError):
            sample_error_type("phase_1", 10, True, PlannerConfig(),
                              np.random.default_rng(0), feasible=())

    def test_normalized_priors_are_table_values(self):
        raw = DEFAULT_TYPE_PRIORS["phase_1"]
        total = sum(raw)
        assert [w / total for w in raw] == [0.35, 0.10, 0.25, 0.20, 0.10]


class TestRoleSampling:
    def test_agent_never_selected(self):
        rep = parse("ADD(Agent: you, Object: salt, Destination: pan)")
        priors = build_role_priors([rep])
        config = PlannerConfig(compound_we_prob=1.0)
        rng = np.random.default_rng(0)
        for _ in range(200):
            roles, _ = sample_roles(rep, priors, RoleImpactMap(), config, rng)
            assert "Agent" not in roles

    def test_severity_is_max_selected_impact(self):
        rep = parse("ADD(Agent: you, Object: salt, Destination: pan, Manner: slowly)")
        priors = build_role_priors([rep])
        impact_map = RoleImpactMap()
        rng = np.random.default_rng(3)
        for _ in range(200):
            roles, severity = sample_roles(rep, priors, impact_map, PlannerConfig(), rng)
            expected = max((impact_map.impact(r) for r in roles), key=_IMPACT_ORDER.get)
            assert severity == expected

    def test_no_mutable_roles_raises(self):
        rep = parse("WAIT(Agent: you)")
        with pytest.raises(ValueError):
            sample_roles(rep, build_role_priors([rep]), RoleImpactMap(),
                         PlannerConfig(), np.random.default_rng(0))


class TestConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            PlannerConfig(location_floor=1.5)
        with pytest.raises(ValueError):
            PlannerConfig(max_errors=0)
        with pytest.raises(ValueError):
            PlannerConfig(type_priors={"phase_1": (0, 1, 1, 1, 1)})

    def test_round_trip_through_dict(self):
        config = PlannerConfig(seed=9)
        rebuilt = PlannerConfig(**config.to_dict())
        assert rebuilt.to_dict() == config.to_dict()


def _assert_plan_constraints(plan, procedure, semreps):
    config = PlannerConfig(**plan.config)
    T = len(procedure)
    assert 1 <= len(plan.errors) <= config.max_errors
    targets = sorted(e.target for e in plan.errors)
    assert len(set(targets)) == len(targets)
    assert not _has_long_run(targets, config.max_consecutive)
    for error in plan.errors:
        assert 0 <= error.target < T
        assert error.type in ERROR_TYPES
        if error.type == "D":
            assert T >= config.min_T_for_deletion
        if error.type == "T":
            span = abs(error.payload["partner"] - error.target)
            assert 1 <= span <= config.transposition_window - 1
        for mut in error.payload.get("mutations", []):
            assert mut["role"] != "Agent"
        if error.type == "WE":
            impact_map = RoleImpactMap()
            expected = max(
                (impact_map.impact(m["role"]) for m in error.payload["mutations"]),
                key=_IMPACT_ORDER.get,
            )
            assert error.severity == expected


class TestPlanErrors:
    def test_deterministic_under_seed(self):
        proc, _, semreps = make_procedure("p", 15, seed=4)
        profile = _profile_for(15, seed=4)
        config = PlannerConfig(seed=11)
        a = plan_errors(proc, semreps, profile, config,
                        rng=np.random.default_rng(11))
        b = plan_errors(proc, semreps, profile, config,
                        rng=np.random.default_rng(11))
        assert a.to_dict() == b.to_dict()

    @settings(max_examples=60, deadline=None)
    @given(T=st.integers(3, 40), seed=st.integers(0, 10_000))
    def test_constraints_hold_on_random_procedures(self, T, seed):
        proc, _, semreps = make_procedure("p", T, seed=seed % 50)
        profile = _profile_for(T, seed=seed % 50)
        config = PlannerConfig(seed=seed)
        plan = plan_errors(proc, semreps, profile, config,
                           rng=np.random.default_rng(seed))
        _assert_plan_constraints(plan, proc, semreps)

    def test_plan_without_semreps_still_valid(self):
        proc = make_simple_procedure(["step %d" % i for i in range(8)])
        profile = _profile_for(8)
        plan = plan_errors(proc, {}, profile, PlannerConfig(seed=2))
        _assert_plan_constraints(plan, proc, {})
        assert all(e.type != "WE" for e in plan.errors)

    def test_serialization_round_trip(self):
        proc, _, semreps = make_procedure("p", 12, seed=1)
        profile = _profile_for(12, seed=1)
        plan = plan_errors(proc, semreps, profile, PlannerConfig(seed=5))
        rebuilt = Plan.from_dict(plan.to_dict())
        assert rebuilt.to_dict() == plan.to_dict()
