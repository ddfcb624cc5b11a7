"""Error plan sampling: how many mistakes, where, which type, which payload.

The planner is conditioned on per-step load and phase (see loadphase) and on
role statistics from the representation corpus (see semrep). Hard
feasibility constraints keep the emitted plans non-degenerate: at most
max_errors events, no long runs of adjacent error steps, no deletions in
very short procedures, transpositions restricted to a local window, and
Agent never mutated.
"""

from __future__ import annotations

from dataclasses import dataclass, field, asdict

import numpy as np

from .loadphase import PHASES, DEFAULT_PHASE_RATES, phase_multipliers

ERROR_TYPES = ("WE", "D", "S", "I", "T")

# Unnormalized phase-conditioned type weights over (WE, D, S, I, T).
DEFAULT_TYPE_PRIORS = {
    "phase_1": (3.5, 1.0, 2.5, 2.0, 1.0),
    "phase_2": (2.0, 2.0, 1.5, 2.5, 2.0),
    "phase_3": (3.5, 2.5, 1.0, 2.0, 1.0),
}

DEFAULT_IMPACT_WEIGHTS = {"high": 3.0, "medium": 2.0, "low": 1.0}

INSERTION_INTENTS = (
    "unnecessary_repetition",
    "extra_check",
    "redundant_cleaning",
    "irrelevant_adjustment",
)

_IMPACT_ORDER = {"low": 0, "medium": 1, "high": 2}


@dataclass
class PlannerConfig:
    location_floor: float = 0.15          # lambda in the location weights
    max_errors: int = 5
    max_consecutive: int = 3
    transposition_window: int = 6         # span; partners satisfy 1 <= |i-j| <= window-1
    min_T_for_deletion: int = 5           # deletion disallowed when T <= 4
    type_priors: dict = field(default_factory=lambda: dict(DEFAULT_TYPE_PRIORS))
    impact_weights: dict = field(default_factory=lambda: dict(DEFAULT_IMPACT_WEIGHTS))
    error_count_rate: float = 0.075       # rho_K in K = 1 + Poisson(rho_K * T)
    compound_we_prob: float = 0.15        # chance of mutating two roles at once
    insertion_nonessential_bias: float = 1.5
    phase_rates: tuple = DEFAULT_PHASE_RATES
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.location_floor <= 1.0:
            raise ValueError("location_floor must lie in [0, 1]")
        if self.max_errors < 1:
            raise ValueError("max_errors must be >= 1")
        for phase, weights in self.type_priors.items():
            if any(w <= 0 for w in weights):
                raise ValueError(f"type prior weights for {phase} must be positive")

    def to_dict(self):
        data = asdict(self)
        data["phase_rates"] = list(self.phase_rates)
        data["type_priors"] = {k: list(v) for k, v in self.type_priors.items()}
        return data


@dataclass
class ErrorEvent:
    target: int
    type: str
    payload: dict
    severity: str
    error_id: str

    def to_dict(self):
        return {
            "target": self.target,
            "type": self.type,
            "payload": self.payload,
            "severity": self.severity,
            "error_id": self.error_id,
        }


@dataclass
class Plan:
    errors: list
    corrections: list
    seed: int
    config: dict
    load_profile: dict

    def to_dict(self):
        return {
            "errors": [e.to_dict() for e in self.errors],
            "corrections": [c.to_dict() for c in self.corrections],
            "seed": self.seed,
            "config": self.config,
            "load_profile": self.load_profile,
        }

    @classmethod
    def from_dict(cls, data):
        from .corrector import CorrectionEvent

        errors = [
            ErrorEvent(e["target"], e["type"], e["payload"], e["severity"], e["error_id"])
            for e in data["errors"]
        ]
        corrections = [
            CorrectionEvent(c["position"], c["type"], c["trigger_error_id"],
                            c["repair_target"], c["latency"], c["correction_id"])
            for c in data.get("corrections", [])
        ]
        return cls(errors, corrections, data.get("seed", 0),
                   data.get("config", {}), data.get("load_profile", {}))


def sample_error_count(T, config, rng):
    """K = min(max_errors, 1 + Poisson(rho_K * T)); always at least one."""
    if T < 1:
        raise ValueError("T must be >= 1")
    draw = int(rng.poisson(config.error_count_rate * T))
    return max(1, min(config.max_errors, 1 + draw))


def location_weights(profile, config):
    """Eq-style weights: (floor + (1-floor)*load) * phase multiplier."""
    mults = dict(zip(PHASES, phase_multipliers(config.phase_rates)))
    lam = config.location_floor
    loads = np.asarray(profile.loads, dtype=float)
    phase_m = np.array([mults[p] for p in profile.phases])
    return (lam + (1.0 - lam) * loads) * phase_m


def _has_long_run(indices, max_consecutive):
    """True when more than max_consecutive adjacent step indices are chosen."""
    if not indices:
        return False
    run = 1
    for a, b in zip(indices, indices[1:]):
        run = run + 1 if b == a + 1 else 1
        if run > max_consecutive:
            return True
    return False


def sample_error_locations(profile, K, config, rng, max_attempts=200):
    """Sample K distinct step indices by load weight, rejecting long runs.

    Returns sorted indices; raises ValueError when even K=1 is infeasible.
    Callers should degrade K on failure (plan_errors does).
    """
    T = len(profile.loads)
    if K > T:
        raise ValueError("K exceeds procedure length")
    weights = location_weights(profile, config)
    for _ in range(max_attempts):
        w = weights.copy()
        chosen = []
        for _ in range(K):
            p = w / w.sum()
            idx = int(rng.choice(T, p=p))
            chosen.append(idx)
            w[idx] = 0.0
        chosen.sort()
        if not _has_long_run(chosen, config.max_consecutive):
            return chosen
    raise ValueError("could not satisfy the consecutive-run constraint")


def transposition_partners(t, T, config, blocked=()):
    """Feasible swap partners for an error at step t."""
    span = config.transposition_window - 1
    return [
        j for j in range(max(0, t - span), min(T, t + span + 1))
        if j != t and abs(j - t) <= span and j not in blocked
    ]


def type_modifiers(phase, T, essential, config, feasible):
    """Feasibility/bias modifier per type; 0 disables a type entirely."""
    mods = {}
    for tau in ERROR_TYPES:
        if tau not in feasible:
            mods[tau] = 0.0
        elif tau == "D" and T < config.min_T_for_deletion:
            mods[tau] = 0.0
        elif tau == "I" and not essential:
            mods[tau] = config.insertion_nonessential_bias
        else:
            mods[tau] = 1.0
    return mods


def sample_error_type(phase, T, essential, config, rng, feasible=ERROR_TYPES):
    """Draw an error type from the phase prior with feasibility modifiers."""
    priors = config.type_priors[phase]
    mods = type_modifiers(phase, T, essential, config, feasible)
    weights = np.array([p * mods[tau] for p, tau in zip(priors, ERROR_TYPES)])
    total = weights.sum()
    if total <= 0:
        raise ValueError("no feasible error type for this step")
    return str(rng.choice(ERROR_TYPES, p=weights / total))


def role_scores(rep, priors, impact_map, config):
    """Unnormalized selection score per mutable role of one step."""
    scores = {}
    for role in impact_map.mutable_roles(rep):
        weight = config.impact_weights[impact_map.impact(role)]
        scores[role] = weight * (0.2 + priors.prior(role, rep.predicate))
    return scores


def sample_roles(rep, priors, impact_map, config, rng):
    """Pick one (occasionally two) roles to mutate; Agent is never eligible."""
    scores = role_scores(rep, priors, impact_map, config)
    if not scores:
        raise ValueError("step has no mutable roles")
    roles = list(scores)
    weights = np.array([scores[r] for r in roles])
    first = str(rng.choice(roles, p=weights / weights.sum()))
    selected = [first]
    if len(roles) > 1 and rng.random() < config.compound_we_prob:
        rest = [r for r in roles if r != first]
        w = np.array([scores[r] for r in rest])
        selected.append(str(rng.choice(rest, p=w / w.sum())))
    severity = max((impact_map.impact(r) for r in selected), key=_IMPACT_ORDER.get)
    return selected, severity


def _pick_mutated_value(role, original, predicate, inventory, rng):
    """Replacement value for a role, preferably seen with the same predicate."""
    by_pred_role, by_role = inventory
    for pool in (by_pred_role.get((predicate, role), []), by_role.get(role, [])):
        candidates = sorted({v for v in pool if v != original})
        if candidates:
            return candidates[int(rng.integers(len(candidates)))]
    return f"different_{original}"


def _substitution_candidates(procedure, t):
    """Steps from the same taxonomy block, falling back to the whole task."""
    step = procedure.steps[t]
    if step.parent_id is not None:
        block = [
            s for s in procedure.steps
            if s.parent_id == step.parent_id and s.index != t and s.text != step.text
        ]
        if block:
            return block
    return [s for s in procedure.steps if s.index != t and s.text != step.text]


def plan_errors(procedure, semreps, profile, config, rng=None):
    """Sample a full error plan for one procedure.

    semreps maps step index -> SemRep (missing entries make WE infeasible for
    that step). Infeasibility is handled by degrading K down to 1.
    """
    from .semrep import RoleImpactMap, build_role_priors

    if rng is None:
        rng = np.random.default_rng(config.seed)
    T = len(procedure)
    impact_map = RoleImpactMap()
    reps = [semreps.get(i) for i in range(T)]
    known = [r for r in reps if r is not None]
    priors = build_role_priors(known) if known else None
    inventory = _build_inventory(known)

    K = sample_error_count(T, config, rng)
    K = min(K, T)
    while True:
        try:
            locations = sample_error_locations(profile, K, config, rng)
            break
        except ValueError:
            if K == 1:
                raise
            K -= 1

    events = []
    taken = set(locations)
    for n, t in enumerate(locations):
        phase = profile.phases[t]
        essential = procedure.steps[t].essential
        feasible = _feasible_types(t, T, reps[t], procedure, config, taken, impact_map)
        tau = sample_error_type(phase, T, essential, config, rng, feasible=feasible)
        error_id = f"E{n + 1:02d}"
        payload, severity = _sample_payload(
            tau, t, T, procedure, reps[t], priors, impact_map, inventory,
            config, rng, taken, essential,
        )
        if tau == "T":
            taken.add(payload["partner"])
        events.append(ErrorEvent(t, tau, payload, severity, error_id))

    return Plan(
        errors=events,
        corrections=[],
        seed=config.seed,
        config=config.to_dict(),
        load_profile=profile.to_dict(),
    )


def _build_inventory(reps):
    by_pred_role = {}
    by_role = {}
    for rep in reps:
        for role, node in rep.roles.items():
            val = node.render()
            by_pred_role.setdefault((rep.predicate, role), []).append(val)
            by_role.setdefault(role, []).append(val)
    return by_pred_role, by_role


def _feasible_types(t, T, rep, procedure, config, taken, impact_map):
    feasible = set(ERROR_TYPES)
    if rep is None or not impact_map.mutable_roles(rep):
        feasible.discard("WE")
    if not transposition_partners(t, T, config, blocked=taken):
        feasible.discard("T")
    if rep is None and not _substitution_candidates(procedure, t):
        feasible.discard("S")
    return feasible


def _sample_payload(tau, t, T, procedure, rep, priors, impact_map, inventory,
                    config, rng, taken, essential):
    if tau == "D":
        return {}, "high" if essential else "medium"
    if tau == "T":
        partners = transposition_partners(t, T, config, blocked=taken)
        partner = partners[int(rng.integers(len(partners)))]
        return {"partner": partner}, "medium"
    if tau == "I":
        intent = INSERTION_INTENTS[int(rng.integers(len(INSERTION_INTENTS)))]
        return {"anchor": t, "intent": intent}, "low"
    if tau == "WE":
        roles, severity = sample_roles(rep, priors, impact_map, config, rng)
        mutations = []
        for role in roles:
            original = rep.roles[role].render()
            mutated = _pick_mutated_value(role, original, rep.predicate, inventory, rng)
            mutations.append({"role": role, "original": original, "mutated": mutated})
        return {"mutations": mutations}, severity
    if tau == "S":
        candidates = _substitution_candidates(procedure, t)
        if candidates:
            sub = candidates[int(rng.integers(len(candidates)))]
            return {"substitute_index": sub.index, "substitute_text": sub.text}, "high"
        # No step-level candidate: fall back to a role-level substitution.
        roles, severity = sample_roles(rep, priors, impact_map, config, rng)
        role = roles[0]
        original = rep.roles[role].render()
        mutated = _pick_mutated_value(role, original, rep.predicate, inventory, rng)
        payload = {"mutations": [{"role": role, "original": original, "mutated": mutated}]}
        return payload, impact_map.impact(role)
    raise ValueError(f"unknown error type {tau!r}")
