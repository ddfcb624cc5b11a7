"""Per-step load, phase assignment, and phase error-rate multipliers.

load(t) = w_c * complexity_hat(t) + w_t * duration_hat(t), with both signals
min-max normalized within the procedure. Cumulative load is split into
thirds to assign phase_1/phase_2/phase_3, and per-phase error rates are
normalized into multipliers with mean 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

PHASES = ("phase_1", "phase_2", "phase_3")

# Relative phase error rates; mid-procedure slips dominate.
DEFAULT_PHASE_RATES = (0.10, 0.19, 0.14)


@dataclass
class LoadProfile:
    durations_hat: np.ndarray
    complexities_hat: np.ndarray
    loads: np.ndarray
    phases: list = field(default_factory=list)
    w_c: float = 0.5
    w_t: float = 0.5

    def to_dict(self):
        return {
            "loads": [float(x) for x in self.loads],
            "phases": list(self.phases),
            "w_c": self.w_c,
            "w_t": self.w_t,
        }


def _minmax(values):
    arr = np.asarray(values, dtype=float)
    lo, hi = arr.min(), arr.max()
    if hi == lo:
        # Constant signal carries no ranking information; park it mid-scale.
        return np.full_like(arr, 0.5)
    return (arr - lo) / (hi - lo)


def step_load(durations, complexities, w_c=0.5, w_t=0.5):
    """Compute normalized loads for one procedure. Phases are not assigned."""
    if len(durations) == 0:
        raise ValueError("procedure must have at least one step")
    if len(durations) != len(complexities):
        raise ValueError("durations and complexities must align")
    if w_c < 0 or w_t < 0 or abs((w_c + w_t) - 1.0) > 1e-9:
        raise ValueError("weights must be nonnegative and sum to 1")
    if any(d < 0 for d in durations):
        raise ValueError("durations must be nonnegative")
    d_hat = _minmax(durations)
    c_hat = _minmax(complexities)
    loads = w_c * c_hat + w_t * d_hat
    return LoadProfile(d_hat, c_hat, loads, phases=[], w_c=w_c, w_t=w_t)


def assign_phases(loads):
    """Split cumulative load into thirds; step t is phase_1 while cum <= L/3 etc.

    The first step is always phase_1 and, for T >= 2, the last step is always
    phase_3, so every procedure touches both ends of the phase axis.
    """
    arr = np.asarray(loads, dtype=float)
    total = arr.sum()
    if total <= 0:
        arr = np.ones_like(arr)
        total = arr.sum()
    cum = np.cumsum(arr)
    phases = []
    for c in cum:
        if c <= total / 3 + 1e-12:
            phases.append("phase_1")
        elif c <= 2 * total / 3 + 1e-12:
            phases.append("phase_2")
        else:
            phases.append("phase_3")
    phases[0] = "phase_1"
    if len(phases) >= 2:
        phases[-1] = "phase_3"
    return phases


def phase_multipliers(rates=DEFAULT_PHASE_RATES):
    """Normalize per-phase rates to multipliers with mean exactly 1."""
    arr = np.asarray(rates, dtype=float)
    if arr.shape != (3,):
        raise ValueError("expected one rate per phase")
    if (arr <= 0).any():
        raise ValueError("phase rates must be positive")
    return tuple(arr / arr.mean())


def compute_profile(durations, complexities, w_c=0.5, w_t=0.5):
    """step_load + assign_phases in one call."""
    profile = step_load(durations, complexities, w_c=w_c, w_t=w_t)
    profile.phases = assign_phases(profile.loads)
    return profile
