"""Forward/backward resonant x-ray scattering off a thin nuclear slab.

Simulates a single-photon pulse exciting a hyperfine-split resonant slab
whose re-emission is steered by a gated normal-incidence mirror and a
switchable hyperfine field: generation, node-timed storage and retrieval of
a two-branch collective excitation, with diagnostics for branch balance,
relative phase and the sub-angstrom standing-wave excitation pattern.
"""

from .model import (
    DEFAULT_GAMMA,
    HyperfineSchedule,
    MirrorSpec,
    PhysConsts,
    ProtocolTimings,
    PulseSpec,
    SampleSpec,
    ScenarioConfig,
    ScenarioError,
    ScheduleEvent,
    Segment,
    ValidatedScenario,
    build_schedule,
    delta_b_from_gamma,
    derived_timings,
    validate_scenario,
)
from .oracles import OracleCurve, envelope_attenuation, first_order_amplitude, relative_l2
from .solver import (
    CoherenceSnapshot,
    NumericalError,
    SolverState,
    TraceSet,
    apply_impulse,
    bloch_step,
    field_sweep,
    gaussian_input,
    init_state,
    mirror_feedback,
    run_scenario,
)
from .analysis import (
    EntanglementReport,
    ExcitationPattern,
    IntensitySeries,
    beat_period,
    entanglement_report,
    excitation_pattern,
    intensities,
    per_depth_density,
    storage_suppression,
)
from .presets import PRESETS, SweepSpec, gated_mirror_scenario, preset_scenario, single_pass_scenario

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_GAMMA",
    "PhysConsts", "SampleSpec", "PulseSpec", "MirrorSpec",
    "Segment", "HyperfineSchedule", "ScheduleEvent", "ProtocolTimings",
    "ScenarioConfig", "ValidatedScenario", "ScenarioError",
    "build_schedule", "derived_timings", "validate_scenario", "delta_b_from_gamma",
    "OracleCurve", "first_order_amplitude", "envelope_attenuation", "relative_l2",
    "SolverState", "TraceSet", "CoherenceSnapshot", "NumericalError",
    "init_state", "apply_impulse", "bloch_step", "field_sweep", "mirror_feedback",
    "gaussian_input", "run_scenario",
    "IntensitySeries", "EntanglementReport", "ExcitationPattern",
    "intensities", "entanglement_report", "excitation_pattern", "per_depth_density",
    "storage_suppression", "beat_period",
    "PRESETS", "SweepSpec", "preset_scenario", "gated_mirror_scenario", "single_pass_scenario",
]
