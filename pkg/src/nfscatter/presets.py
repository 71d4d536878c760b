"""Scenario presets and the parameter-sweep description."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

from .model import (
    MirrorSpec,
    PulseSpec,
    SampleSpec,
    ScenarioConfig,
    ScheduleEvent,
    ScenarioError,
    build_schedule,
    delta_b_from_gamma,
    derived_timings,
)

SWEEP_AXES = ("xi", "R", "delta_B", "tau")


def gated_mirror_scenario(
    xi: float = 1.0,
    reflectivity: float = 0.99,
    delta_b_in_gamma: float = 30.0,
    invert: bool = False,
    reon_level: float | None = None,
    snapshots: Sequence[float] = (),
    t_on: float = 100.0,
    t_end: float = 200.0,
    dt: float = 0.005,
    n_depth: int = 201,
    area: float = 1e-3,
    disable_time: float | None = None,
) -> ScenarioConfig:
    """Storage/retrieval protocol scenario built from the splitting.

    The mirror sits half a beat period away (round trip tau = pi/delta_b),
    its reflection is disabled just after the prompt pulse reaches it, the
    field switches off at the second beat node and back on at ``t_on``.
    ``invert`` adds the field inversion at the first beat node, which flips
    the retrieved relative phase from 0 to pi.  ``reon_level`` overrides
    the restored level (default: the level in force before switch-off).
    """
    delta_b = delta_b_from_gamma(delta_b_in_gamma)
    timings = derived_timings(delta_b)
    if disable_time is None:
        # just after the prompt reflection, before any delayed signal arrives
        disable_time = 0.5 * timings.tau + 0.002
    events = []
    if invert:
        events.append(ScheduleEvent(timings.t_invert, "invert"))
    events.append(ScheduleEvent(timings.t_off, "off"))
    events.append(ScheduleEvent(t_on, "on", reon_level))
    return ScenarioConfig(
        sample=SampleSpec(xi=xi, n_depth=n_depth),
        pulse=PulseSpec(mode="impulsive", area=area),
        mirror=MirrorSpec(present=True, reflectivity=reflectivity,
                          delay_tau=timings.tau, disable_time=disable_time),
        schedule=build_schedule(events, initial_level=delta_b),
        t_end=t_end,
        dt=dt,
        record_snapshots_at=tuple(snapshots),
    )


def single_pass_scenario(
    xi: float = 0.01,
    delta_b_in_gamma: float = 30.0,
    t_end: float = 160.0,
    dt: float = 0.005,
    n_depth: int = 201,
    area: float = 1e-3,
) -> ScenarioConfig:
    """Thin slab, no mirror, constant field: the first-order reference case."""
    from .model import HyperfineSchedule

    return ScenarioConfig(
        sample=SampleSpec(xi=xi, n_depth=n_depth),
        pulse=PulseSpec(mode="impulsive", area=area),
        mirror=MirrorSpec(present=False, reflectivity=0.0, delay_tau=0.0),
        schedule=HyperfineSchedule.constant(delta_b_from_gamma(delta_b_in_gamma)),
        t_end=t_end,
        dt=dt,
    )


# t_d pinned at 7.39 ns: the prompt reaches the mirror at tau/2 ~ 7.388 ns,
# so the gate barely admits its reflection and nothing else
_FIG_DISABLE_NS = 7.39

PRESETS = {
    "fig2a": (
        "gated mirror, storage at 22.16 ns, retrieval at 100 ns (intensity view)",
        lambda: gated_mirror_scenario(disable_time=_FIG_DISABLE_NS),
    ),
    "fig2b": (
        "same protocol, storage-window snapshot; retrieved branches in phase (symmetric)",
        lambda: gated_mirror_scenario(disable_time=_FIG_DISABLE_NS, snapshots=(60.0,)),
    ),
    "fig2c": (
        "adds the field inversion at 7.39 ns; retrieved branches out of phase (antisymmetric)",
        lambda: gated_mirror_scenario(disable_time=_FIG_DISABLE_NS, invert=True, snapshots=(60.0,)),
    ),
    "single_pass": (
        "thin slab, no mirror, constant field (first-order reference)",
        lambda: single_pass_scenario(),
    ),
}


def preset_scenario(name: str) -> ScenarioConfig:
    try:
        return PRESETS[name][1]()
    except KeyError:
        raise ScenarioError(f"unknown preset {name!r}; known: {', '.join(PRESETS)}") from None


@dataclass(frozen=True)
class SweepSpec:
    """One-axis parameter sweep over a base preset."""

    axis: str
    values: tuple[float, ...]
    base: str = "fig2b"

    def __post_init__(self) -> None:
        if self.axis not in SWEEP_AXES:
            raise ScenarioError(f"sweep axis must be one of {SWEEP_AXES} (got {self.axis!r})")
        if not self.values:
            raise ScenarioError("sweep needs at least one value")

    def scenario_for(self, value: float) -> ScenarioConfig:
        """Scenario for one swept value; delta_B values are in multiples of gamma."""
        if self.axis == "delta_B":
            if self.base not in ("fig2a", "fig2b", "fig2c"):
                raise ScenarioError("delta_B sweeps rebuild the protocol and need a fig2* base")
            return gated_mirror_scenario(
                delta_b_in_gamma=value,
                invert=(self.base == "fig2c"),
                snapshots=(60.0,) if self.base in ("fig2b", "fig2c") else (),
            )
        base = preset_scenario(self.base)
        if self.axis == "xi":
            return replace(base, sample=replace(base.sample, xi=value))
        if self.axis == "R":
            return replace(base, mirror=replace(base.mirror, reflectivity=value))
        return replace(base, mirror=replace(base.mirror, delay_tau=value))
