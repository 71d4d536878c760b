"""Domain model: physical constants, scenario description, control schedules.

Units throughout: times in ns, rates and Rabi frequencies in 1/ns, lengths in
micrometers, wave numbers in 1/angstrom.  The hyperfine splitting ``delta_b``
is a signed angular frequency in rad/ns; a value of 0 means "field off".

All types here are frozen dataclasses.  Once a scenario has passed
:func:`validate_scenario` it is immutable and safe to share between threads.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field, replace
from typing import Sequence

HC_KEV_ANGSTROM = 12.39842
FE57_LIFETIME_NS = 141.1
DEFAULT_GAMMA = 1.0 / FE57_LIFETIME_NS

#: time resolution safety factor: dt must resolve the fastest beat
_DT_BEAT_FACTOR = 20.0


class ScenarioError(ValueError):
    """A scenario, schedule or event list violates a model invariant."""


def delta_b_from_gamma(multiple: float, gamma: float = DEFAULT_GAMMA) -> float:
    """Hyperfine splitting given as a multiple of the decay rate, in rad/ns."""
    return multiple * gamma


@dataclass(frozen=True)
class PhysConsts:
    """Constants of the 14.4 keV Moessbauer transition."""

    gamma: float = DEFAULT_GAMMA          # gamma-decay rate of the excited level, 1/ns
    transition_energy_kev: float = 14.413
    clebsch_a: float = math.sqrt(2.0 / 3.0)  # Delta m = 0 transition amplitude

    @property
    def wave_number_k(self) -> float:
        """Photon wave number 2*pi*E/(hc), in 1/angstrom."""
        return 2.0 * math.pi * self.transition_energy_kev / HC_KEV_ANGSTROM

    def validate(self) -> None:
        if not self.gamma > 0.0:
            raise ScenarioError(f"consts.gamma must be > 0 (got {self.gamma})")
        if not self.transition_energy_kev > 0.0:
            raise ScenarioError(
                f"consts.transition_energy_kev must be > 0 (got {self.transition_energy_kev})"
            )
        if abs(self.clebsch_a - math.sqrt(2.0 / 3.0)) > 1e-12:
            raise ScenarioError(
                f"consts.clebsch_a must equal sqrt(2/3) within 1e-12 (got {self.clebsch_a!r})"
            )


@dataclass(frozen=True)
class SampleSpec:
    """Resonant slab: dimensionless effective thickness and geometry."""

    xi: float = 1.0              # effective resonant thickness (optical depth parameter)
    thickness_um: float = 10.0
    n_depth: int = 201           # depth grid points across the slab

    def validate(self) -> None:
        if self.xi < 0.0:
            raise ScenarioError(f"sample.xi must be >= 0 (got {self.xi})")
        if not self.thickness_um > 0.0:
            raise ScenarioError(f"sample.thickness_um must be > 0 (got {self.thickness_um})")
        if self.n_depth < 2:
            raise ScenarioError(f"sample.n_depth must be >= 2 (got {self.n_depth})")


@dataclass(frozen=True)
class PulseSpec:
    """Input x-ray pulse at the front face.

    ``impulsive`` mode deposits the whole pulse area as an instantaneous
    coherence kick (the pulse bandwidth is far broader than the nuclear
    line).  ``gaussian`` mode resolves the envelope on the time grid and is
    used to validate the impulsive limit.
    """

    mode: str = "impulsive"      # "impulsive" | "gaussian"
    area: float = 1e-3           # dimensionless pulse area, << 1 in the linear regime
    fwhm: float | None = None    # ns, gaussian mode only
    t0: float = 0.0              # arrival time at the front face, ns
    linear_regime: bool = True

    def validate(self) -> None:
        if self.mode not in ("impulsive", "gaussian"):
            raise ScenarioError(f"pulse.mode must be 'impulsive' or 'gaussian' (got {self.mode!r})")
        if not self.area > 0.0:
            raise ScenarioError(f"pulse.area must be > 0 (got {self.area})")
        if self.linear_regime and self.area > 1e-3:
            raise ScenarioError(
                f"pulse.area must be <= 1e-3 in the linear regime (got {self.area})"
            )
        if self.mode == "gaussian":
            if self.fwhm is None or not self.fwhm > 0.0:
                raise ScenarioError(f"pulse.fwhm must be > 0 in gaussian mode (got {self.fwhm})")


@dataclass(frozen=True)
class MirrorSpec:
    """Normal-incidence mirror behind the slab.

    ``delay_tau`` is the full round trip 2d/c between the back face and the
    mirror; ``disable_time`` is the instant, on the mirror-plane clock, at
    which the reflection is switched off.  ``None`` for ``delay_tau`` means
    "derive pi/delta_b from the schedule at validation"; ``disable_time``
    ``None`` means the mirror is never disabled.
    """

    present: bool = True
    reflectivity: float = 0.99
    delay_tau: float | None = None
    disable_time: float | None = None

    def validate(self) -> None:
        if not 0.0 <= self.reflectivity <= 1.0:
            raise ScenarioError(
                f"mirror.reflectivity must be in [0, 1] (got {self.reflectivity})"
            )
        if self.delay_tau is not None and self.delay_tau < 0.0:
            raise ScenarioError(f"mirror.delay_tau must be >= 0 (got {self.delay_tau})")


@dataclass(frozen=True)
class Segment:
    """One piecewise-constant level of the hyperfine field."""

    t_start: float
    delta_b: float


@dataclass(frozen=True)
class HyperfineSchedule:
    """Ordered piecewise-constant hyperfine splitting delta_b(t).

    Each segment holds until the next one starts; the first segment covers
    everything before its own start time as well, so the schedule is total.
    """

    segments: tuple[Segment, ...]

    def __post_init__(self) -> None:
        if not self.segments:
            raise ScenarioError("schedule must contain at least one segment")
        starts = [s.t_start for s in self.segments]
        if any(b <= a for a, b in zip(starts, starts[1:])):
            raise ScenarioError(f"schedule segment times must be strictly increasing (got {starts})")
        if starts[0] > 0.0:
            raise ScenarioError(f"first schedule segment must start at t <= 0 (got {starts[0]})")

    @classmethod
    def constant(cls, delta_b: float) -> "HyperfineSchedule":
        return cls((Segment(0.0, delta_b),))

    def level_at(self, t: float) -> float:
        level = self.segments[0].delta_b
        for seg in self.segments:
            if seg.t_start <= t:
                level = seg.delta_b
            else:
                break
        return level

    @property
    def max_abs_level(self) -> float:
        return max(abs(s.delta_b) for s in self.segments)

    def first_nonzero_level(self) -> float | None:
        for seg in self.segments:
            if seg.delta_b != 0.0:
                return seg.delta_b
        return None


@dataclass(frozen=True)
class ScheduleEvent:
    """A control action on the hyperfine field at time t.

    Actions: ``set`` (level := value), ``invert`` (level := -level),
    ``off`` (level := 0), ``on`` (restore the given level, or the last
    nonzero level when no value is given).
    """

    t: float
    action: str
    level: float | None = None


def build_schedule(
    events: Sequence[ScheduleEvent],
    initial_level: float = 0.0,
) -> HyperfineSchedule:
    """Fold control events into a piecewise-constant schedule.

    Event times must be non-decreasing; two events at the same time are
    rejected unless they would produce the same level.  ``invert`` requires
    the current level to be nonzero.
    """
    segments = [Segment(0.0, initial_level)]
    level = initial_level
    last_nonzero = initial_level if initial_level != 0.0 else None
    prev_t = -math.inf
    for ev in events:
        if ev.t < prev_t:
            raise ScenarioError(f"schedule event times must be non-decreasing (got {ev.t} after {prev_t})")
        if ev.action == "set":
            if ev.level is None:
                raise ScenarioError(f"schedule 'set' event at t={ev.t} needs a level")
            new = ev.level
        elif ev.action == "invert":
            if level == 0.0:
                raise ScenarioError(f"cannot invert a zero hyperfine level at t={ev.t}")
            new = -level
        elif ev.action == "off":
            new = 0.0
        elif ev.action == "on":
            if ev.level is not None:
                new = ev.level
            elif last_nonzero is not None:
                new = last_nonzero
            else:
                raise ScenarioError(f"schedule 'on' event at t={ev.t} has no level to restore")
        else:
            raise ScenarioError(f"unknown schedule action {ev.action!r} at t={ev.t}")

        if ev.t == prev_t and new != level:
            raise ScenarioError(f"conflicting schedule actions at t={ev.t}")
        if new != level:
            if ev.t <= 0.0:
                segments[0] = Segment(0.0, new)
            else:
                segments.append(Segment(ev.t, new))
            level = new
        if level != 0.0:
            last_nonzero = level
        prev_t = ev.t
    return HyperfineSchedule(tuple(segments))


@dataclass(frozen=True)
class ProtocolTimings:
    """Control instants implied by a hyperfine splitting delta_b.

    tau      = pi/delta_b        mirror round trip matching half a beat
    t_invert = pi/(2 delta_b)    field inversion point (first beat node)
    t_off    = 3 pi/(2 delta_b)  switch-off point (second beat node)
    """

    tau: float
    t_invert: float
    t_off: float


def derived_timings(delta_b: float) -> ProtocolTimings:
    """Protocol timings for a given splitting; requires delta_b > 0."""
    if not delta_b > 0.0:
        raise ScenarioError(f"delta_b must be > 0 to derive timings (got {delta_b})")
    return ProtocolTimings(
        tau=math.pi / delta_b,
        t_invert=0.5 * math.pi / delta_b,
        t_off=1.5 * math.pi / delta_b,
    )


@dataclass(frozen=True)
class ScenarioConfig:
    """Complete description of one run, before validation."""

    sample: SampleSpec
    pulse: PulseSpec
    mirror: MirrorSpec
    schedule: HyperfineSchedule
    t_end: float
    dt: float = 0.005
    consts: PhysConsts = field(default_factory=PhysConsts)
    record_snapshots_at: tuple[float, ...] = ()


@dataclass(frozen=True)
class ValidatedScenario:
    """A scenario with every invariant checked and derived quantities filled.

    ``nudges`` records every time that was moved onto the step grid, as
    (field, requested, used) triples.
    """

    consts: PhysConsts
    sample: SampleSpec
    pulse: PulseSpec
    mirror: MirrorSpec
    schedule: HyperfineSchedule
    t_end: float
    dt: float
    record_snapshots_at: tuple[float, ...]
    tau: float                  # mirror round trip actually used, ns
    eta_l: float                # field coupling integrated over the slab, 6*gamma*xi
    wave_number_k: float        # 1/angstrom
    n_steps: int                # time grid has n_steps + 1 points
    nudges: tuple[tuple[str, float, float], ...]
    config_hash: str

    def as_dict(self) -> dict:
        """Resolved scenario as a JSON-compatible dict (round-trips through configio)."""
        return {
            "consts": {
                "gamma": self.consts.gamma,
                "transition_energy_kev": self.consts.transition_energy_kev,
                "clebsch_a": self.consts.clebsch_a,
            },
            "sample": {
                "xi": self.sample.xi,
                "thickness_um": self.sample.thickness_um,
                "n_depth": self.sample.n_depth,
            },
            "pulse": {
                "mode": self.pulse.mode,
                "area": self.pulse.area,
                "fwhm": self.pulse.fwhm,
                "t0": self.pulse.t0,
                "linear_regime": self.pulse.linear_regime,
            },
            "mirror": {
                "present": self.mirror.present,
                "reflectivity": self.mirror.reflectivity,
                "delay_tau": self.mirror.delay_tau,
                "disable_time": self.mirror.disable_time,
            },
            "schedule": {
                "segments": [[s.t_start, s.delta_b] for s in self.schedule.segments],
            },
            "t_end": self.t_end,
            "dt": self.dt,
            "record_snapshots_at": list(self.record_snapshots_at),
        }


def _scenario_hash(resolved: dict) -> str:
    blob = json.dumps(resolved, sort_keys=True, allow_nan=True).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


def _nudge(t: float, dt: float) -> float:
    return round(t / dt) * dt


def validate_scenario(config: ScenarioConfig | ValidatedScenario) -> ValidatedScenario:
    """Check every invariant and fill derived quantities.

    Idempotent: validating an already validated scenario returns it
    unchanged.  Rejections name the offending field.
    """
    if isinstance(config, ValidatedScenario):
        return config

    config.consts.validate()
    config.sample.validate()
    config.pulse.validate()
    config.mirror.validate()

    dt = config.dt
    if not dt > 0.0:
        raise ScenarioError(f"dt must be > 0 (got {dt})")
    if not config.t_end > dt:
        raise ScenarioError(f"t_end must exceed dt (got t_end={config.t_end}, dt={dt})")
    max_level = config.schedule.max_abs_level
    if max_level > 0.0 and dt > 1.0 / (_DT_BEAT_FACTOR * max_level):
        raise ScenarioError(
            f"dt={dt} ns cannot resolve the fastest beat: need dt <= "
            f"{1.0 / (_DT_BEAT_FACTOR * max_level):.4g} ns for |delta_b|={max_level:.4g} rad/ns"
        )

    nudges: list[tuple[str, float, float]] = []

    n_steps = round(config.t_end / dt)
    t_end = n_steps * dt
    if t_end != config.t_end:
        nudges.append(("t_end", config.t_end, t_end))

    # align schedule discontinuities to the step grid so every step sees one level
    segs = []
    for i, seg in enumerate(config.schedule.segments):
        if i == 0:
            segs.append(Segment(min(seg.t_start, 0.0), seg.delta_b))
            continue
        t_nudged = _nudge(seg.t_start, dt)
        if t_nudged != seg.t_start:
            nudges.append((f"schedule[{i}].t_start", seg.t_start, t_nudged))
        segs.append(Segment(t_nudged, seg.delta_b))
    starts = [s.t_start for s in segs]
    if any(b <= a for a, b in zip(starts, starts[1:])):
        raise ScenarioError(f"schedule events collide after grid alignment: {starts}")
    schedule = HyperfineSchedule(tuple(segs))

    pulse = config.pulse
    if pulse.mode == "impulsive":
        t0 = _nudge(pulse.t0, dt)
        if t0 != pulse.t0:
            nudges.append(("pulse.t0", pulse.t0, t0))
            pulse = replace(pulse, t0=t0)
    if not 0.0 <= pulse.t0 < t_end:
        raise ScenarioError(f"pulse.t0 must lie in [0, t_end) (got {pulse.t0})")

    mirror = config.mirror
    if mirror.present and mirror.delay_tau is None:
        base = schedule.first_nonzero_level()
        if base is None:
            raise ScenarioError(
                "mirror.delay_tau is unset and the schedule has no nonzero level to derive it from"
            )
        mirror = replace(mirror, delay_tau=derived_timings(abs(base)).tau)
    tau = mirror.delay_tau if (mirror.present and mirror.delay_tau is not None) else 0.0

    snaps = []
    for t in config.record_snapshots_at:
        tn = _nudge(t, dt)
        if not 0.0 <= tn <= t_end:
            raise ScenarioError(f"record_snapshots_at entry {t} outside [0, t_end]")
        if tn != t:
            nudges.append(("record_snapshots_at", t, tn))
        snaps.append(tn)

    resolved = ValidatedScenario(
        consts=config.consts,
        sample=config.sample,
        pulse=pulse,
        mirror=mirror,
        schedule=schedule,
        t_end=t_end,
        dt=dt,
        record_snapshots_at=tuple(snaps),
        tau=tau,
        eta_l=6.0 * config.consts.gamma * config.sample.xi,
        wave_number_k=config.consts.wave_number_k,
        n_steps=n_steps,
        nudges=tuple(nudges),
        config_hash="",
    )
    return replace(resolved, config_hash=_scenario_hash(resolved.as_dict()))
