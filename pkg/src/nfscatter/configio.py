"""Structured-text (JSON) scenario configuration.

The file mirrors the ScenarioConfig field names; times are ns, lengths
micrometers.  Hyperfine levels may be given directly in rad/ns or as
multiples of the decay rate through the ``*_in_gamma`` key variants
(``delta_b_in_gamma`` on the schedule is an alias for the initial level).
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .model import (
    HyperfineSchedule,
    MirrorSpec,
    PhysConsts,
    PulseSpec,
    SampleSpec,
    ScenarioConfig,
    ScenarioError,
    ScheduleEvent,
    Segment,
    build_schedule,
)


class ConfigError(ValueError):
    """Malformed configuration file or override."""


def _pick(d: dict, allowed: set[str], where: str) -> None:
    unknown = set(d) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(sorted(unknown))}")


def _level(d: dict, key: str, gamma: float, where: str) -> float | None:
    raw = d.get(key)
    in_gamma = d.get(f"{key}_in_gamma")
    if raw is not None and in_gamma is not None:
        raise ConfigError(f"{where}: give {key} or {key}_in_gamma, not both")
    if in_gamma is not None:
        return float(in_gamma) * gamma
    return None if raw is None else float(raw)


def scenario_from_dict(data: dict[str, Any]) -> ScenarioConfig:
    _pick(data, {"consts", "sample", "pulse", "mirror", "schedule", "t_end", "dt",
                 "record_snapshots_at"}, "config")

    cd = data.get("consts", {})
    _pick(cd, {"gamma", "transition_energy_kev", "clebsch_a"}, "consts")
    consts = PhysConsts(**cd)

    sd = data.get("sample", {})
    _pick(sd, {"xi", "thickness_um", "n_depth"}, "sample")
    sample = SampleSpec(**sd)

    pd = data.get("pulse", {})
    _pick(pd, {"mode", "area", "fwhm", "t0", "linear_regime"}, "pulse")
    pulse = PulseSpec(**pd)

    md = data.get("mirror", {})
    _pick(md, {"present", "reflectivity", "delay_tau", "disable_time"}, "mirror")
    mirror = MirrorSpec(**md)

    schedule = _schedule_from_dict(data.get("schedule", {}), consts.gamma)

    try:
        t_end = float(data["t_end"])
    except KeyError:
        raise ConfigError("config is missing required key 't_end'") from None
    return ScenarioConfig(
        consts=consts,
        sample=sample,
        pulse=pulse,
        mirror=mirror,
        schedule=schedule,
        t_end=t_end,
        dt=float(data.get("dt", 0.005)),
        record_snapshots_at=tuple(float(t) for t in data.get("record_snapshots_at", ())),
    )


def _schedule_from_dict(sd: dict, gamma: float) -> HyperfineSchedule:
    _pick(sd, {"segments", "events", "initial_level", "initial_level_in_gamma",
               "delta_b_in_gamma"}, "schedule")
    if "segments" in sd:
        if "events" in sd:
            raise ConfigError("schedule: give segments or events, not both")
        return HyperfineSchedule(tuple(Segment(float(t), float(lvl)) for t, lvl in sd["segments"]))
    if "delta_b_in_gamma" in sd and "initial_level_in_gamma" in sd:
        raise ConfigError("schedule: delta_b_in_gamma is an alias for initial_level_in_gamma")
    initial = _level(
        {"initial_level": sd.get("initial_level"),
         "initial_level_in_gamma": sd.get("initial_level_in_gamma", sd.get("delta_b_in_gamma"))},
        "initial_level", gamma, "schedule",
    ) or 0.0
    events = []
    for i, ed in enumerate(sd.get("events", ())):
        _pick(ed, {"t", "action", "level", "level_in_gamma"}, f"schedule.events[{i}]")
        events.append(ScheduleEvent(
            t=float(ed["t"]),
            action=str(ed["action"]),
            level=_level(ed, "level", gamma, f"schedule.events[{i}]"),
        ))
    return build_schedule(events, initial_level=initial)


def load_config(path: str | Path) -> ScenarioConfig:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must contain a JSON object")
    try:
        return scenario_from_dict(data)
    except (TypeError, ScenarioError) as exc:
        raise ConfigError(f"config {path}: {exc}") from exc


def apply_overrides(data: dict[str, Any], overrides: list[str]) -> dict[str, Any]:
    """Apply ``--set dotted.key=value`` overrides onto a config dict."""
    out = json.loads(json.dumps(data))  # deep copy, keeps JSON types
    for item in overrides:
        key, sep, raw = item.partition("=")
        if not sep:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        node = out
        parts = key.split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigError(f"override {key!r} descends into a non-section value")
        node[parts[-1]] = value
    return out
