"""Deterministic CSV/JSON emission and parsing for run outputs.

Every file embeds the config hash so a run -> plot -> re-run chain can be
checked end to end.  Floats are printed with 9 significant digits; repeated
runs of the same configuration produce byte-identical files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .solver import TraceSet

SCHEMA_VERSION = "1"
TRACES_HEADER = "t_ns,re_fwd,im_fwd,re_bwd,im_bwd,i_fwd,i_bwd,mirror_in_beam"


class TraceFormatError(ValueError):
    """A traces CSV file does not match the expected schema."""


def _fmt(x: float) -> str:
    return f"{x:.9g}"


def write_traces_csv(path: Path, traces: TraceSet) -> None:
    meta = traces.metadata
    sched = ";".join(f"{t:.9g}:{lvl:.9g}" for t, lvl in meta.get("schedule", []))
    i_fwd = np.abs(traces.fwd_detected) ** 2
    i_bwd = np.abs(traces.bwd_amp) ** 2
    lines = [
        f"# nfscatter traces v{SCHEMA_VERSION}",
        f"# config_hash={meta.get('config_hash', '')}",
        f"# reflectivity={_fmt(meta.get('reflectivity', 0.0))}",
        f"# tau={_fmt(meta.get('tau', 0.0))}",
        f"# schedule={sched}",
        TRACES_HEADER,
    ]
    for k in range(len(traces.t_grid)):
        lines.append(",".join((
            _fmt(traces.t_grid[k]),
            _fmt(traces.fwd_amp[k].real), _fmt(traces.fwd_amp[k].imag),
            _fmt(traces.bwd_amp[k].real), _fmt(traces.bwd_amp[k].imag),
            _fmt(i_fwd[k]), _fmt(i_bwd[k]),
            "1" if traces.mirror_in_beam[k] else "0",
        )))
    path.write_text("\n".join(lines) + "\n")


@dataclass
class TraceFile:
    """Parsed traces CSV: column arrays plus the embedded comments."""

    t: np.ndarray
    re_fwd: np.ndarray
    im_fwd: np.ndarray
    re_bwd: np.ndarray
    im_bwd: np.ndarray
    i_fwd: np.ndarray
    i_bwd: np.ndarray
    mirror_in_beam: np.ndarray
    attrs: dict


def read_traces_csv(path: Path) -> TraceFile:
    attrs: dict = {}
    rows: list[list[float]] = []
    saw_header = False
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise TraceFormatError(f"cannot read {path}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, sep, value = line[1:].strip().partition("=")
            if sep:
                attrs[key.strip()] = value.strip()
            continue
        if not saw_header:
            if line != TRACES_HEADER:
                raise TraceFormatError(f"{path}:{lineno}: expected header {TRACES_HEADER!r}")
            saw_header = True
            continue
        parts = line.split(",")
        if len(parts) != 8:
            raise TraceFormatError(f"{path}:{lineno}: expected 8 columns, got {len(parts)}")
        try:
            rows.append([float(p) for p in parts])
        except ValueError:
            raise TraceFormatError(f"{path}:{lineno}: non-numeric value") from None
    if not saw_header:
        raise TraceFormatError(f"{path}: missing header line")
    if not rows:
        raise TraceFormatError(f"{path}: no data rows")
    cols = np.array(rows, dtype=float).T
    return TraceFile(
        t=cols[0], re_fwd=cols[1], im_fwd=cols[2], re_bwd=cols[3], im_bwd=cols[4],
        i_fwd=cols[5], i_bwd=cols[6], mirror_in_beam=cols[7] != 0.0, attrs=attrs,
    )


def parse_schedule_attr(attrs: dict) -> list[tuple[float, float]]:
    raw = attrs.get("schedule", "")
    segs = []
    for chunk in raw.split(";"):
        if not chunk:
            continue
        t, _, lvl = chunk.partition(":")
        segs.append((float(t), float(lvl)))
    return segs


def write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, allow_nan=True) + "\n")


def write_pattern_csv(path: Path, patterns: list[tuple[float, np.ndarray, np.ndarray]],
                      config_hash: str) -> None:
    """Standing-wave patterns, one block of rows per snapshot time."""
    lines = [
        f"# nfscatter pattern v{SCHEMA_VERSION}",
        f"# config_hash={config_hash}",
        "snapshot_t_ns,s_angstrom,density",
    ]
    for t_snap, s_grid, density in patterns:
        for s, d in zip(s_grid, density):
            lines.append(f"{_fmt(t_snap)},{_fmt(s)},{_fmt(d)}")
    path.write_text("\n".join(lines) + "\n")
