"""Independent analytic reference solutions used as ground truth in tests.

Nothing here imports the solver; these are closed forms obtained by
integrating the coherence equations once with the radiated-field feedback
dropped (first Born term) plus the rough beat-envelope attenuation model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class OracleCurve:
    """A sampled reference amplitude with a note on how it was derived."""

    t_grid: np.ndarray
    amplitude: np.ndarray
    provenance: str = ""

    def __post_init__(self) -> None:
        if np.any(np.diff(self.t_grid) <= 0.0):
            raise ValueError("OracleCurve grid must be strictly increasing")


def first_order_amplitude(xi: float, gamma: float, delta_b: float, t):
    """Single-pass forward amplitude per unit pulse area, thin-sample limit.

    -2 * xi * gamma * exp(-gamma*t/2) * cos(delta_b*t)

    This is the first scattering order: an impulsive kick puts
    i*(a/4)*theta into both hyperfine coherences, their sum beats as
    exp(-gamma*t/2)*cos(delta_b*t), and one pass through the field
    integral multiplies by i*6*gamma*xi*a with a**2 = 2/3.
    """
    t = np.asarray(t, dtype=float)
    return -2.0 * xi * gamma * np.exp(-0.5 * gamma * t) * np.cos(delta_b * t)


def envelope_attenuation(xi: float, gamma: float, delta_b: float) -> float:
    """Rough beat-envelope decay factor exp(-pi*xi*gamma/delta_b).

    Models the amplitude lost by a thin-sample signal over one mirror
    round trip; the ratio R / envelope_attenuation predicts the
    backward/forward branch balance after retrieval.
    """
    if not delta_b > 0.0:
        raise ValueError(f"delta_b must be > 0 (got {delta_b})")
    return math.exp(-math.pi * xi * gamma / delta_b)


def relative_l2(trace: OracleCurve, reference: OracleCurve, window: tuple[float, float]) -> float:
    """||trace - reference||_2 / ||reference||_2 over a time window.

    Both curves are resampled (linear interpolation, real and imaginary
    parts separately) onto the finer curve's grid points inside the window.
    """
    t1, t2 = window
    if not t2 > t1:
        raise ValueError(f"window must satisfy t1 < t2 (got {window})")
    fine = trace if len(trace.t_grid) >= len(reference.t_grid) else reference
    grid = fine.t_grid[(fine.t_grid >= t1) & (fine.t_grid <= t2)]
    if grid.size < 2:
        raise ValueError(f"window {window} selects fewer than two samples")

    def sample(curve: OracleCurve) -> np.ndarray:
        amp = np.asarray(curve.amplitude)
        re = np.interp(grid, curve.t_grid, amp.real)
        im = np.interp(grid, curve.t_grid, amp.imag) if np.iscomplexobj(amp) else 0.0
        return re + 1j * im

    a = sample(trace)
    b = sample(reference)
    norm = np.linalg.norm(b)
    if norm == 0.0:
        raise ValueError("reference curve has zero norm inside the window")
    return float(np.linalg.norm(a - b) / norm)
