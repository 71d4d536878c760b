#!/usr/bin/env python3
"""Sweep the effective thickness and compare branch balance to the
R/exp(-pi*xi*G/delta_b) prediction.

Usage: python scripts/thickness_balance_sweep.py [outdir] [xi values...]
"""

import sys
from pathlib import Path

from nfscatter import entanglement_report, envelope_attenuation, run_scenario, validate_scenario
from nfscatter.presets import gated_mirror_scenario


def run(outdir: Path, values) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    lines = ["xi,balance,predicted,ratio"]
    print(f"{'xi':>6} {'balance':>9} {'predicted':>10} {'ratio':>7}")
    for xi in values:
        sc = validate_scenario(gated_mirror_scenario(xi=xi, disable_time=7.39))
        traces, _ = run_scenario(sc)
        balance = entanglement_report(traces, (100.0, sc.t_end)).balance
        predicted = sc.mirror.reflectivity / envelope_attenuation(
            xi, sc.consts.gamma, abs(sc.schedule.level_at(0.0)))
        print(f"{xi:6.2f} {balance:9.4f} {predicted:10.4f} {balance / predicted:7.4f}")
        lines.append(f"{xi:.9g},{balance:.9g},{predicted:.9g},{balance / predicted:.9g}")
    (outdir / "balance_sweep.csv").write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("out")
    xis = [float(v) for v in sys.argv[2:]] or [0.5, 1.0, 2.0]
    run(out, xis)
