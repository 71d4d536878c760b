#!/usr/bin/env python3
"""Run the three reference scenarios and emit traces, reports and SVG panels.

Usage: python scripts/reproduce_scenarios.py [outdir]

fig2a is the intensity view of the storage/retrieval protocol, fig2b the
symmetric retrieval (branches in phase), fig2c the antisymmetric one
(field inversion at the first beat node).  Outputs land in
<outdir>/<preset>/ and are byte-stable across reruns.
"""

import sys
from pathlib import Path

from nfscatter.cli import main as cli_main


def run(outdir: Path) -> None:
    for preset in ("fig2a", "fig2b", "fig2c"):
        dest = outdir / preset
        rc = cli_main(["run", "--preset", preset, "--out", str(dest)])
        if rc != 0:
            raise SystemExit(rc)
        rc = cli_main(["plot", str(dest / "traces.csv"), "--out", str(dest)])
        if rc != 0:
            raise SystemExit(rc)


if __name__ == "__main__":
    run(Path(sys.argv[1]) if len(sys.argv) > 1 else Path("out"))
