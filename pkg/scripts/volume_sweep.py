#!/usr/bin/env python3
"""Volume dependence of the equilibrium electric field energy.

Runs the master equation for N = 2, 4, 6, 8 spatial sites in the projected
(and flux-truncated) sectors.  The summary records, per size, the
tail-averaged <E^2> alongside the thermal reference value; the gaps between
successive thermal values and the sup-norm distances between successive
trajectories both shrink monotonically as N grows, i.e. the observable
converges with volume.  The N=8 sector has dimension 800, so this is the
expensive script: expect a few minutes of dense linear algebra on one core.

Usage: python scripts/volume_sweep.py [outdir]   (default results/volume_sweep)
"""

import sys

from openschwinger.cli import main as cli_main

SITES = "2,4,6,8"
T_MAX = "10.0"
DT = "0.01"


def main() -> int:
    out_dir = sys.argv[1] if len(sys.argv) > 1 else "results/volume_sweep"
    return cli_main(
        [
            "sweep",
            "--sites", SITES,
            "--t-max", T_MAX,
            "--dt", DT,
            "--stride", "5",
            "--tail-frac", "0.2",
            "-o", out_dir,
        ]
    )


if __name__ == "__main__":
    sys.exit(main())
