#!/usr/bin/env python3
"""Thermalization of the N=2 system at two environment couplings.

Runs the master equation (RK4) and the 200-cycle dilation channel from the
bare vacuum, for a strong coupling D=3.2 and a weaker D=0.8, and writes the
trajectories together with the Gibbs reference values.  Plot t against
n_pairs / e2 from the CSVs with horizontal lines at the values stored in
gibbs_reference.json to see both engines relax onto the thermal level.

Usage: python scripts/thermalization_n2.py [outdir]   (default results/thermalization)
"""

import json
import sys
from pathlib import Path

from openschwinger import (
    BathParams,
    DensityMatrix,
    LatticeSpec,
    ModelParams,
    build_lindblad_operator,
    build_sector_operators,
    build_symmetry_sector,
    dilation_evolve,
    gibbs_reference,
    rk4_evolve,
)

BETA = 0.1
COUPLINGS = (3.2, 0.8)  # strong (as in the volume study) and a weaker one
T_MAX = 10.0
DT = 0.005
N_CYCLES = 200


def main() -> int:
    out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("results/thermalization")
    out_dir.mkdir(parents=True, exist_ok=True)

    spec = LatticeSpec(2, truncate_total_flux=True)
    params = ModelParams()
    sector = build_symmetry_sector(spec)
    ops = build_sector_operators(sector, params)
    rho0 = DensityMatrix.pure_state(ops.hamiltonian.dim, 0)
    reference = gibbs_reference(ops.hamiltonian, BETA, ops.pair_count, ops.electric_square)

    for coupling in COUPLINGS:
        bath = BathParams.from_beta(BETA, coupling)
        lop = build_lindblad_operator(ops.hamiltonian, ops.condensate, spec, params, bath)
        rec_rk4 = rk4_evolve(
            rho0, ops.hamiltonian, lop, T_MAX, DT,
            pair_count=ops.pair_count, electric_square=ops.electric_square, stride=10,
        )
        rec_dil = dilation_evolve(
            rho0, ops.hamiltonian, lop, T_MAX, N_CYCLES,
            pair_count=ops.pair_count, electric_square=ops.electric_square,
        )
        tag = f"D{coupling:g}".replace(".", "p")
        (out_dir / f"rk4_{tag}.csv").write_text(rec_rk4.to_csv())
        (out_dir / f"dilation_{tag}.csv").write_text(rec_dil.to_csv())
        print(
            f"D={coupling}: final n_pairs rk4={rec_rk4.n_pairs[-1]:.4f} "
            f"dilation={rec_dil.n_pairs[-1]:.4f} thermal={reference['n_pairs']:.4f}"
        )

    (out_dir / "gibbs_reference.json").write_text(json.dumps(reference, indent=1))
    print(f"wrote trajectories and reference values to {out_dir}/")
    return 0


if __name__ == "__main__":
    sys.exit(main())
