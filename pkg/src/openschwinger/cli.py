"""Command-line front end.

Subcommands build the constrained bases, dump operators, run the three
evolution engines, and emit figure-ready CSV/JSON data files.

Exit codes follow the usual convention: 0 on success, 1 when a run fails a
numerical check (integrator abort, validation failure, or a --max-dev bound
exceeded in ``compare``), 2 for usage errors.

Basis defaults differ between the structural and the dynamical subcommands on
purpose: ``states`` and ``hamiltonian`` use the full flux-cutoff space, where
the printed reference matrices live, while ``evolve``/``compare``/``sweep``
default to the smaller sector with the uniform background-flux loops removed
(pass --full-flux to keep them).  For N=2 that is the difference between the
5- and the 4-dimensional space.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from .lattice import LatticeSpec, build_symmetry_sector, count_physical_states, enumerate_physical_configs
from .operators import ModelParams, build_sector_operators, matrix_to_json
from .lindblad import (
    BathParams,
    DensityMatrix,
    EvolutionRecord,
    build_lindblad_operator,
    exact_evolve,
    gibbs_reference,
    rk4_evolve,
)
from .dilation import build_dilation_hamiltonian, dilation_evolve, unitary_from_hamiltonian

ENUMERATION_LIMIT = 6  # brute force is cheap up to here and a no-go well beyond


class NumericalCheckError(RuntimeError):
    """A cross-check or invariant failed at run time (exit code 1)."""


# ---------------------------------------------------------------------------
# argument plumbing
# ---------------------------------------------------------------------------

def _add_model_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--a", type=float, default=1.0, help="lattice spacing (default 1)")
    p.add_argument("--e", type=float, default=1.0, help="gauge coupling (default 1)")
    p.add_argument("--m", type=float, default=0.1, help="fermion mass (default 0.1)")


def _add_bath_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--beta", type=float, default=0.1, help="inverse temperature (default 0.1)")
    p.add_argument("--coupling", type=float, default=3.2, help="system-environment coupling D (default 3.2)")


def _add_dynamics_basis_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n-sites", type=int, required=True, metavar="N", help="spatial lattice sites")
    p.add_argument(
        "--full-flux",
        action="store_true",
        help="keep the uniform background-flux loops (default: drop them, as in the device runs)",
    )


def _spec_from(args, *, dynamics: bool) -> LatticeSpec:
    n = args.n_sites
    if n < 1:
        raise _UsageError(f"--n-sites must be >= 1, got {n}")
    truncate = (not args.full_flux) if dynamics else getattr(args, "truncate", False)
    return LatticeSpec(n, truncate_total_flux=truncate)


class _UsageError(ValueError):
    pass


def _build_setup(args):
    """Shared build path for the dynamical subcommands."""
    spec = _spec_from(args, dynamics=True)
    params = ModelParams(a=args.a, e=args.e, m=args.m)
    try:
        bath = BathParams.from_beta(args.beta, args.coupling)
    except ValueError as exc:
        raise _UsageError(str(exc)) from exc
    sector = build_symmetry_sector(spec)
    ops = build_sector_operators(sector, params)
    lop = build_lindblad_operator(ops.hamiltonian, ops.condensate, spec, params, bath)
    return spec, params, bath, sector, ops, lop


def _run_method(args, method, ops, lop, spec, bath):
    """Dispatch one evolution run; every path records the same observables."""
    rho0 = DensityMatrix.pure_state(ops.hamiltonian.dim, 0)  # projected bare vacuum
    if method == "rk4":
        return rk4_evolve(
            rho0, ops.hamiltonian, lop, args.t_max, args.dt,
            pair_count=ops.pair_count, electric_square=ops.electric_square,
            stride=args.stride,
        )
    if method == "dilation":
        return dilation_evolve(
            rho0, ops.hamiltonian, lop, args.t_max, args.n_cycles,
            pair_count=ops.pair_count, electric_square=ops.electric_square,
        )
    if method == "exact":
        n_points = int(round(args.t_max / args.dt))
        if abs(n_points * args.dt - args.t_max) > 1e-9 * max(1.0, args.t_max):
            raise _UsageError(f"t_max {args.t_max} is not a whole number of dt {args.dt} grid steps")
        times = np.arange(n_points + 1) * args.dt
        return exact_evolve(
            rho0, ops.hamiltonian, lop, times,
            pair_count=ops.pair_count, electric_square=ops.electric_square,
        )
    raise _UsageError(f"unknown method {method!r}")


def _sidecar_path(out: Path) -> Path:
    return out.with_suffix(".json") if out.suffix else out.with_name(out.name + ".json")


def _config_dict(args, method, spec, bath) -> dict:
    cfg = {
        "n_sites": spec.n_sites,
        "flux_cutoff": spec.flux_cutoff,
        "truncate_total_flux": spec.truncate_total_flux,
        "a": args.a,
        "e": args.e,
        "m": args.m,
        "beta": bath.beta,
        "coupling": bath.coupling,
        "method": method,
        "t_max": args.t_max,
    }
    if method in ("rk4", "exact"):
        cfg["dt"] = args.dt
        if method == "rk4":
            cfg["stride"] = args.stride
    else:
        cfg["n_cycles"] = args.n_cycles
    return cfg


def _write_outputs(out: Path, record: EvolutionRecord, config: dict, gibbs: dict, elapsed: float) -> None:
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(record.to_csv())
    sidecar = {
        "config": config,
        "gibbs_reference": gibbs,
        "wall_time_s": elapsed,
        "record": record.to_json_dict(),
    }
    _sidecar_path(out).write_text(json.dumps(sidecar, indent=1))


def _align_records(rec_a: EvolutionRecord, rec_b: EvolutionRecord, tol: float = 1e-9):
    """Indices of time points the two records share (within tolerance)."""
    ia, ib = [], []
    jb = 0
    for ja, t in enumerate(rec_a.times):
        while jb < len(rec_b.times) and rec_b.times[jb] < t - tol:
            jb += 1
        if jb < len(rec_b.times) and abs(rec_b.times[jb] - t) <= tol:
            ia.append(ja)
            ib.append(jb)
    return np.array(ia, dtype=int), np.array(ib, dtype=int)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_states(args) -> int:
    n = args.n_sites
    if n < 1:
        raise _UsageError(f"N must be >= 1, got {n}")
    closed = count_physical_states(n)
    print(f"N={n}: physical states (closed form) = {closed}")
    ok = True
    if n <= ENUMERATION_LIMIT:
        spec = LatticeSpec(n)
        enumerated = len(enumerate_physical_configs(spec))
        print(f"N={n}: physical states (enumeration) = {enumerated}")
        if enumerated != closed:
            print("cross-check FAILED: enumeration disagrees with closed form", file=sys.stderr)
            ok = False
    if args.sector:
        spec = LatticeSpec(n, truncate_total_flux=args.truncate)
        sector = build_symmetry_sector(spec)
        label = "truncated sector" if args.truncate else "sector"
        print(f"N={n}: {label} dim {sector.dim} (from {sector.n_configs} configurations)")
        v = sector.isometry()
        gram_err = np.max(np.abs(v.T @ v - np.eye(sector.dim)))
        if gram_err > 1e-12:
            print(f"cross-check FAILED: sector basis not orthonormal ({gram_err:.3e})", file=sys.stderr)
            ok = False
    if not ok:
        raise NumericalCheckError("states cross-checks failed")
    return 0


def cmd_hamiltonian(args) -> int:
    spec = _spec_from(args, dynamics=False)
    params = ModelParams(a=args.a, e=args.e, m=args.m)
    sector = build_symmetry_sector(spec)
    ops = build_sector_operators(sector, params)
    out = Path(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(ops.hamiltonian.to_json())
    print(f"wrote {out} (dim {ops.hamiltonian.dim}, basis {ops.hamiltonian.basis_tag})")
    if args.observables:
        stem = out.with_suffix("")
        for name, op in (
            ("pairs", ops.pair_count),
            ("electric", ops.electric_square),
            ("condensate", ops.condensate),
        ):
            path = Path(f"{stem}_{name}.json")
            path.write_text(op.to_json())
            print(f"wrote {path}")
    return 0


def cmd_evolve(args) -> int:
    spec, params, bath, sector, ops, lop = _build_setup(args)
    t0 = time.perf_counter()
    record = _run_method(args, args.method, ops, lop, spec, bath)
    elapsed = time.perf_counter() - t0
    gibbs = gibbs_reference(ops.hamiltonian, bath.beta, ops.pair_count, ops.electric_square)
    out = Path(args.output)
    _write_outputs(out, record, _config_dict(args, args.method, spec, bath), gibbs, elapsed)
    print(
        f"wrote {out} and {_sidecar_path(out)}: dim {ops.hamiltonian.dim}, "
        f"{len(record.times)} rows, {elapsed:.2f}s"
    )
    if args.dump_unitaries:
        if args.method != "dilation":
            raise _UsageError("--dump-unitaries only applies to the dilation method")
        dt_cycle = args.t_max / args.n_cycles
        j_op = build_dilation_hamiltonian(lop)
        tag = ops.hamiltonian.basis_tag
        prefix = Path(args.dump_unitaries)
        prefix.parent.mkdir(parents=True, exist_ok=True)
        uj = unitary_from_hamiltonian(j_op, np.sqrt(dt_cycle))
        uh = unitary_from_hamiltonian(ops.hamiltonian.matrix, dt_cycle)
        Path(f"{prefix}_uj.json").write_text(matrix_to_json(uj, f"{tag}+ancilla"))
        Path(f"{prefix}_uh.json").write_text(matrix_to_json(uh, tag))
        print(f"wrote {prefix}_uj.json and {prefix}_uh.json (cycle dt {dt_cycle:g})")
    return 0


def cmd_gibbs(args) -> int:
    spec, params, bath, sector, ops, lop = _build_setup(args)
    ref = gibbs_reference(ops.hamiltonian, bath.beta, ops.pair_count, ops.electric_square)
    line = json.dumps(ref, indent=1)
    if args.output:
        out = Path(args.output)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(line)
        print(f"wrote {out}")
    print(line)
    return 0


def cmd_compare(args) -> int:
    spec, params, bath, sector, ops, lop = _build_setup(args)
    records = {}
    for side, method in (("a", args.method_a), ("b", args.method_b)):
        rec = _run_method(args, method, ops, lop, spec, bath)
        records[side] = rec
        out_path = getattr(args, f"out_{side}")
        if out_path:
            out = Path(out_path)
            out.parent.mkdir(parents=True, exist_ok=True)
            out.write_text(rec.to_csv())
    ia, ib = _align_records(records["a"], records["b"])
    if len(ia) < 2:
        raise _UsageError(
            "the two methods share fewer than two time points; "
            "choose dt / n-cycles so the grids align"
        )
    worst = 0.0
    for name in ("n_pairs", "e2"):
        da = np.abs(getattr(records["a"], name)[ia] - getattr(records["b"], name)[ib])
        worst = max(worst, float(np.max(da)))
        print(
            f"{name}: max |dev| = {np.max(da):.6e}, mean |dev| = {np.mean(da):.6e} "
            f"over {len(ia)} shared points"
        )
    if args.max_dev is not None and worst > args.max_dev:
        raise NumericalCheckError(
            f"max observable deviation {worst:.6e} exceeds --max-dev {args.max_dev:g}"
        )
    return 0


def cmd_sweep(args) -> int:
    sites = args.sites
    out_dir = Path(args.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    tail_frac = args.tail_frac
    if not 0.0 < tail_frac < 1.0:
        raise _UsageError(f"--tail-frac must be in (0, 1), got {tail_frac}")
    summary = {"method": args.method, "t_max": args.t_max, "tail_frac": tail_frac, "runs": []}
    thermal_values = []
    records = []
    for n in sites:
        sub = argparse.Namespace(**vars(args), n_sites=n)
        spec, params, bath, sector, ops, lop = _build_setup(sub)
        t0 = time.perf_counter()
        record = _run_method(sub, args.method, ops, lop, spec, bath)
        elapsed = time.perf_counter() - t0
        gibbs = gibbs_reference(ops.hamiltonian, bath.beta, ops.pair_count, ops.electric_square)
        out = out_dir / f"evolve_N{n}.csv"
        _write_outputs(out, record, _config_dict(sub, args.method, spec, bath), gibbs, elapsed)
        tail = record.times >= record.times[-1] * (1.0 - tail_frac)
        eq_e2 = float(np.mean(record.e2[tail]))
        eq_pairs = float(np.mean(record.n_pairs[tail]))
        thermal_values.append(gibbs["e2"])
        records.append(record)
        summary["runs"].append(
            {
                "n_sites": n,
                "dim": ops.hamiltonian.dim,
                "eq_e2": eq_e2,
                "eq_n_pairs": eq_pairs,
                "gibbs_e2": gibbs["e2"],
                "gibbs_n_pairs": gibbs["n_pairs"],
                "wall_time_s": elapsed,
                "csv": out.name,
            }
        )
        print(f"N={n}: dim {ops.hamiltonian.dim}, tail-mean e2 = {eq_e2:.6f}, thermal e2 = {gibbs['e2']:.6f} ({elapsed:.1f}s)")

    # Two convergence-with-volume readouts.  The thermal-value gaps track the
    # equilibrium reference lines; the curve distances track how close
    # successive trajectories run to each other.  Both shrink as N grows.
    # The tail means above are informational: their residual relaxation bias
    # is N dependent, so their gaps are a poor convergence measure.
    thermal_gaps = [abs(b - a) for a, b in zip(thermal_values, thermal_values[1:])]
    summary["thermal_e2_gaps"] = thermal_gaps
    summary["thermal_gaps_decreasing"] = all(b < a for a, b in zip(thermal_gaps, thermal_gaps[1:]))
    curve_distances = []
    for ra, rb in zip(records, records[1:]):
        ia, ib = _align_records(ra, rb)
        if len(ia) >= 2:
            curve_distances.append(float(np.max(np.abs(ra.e2[ia] - rb.e2[ib]))))
    if len(curve_distances) == len(records) - 1:
        summary["curve_e2_distances"] = curve_distances
        summary["curve_distances_decreasing"] = all(
            b < a for a, b in zip(curve_distances, curve_distances[1:])
        )
    (out_dir / "summary.json").write_text(json.dumps(summary, indent=1))
    if thermal_gaps:
        print("thermal e2 gaps:", ", ".join(f"{g:.6f}" for g in thermal_gaps))
        if curve_distances:
            print("trajectory sup distances:", ", ".join(f"{g:.6f}" for g in curve_distances))
        if len(thermal_gaps) > 1:
            print("gaps decreasing:", summary["thermal_gaps_decreasing"])
    print(f"wrote {out_dir / 'summary.json'}")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _int_list(text: str) -> list[int]:
    try:
        values = [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a comma-separated integer list: {text!r}") from exc
    if not values:
        raise argparse.ArgumentTypeError("empty site list")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="openschwinger",
        description="Constrained-basis construction and open-system evolution "
        "for the lattice Schwinger model with a flux cutoff.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("states", help="count physical states and cross-check the closed form")
    p.add_argument("n_sites", type=int, metavar="N", help="spatial lattice sites")
    p.add_argument("--sector", action="store_true", help="also build and report the projected sector")
    p.add_argument("--truncate", action="store_true", help="drop the uniform background-flux loops")
    p.set_defaults(func=cmd_states)

    p = sub.add_parser("hamiltonian", help="dump the projected Hamiltonian as operator JSON")
    p.add_argument("--n-sites", type=int, required=True, metavar="N")
    p.add_argument("--truncate", action="store_true", help="drop the uniform background-flux loops")
    _add_model_args(p)
    p.add_argument("-o", "--output", required=True, help="output JSON path")
    p.add_argument("--observables", action="store_true", help="also dump pair count, electric square, condensate")
    p.set_defaults(func=cmd_hamiltonian)

    p = sub.add_parser("evolve", help="run one evolution and write CSV + JSON sidecar")
    _add_dynamics_basis_args(p)
    _add_model_args(p)
    _add_bath_args(p)
    p.add_argument("--method", choices=("rk4", "dilation", "exact"), default="rk4")
    p.add_argument("--t-max", type=float, default=10.0)
    p.add_argument("--dt", type=float, default=0.005, help="step (rk4) or output grid spacing (exact)")
    p.add_argument("--n-cycles", type=int, default=200, help="dilation cycles (dilation method only)")
    p.add_argument("--stride", type=int, default=1, help="record every STRIDE-th rk4 step")
    p.add_argument("-o", "--output", required=True, help="output CSV path")
    p.add_argument("--dump-unitaries", metavar="PREFIX", help="also dump the dilation cycle unitaries (JSON)")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("gibbs", help="print thermal reference observable values")
    _add_dynamics_basis_args(p)
    _add_model_args(p)
    _add_bath_args(p)
    p.add_argument("-o", "--output", help="optional output JSON path")
    p.set_defaults(func=cmd_gibbs)

    p = sub.add_parser("compare", help="run two methods on one setup and report deviations")
    _add_dynamics_basis_args(p)
    _add_model_args(p)
    _add_bath_args(p)
    p.add_argument("--method-a", choices=("rk4", "dilation", "exact"), required=True)
    p.add_argument("--method-b", choices=("rk4", "dilation", "exact"), required=True)
    p.add_argument("--t-max", type=float, default=10.0)
    p.add_argument("--dt", type=float, default=0.005)
    p.add_argument("--n-cycles", type=int, default=200)
    p.add_argument("--stride", type=int, default=1)
    p.add_argument("--max-dev", type=float, help="exit 1 if max observable deviation exceeds this")
    p.add_argument("--out-a", help="optional CSV dump of the first run")
    p.add_argument("--out-b", help="optional CSV dump of the second run")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("sweep", help="run one method across lattice sizes and summarize equilibria")
    p.add_argument("--sites", type=_int_list, default=[2, 4, 6, 8], help="comma-separated N list")
    p.add_argument(
        "--full-flux",
        action="store_true",
        help="keep the uniform background-flux loops (default: drop them, as in the device runs)",
    )
    _add_model_args(p)
    _add_bath_args(p)
    p.add_argument("--method", choices=("rk4", "dilation", "exact"), default="rk4")
    p.add_argument("--t-max", type=float, default=10.0)
    p.add_argument("--dt", type=float, default=0.01)
    p.add_argument("--n-cycles", type=int, default=200)
    p.add_argument("--stride", type=int, default=5)
    p.add_argument("--tail-frac", type=float, default=0.2, help="trailing fraction averaged as 'equilibrium'")
    p.add_argument("-o", "--output-dir", required=True)
    p.set_defaults(func=cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _UsageError as exc:
        parser.exit(2, f"{parser.prog}: error: {exc}\n")
    except (NumericalCheckError, RuntimeError, FloatingPointError, np.linalg.LinAlgError, ValueError) as exc:
        print(f"{parser.prog}: numerical check failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
