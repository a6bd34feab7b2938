"""Hamiltonian and observables on the gauge-invariant basis.

The Hamiltonian acts on physical configurations as

    H = 1/(2a) sum_n [ sp(n) L-(n) sm(n+1) + sp(n+1) L+(n) sm(n) ]
      + (a e^2 / 2) sum_n l[n]^2  +  m sum_n (-1)^n occ[n]

with sp/sm the fermion raising/lowering operators and L+/L- raising and
lowering the link flux, indices periodic.  A hop that would push a flux past
the cutoff (or out of the truncated space) is simply absent.  Building both
hop directions term by term makes the matrix symmetric exactly, not just to
rounding.

Observables measured in the runs:

* pair count        sum over even sites of occ[n]
* mean E^2          (e^2 / 2N) sum_n l[n]^2           (average over links)
* scalar density    (1 / 2a*2N) sum_n (-1)^n sigma_z(n), the staggered
                    condensate density that couples the system to the bath

All three are diagonal in the configuration basis and remain diagonal in the
symmetry-projected basis, where they are filled in directly from orbit
invariants (no floating-point projection error).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .lattice import GaugeFermionConfig, LatticeSpec, SymmetrySector

__all__ = [
    "ModelParams",
    "HermitianOperator",
    "build_hamiltonian",
    "build_pair_count",
    "build_electric_square",
    "build_condensate",
    "project_operator",
    "SectorOperators",
    "build_sector_operators",
]

HERMITICITY_TOL = 1e-12


@dataclass(frozen=True)
class ModelParams:
    """Couplings of the lattice model: spacing a, charge e, fermion mass m."""

    a: float = 1.0
    e: float = 1.0
    m: float = 0.1

    def __post_init__(self):
        if self.a <= 0:
            raise ValueError(f"lattice spacing must be positive, got {self.a}")


def matrix_to_json(matrix, basis_tag: str) -> str:
    """Serialize a square matrix as {dim, basis_tag, entries} with row-major
    [re, im] entry pairs.  Works for any matrix, Hermitian or not (the dilation
    circuit's unitaries go through here as well)."""
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    entries = [[float(z.real), float(z.imag)] for z in m.ravel(order="C")]
    return json.dumps({"dim": m.shape[0], "basis_tag": basis_tag, "entries": entries})


def matrix_from_json(text: str) -> tuple[np.ndarray, str]:
    payload = json.loads(text)
    dim = payload["dim"]
    flat = np.array(
        [complex(re, im) for re, im in payload["entries"]], dtype=complex
    )
    if flat.size != dim * dim:
        raise ValueError(f"entry count {flat.size} does not match dim {dim}")
    return flat.reshape(dim, dim), payload["basis_tag"]


@dataclass(frozen=True)
class HermitianOperator:
    """A dense Hermitian matrix tagged with the basis it lives in."""

    matrix: np.ndarray
    basis_tag: str

    def __post_init__(self):
        m = np.asarray(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {m.shape}")
        err = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
        if err > HERMITICITY_TOL:
            raise ValueError(f"matrix is not Hermitian: max deviation {err:.3e}")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def to_json(self) -> str:
        return matrix_to_json(self.matrix, self.basis_tag)

    @classmethod
    def from_json(cls, text: str) -> "HermitianOperator":
        matrix, basis_tag = matrix_from_json(text)
        return cls(matrix=matrix, basis_tag=basis_tag)


def _basis_tag(spec: LatticeSpec, projected: bool) -> str:
    kind = "k0-parity-even" if projected else "config"
    tag = f"{kind}/N={spec.n_sites}/cutoff={spec.flux_cutoff}"
    if spec.truncate_total_flux:
        tag += "/flux-truncated"
    return tag


# ---------------------------------------------------------------------------
# configuration-basis operators
# ---------------------------------------------------------------------------

def build_hamiltonian(
    spec: LatticeSpec,
    configs: list[GaugeFermionConfig],
    params: ModelParams,
) -> HermitianOperator:
    """Assemble H on the configuration basis (real symmetric)."""
    nf = spec.n_fermion
    a, e, m = params.a, params.e, params.m
    index = {c: i for i, c in enumerate(configs)}
    dim = len(configs)
    h = np.zeros((dim, dim))
    hop = 1.0 / (2.0 * a)

    for i, cfg in enumerate(configs):
        occ, flux = cfg.occupations, cfg.fluxes
        electric = 0.5 * a * e * e * cfg.flux_square_sum
        mass = m * sum(occ[n] if n % 2 == 0 else -occ[n] for n in range(nf))
        h[i, i] = electric + mass
        for n in range(nf):
            np1 = (n + 1) % nf
            if occ[n] == 0 and occ[np1] == 1:
                # fermion hops from n+1 to n, lowering the flux between them
                new_occ = list(occ)
                new_occ[n], new_occ[np1] = 1, 0
                new_flux = list(flux)
                new_flux[n] -= 1
                j = index.get(GaugeFermionConfig(tuple(new_occ), tuple(new_flux)))
                if j is not None:
                    h[j, i] += hop
            if occ[n] == 1 and occ[np1] == 0:
                # fermion hops from n to n+1, raising the flux between them
                new_occ = list(occ)
                new_occ[n], new_occ[np1] = 0, 1
                new_flux = list(flux)
                new_flux[n] += 1
                j = index.get(GaugeFermionConfig(tuple(new_occ), tuple(new_flux)))
                if j is not None:
                    h[j, i] += hop
    return HermitianOperator(matrix=h, basis_tag=_basis_tag(spec, projected=False))


def build_pair_count(
    spec: LatticeSpec, configs: list[GaugeFermionConfig]
) -> HermitianOperator:
    """Electron-positron pair number, diagonal."""
    diag = np.array([float(c.n_pairs) for c in configs])
    return HermitianOperator(np.diag(diag), _basis_tag(spec, projected=False))


def build_electric_square(
    spec: LatticeSpec, configs: list[GaugeFermionConfig], params: ModelParams
) -> HermitianOperator:
    """Mean squared electric field (e^2 / 2N) sum_n l[n]^2, diagonal."""
    scale = params.e**2 / (2.0 * spec.n_sites)
    diag = np.array([scale * c.flux_square_sum for c in configs])
    return HermitianOperator(np.diag(diag), _basis_tag(spec, projected=False))


def build_condensate(
    spec: LatticeSpec, configs: list[GaugeFermionConfig], params: ModelParams
) -> HermitianOperator:
    """Staggered scalar density (1/2a*2N) sum_n (-1)^n sigma_z(n), diagonal.

    Equals (2*pairs - N) / (a*2N) on a configuration: the constant part of
    sigma_z = 2*occ - 1 cancels around the even-length chain, which also makes
    this form identical to the occupation form sum_n (-1)^n (sigma_z+1)/2
    normalized the same way.
    """
    nf = spec.n_fermion
    diag = np.array(
        [(2.0 * c.n_pairs - spec.n_sites) / (params.a * nf) for c in configs]
    )
    return HermitianOperator(np.diag(diag), _basis_tag(spec, projected=False))


# ---------------------------------------------------------------------------
# symmetry-projected operators
# ---------------------------------------------------------------------------

def project_operator(
    op: HermitianOperator, sector: SymmetrySector
) -> HermitianOperator:
    """Compress a configuration-basis operator with the sector isometry."""
    v = sector.isometry()
    if op.dim != v.shape[0]:
        raise ValueError(
            f"operator dim {op.dim} does not match config count {v.shape[0]}"
        )
    mat = v.T @ op.matrix @ v
    if np.isrealobj(op.matrix):
        mat = 0.5 * (mat + mat.T)  # kill rounding asymmetry from the two GEMMs
    else:
        mat = 0.5 * (mat + mat.conj().T)
    return HermitianOperator(mat, _basis_tag(sector.spec, projected=True))


@dataclass(frozen=True)
class SectorOperators:
    """Everything the dynamics needs, in the projected basis."""

    sector: SymmetrySector
    params: ModelParams
    hamiltonian: HermitianOperator
    pair_count: HermitianOperator
    electric_square: HermitianOperator
    condensate: HermitianOperator

    @property
    def dim(self) -> int:
        return self.hamiltonian.dim


def build_sector_operators(
    sector: SymmetrySector, params: ModelParams
) -> SectorOperators:
    """Hamiltonian and observables on the zero-momentum positive-parity basis.

    The Hamiltonian is projected with the isometry; the observables are
    diagonal with orbit-invariant entries, so their projected matrices are
    written down directly and are exact.
    """
    spec = sector.spec
    h_full = build_hamiltonian(spec, list(sector.configs), params)
    tag = _basis_tag(spec, projected=True)

    pairs_diag = np.array([float(o.n_pairs) for o in sector.orbits])
    e2_scale = params.e**2 / (2.0 * spec.n_sites)
    e2_diag = np.array([e2_scale * o.flux_square_sum for o in sector.orbits])
    cond_diag = np.array(
        [
            (2.0 * o.n_pairs - spec.n_sites) / (params.a * spec.n_fermion)
            for o in sector.orbits
        ]
    )
    return SectorOperators(
        sector=sector,
        params=params,
        hamiltonian=project_operator(h_full, sector),
        pair_count=HermitianOperator(np.diag(pairs_diag), tag),
        electric_square=HermitianOperator(np.diag(e2_diag), tag),
        condensate=HermitianOperator(np.diag(cond_diag), tag),
    )
