"""Gauge-invariant state space of the staggered lattice Schwinger model.

One spatial dimension, periodic boundary conditions.  N spatial sites become
``n_fermion = 2N`` staggered fermion sites; even fermion sites host electrons,
odd ones positrons (an *occupied* even site is an electron, an *empty* odd
site is a positron).  The bare vacuum is the staggered Dirac sea: even sites
empty, odd sites occupied.  Integer link fluxes ``l[n]`` live between fermion
sites n and n+1 and are restricted to ``|l[n]| <= flux_cutoff``.

Gauss's law ties the two together site by site,

    l[n] - l[n-1] = q[n],    q[n] = (n odd) - occ[n],

so electrons carry charge -1 and positrons +1 and the vacuum is neutral with
zero flux everywhere.  Only configurations satisfying this constraint at every
site are physical; everything in this module enumerates, counts, and
symmetry-reduces that constrained space.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from math import comb

import numpy as np

__all__ = [
    "LatticeSpec",
    "GaugeFermionConfig",
    "staggered_charges",
    "gauss_residuals",
    "count_physical_states",
    "enumerate_physical_configs",
    "translate_config",
    "reflect_config",
    "SymmetrySector",
    "build_symmetry_sector",
    "configs_to_json",
    "configs_from_json",
]


# ---------------------------------------------------------------------------
# lattice geometry and configurations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LatticeSpec:
    """Geometry and truncation choices for one lattice.

    Parameters
    ----------
    n_sites:
        Number of spatial sites N (>= 1).  The fermion chain has 2N sites.
    flux_cutoff:
        Largest allowed |flux| on any link.  The closed-form state count
        assumes the default cutoff of 1; enumeration works for any value.
    truncate_total_flux:
        If True, additionally require ``sum(|l[n]|) < 2N``.  This removes the
        maximally-stretched flux configurations (uniform |l| = 1 loops) and is
        the space used for dynamics runs; matrix fixtures use the full space.
    """

    n_sites: int
    flux_cutoff: int = 1
    truncate_total_flux: bool = False

    def __post_init__(self):
        if self.n_sites < 1:
            raise ValueError(f"n_sites must be >= 1, got {self.n_sites}")
        if self.flux_cutoff < 1:
            raise ValueError(f"flux_cutoff must be >= 1, got {self.flux_cutoff}")

    @property
    def n_fermion(self) -> int:
        return 2 * self.n_sites


@dataclass(frozen=True)
class GaugeFermionConfig:
    """A joint occupation/flux basis configuration.

    ``occupations[n]`` is 0 or 1 for fermion site n; ``fluxes[n]`` is the
    integer flux on the link between sites n and n+1 (the last link wraps
    around).  Instances are hashable so they can serve as dict keys during
    orbit construction.
    """

    occupations: tuple[int, ...]
    fluxes: tuple[int, ...]

    @property
    def n_pairs(self) -> int:
        """Number of electron-positron pairs (= occupied even sites)."""
        return sum(self.occupations[0::2])

    @property
    def flux_square_sum(self) -> int:
        return sum(l * l for l in self.fluxes)

    @property
    def total_abs_flux(self) -> int:
        return sum(abs(l) for l in self.fluxes)

    def sort_key(self):
        return (self.flux_square_sum, self.n_pairs, self.occupations, self.fluxes)


def staggered_charges(occupations) -> tuple[int, ...]:
    """Charge q[n] = (n odd) - occ[n] at each fermion site."""
    return tuple((n % 2) - occ for n, occ in enumerate(occupations))


def gauss_residuals(config: GaugeFermionConfig) -> tuple[int, ...]:
    """l[n] - l[n-1] - q[n] for every site; all zero iff physical."""
    occ, flux = config.occupations, config.fluxes
    q = staggered_charges(occ)
    nf = len(occ)
    return tuple(flux[n] - flux[(n - 1) % nf] - q[n] for n in range(nf))


# ---------------------------------------------------------------------------
# counting (closed form, exact integers)
# ---------------------------------------------------------------------------

def count_physical_states(n_sites: int, flux_cutoff: int = 1) -> int:
    """Closed-form dimension of the physical space at |flux| <= 1.

    A configuration with M pairs is a cyclic arrangement of M flux strings of
    odd length x_i (each string connects a positron to an electron across
    x_i links of |flux| = 1) separated by M zero-flux gaps of length y_i >= 1,
    with sum x_i + sum y_i = 2N.  Stars-and-bars counts the compositions and
    the factor 2N/M removes the cyclic relabeling of the M strings; the three
    charge-free states (uniform flux -1, 0, +1) are added at the end.

    Exact integer arithmetic throughout, so large N is fine.
    """
    if flux_cutoff != 1:
        raise ValueError("closed-form count only known for flux_cutoff=1")
    if n_sites < 1:
        raise ValueError("n_sites must be >= 1")
    nf = 2 * n_sites
    total = 0
    for m in range(1, n_sites + 1):
        inner = 0
        for k in range(0, n_sites - m + 1):
            inner += comb(m - 1 + k, m - 1) * comb(nf - 2 * k - m - 1, m - 1)
        # 2N/M need not be integer on its own; the product always is.
        num = nf * inner
        assert num % m == 0
        total += num // m
    return total + 3


# ---------------------------------------------------------------------------
# enumeration
# ---------------------------------------------------------------------------

def enumerate_physical_configs(spec: LatticeSpec) -> list[GaugeFermionConfig]:
    """All physical configurations, in canonical order.

    Occupation patterns are scanned at half filling (Gauss's law around the
    periodic lattice forces total charge zero, i.e. exactly N fermions); for
    each pattern the fluxes follow recursively from one seed link, so at most
    ``2*flux_cutoff + 1`` candidates exist per pattern.

    Canonical order sorts by (sum of flux squares, pair count, occupations,
    fluxes); the first entry is always the bare vacuum.
    """
    nf = spec.n_fermion
    cutoff = spec.flux_cutoff
    found = []
    for bits in range(1 << nf):
        occ = tuple((bits >> n) & 1 for n in range(nf))
        if sum(occ) != spec.n_sites:
            continue
        q = staggered_charges(occ)
        # partial sums of charge fix every flux relative to the seed link
        rel = []
        acc = 0
        for n in range(nf):
            acc += q[n]
            rel.append(acc)
        # acc == 0 here by neutrality; seed c is the flux on the last link,
        # and rel contains 0 there, so |c| <= cutoff is implied by the range
        lo = max(-cutoff - r for r in rel)
        hi = min(cutoff - r for r in rel)
        for c in range(lo, hi + 1):
            flux = tuple(c + r for r in rel)
            cfg = GaugeFermionConfig(occ, flux)
            if spec.truncate_total_flux and cfg.total_abs_flux >= nf:
                continue
            found.append(cfg)
    found.sort(key=GaugeFermionConfig.sort_key)
    return found


# ---------------------------------------------------------------------------
# symmetries: translation by one spatial site, reflection about site 0
# ---------------------------------------------------------------------------

def translate_config(config: GaugeFermionConfig) -> GaugeFermionConfig:
    """Shift by one spatial site (two fermion sites, preserving staggering)."""
    occ, flux = config.occupations, config.fluxes
    nf = len(occ)
    return GaugeFermionConfig(
        tuple(occ[(n - 2) % nf] for n in range(nf)),
        tuple(flux[(n - 2) % nf] for n in range(nf)),
    )


def reflect_config(config: GaugeFermionConfig) -> GaugeFermionConfig:
    """Spatial reflection about fermion site 0.

    Site n maps to -n (even sites stay even, so electrons map to electrons);
    the link between n and n+1 lands on the link between -n-1 and -n with the
    flux sign flipped, electric fields being odd under reflection.
    """
    occ, flux = config.occupations, config.fluxes
    nf = len(occ)
    return GaugeFermionConfig(
        tuple(occ[(-n) % nf] for n in range(nf)),
        tuple(-flux[(-n - 1) % nf] for n in range(nf)),
    )


# ---------------------------------------------------------------------------
# zero-momentum, positive-parity sector
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SymmetryOrbit:
    """One basis state of the projected sector: a symmetry orbit of configs.

    ``members`` are indices into the canonical config list; the basis state is
    the uniform superposition with amplitude ``1/sqrt(len(members))``.  For a
    translation orbit mapped to a different orbit by reflection, ``members``
    is the union of the two and ``representative``/``partner_representative``
    record where each half came from.
    """

    members: tuple[int, ...]
    representative: int
    partner_representative: int | None
    flux_square_sum: int
    n_pairs: int

    @property
    def amplitude(self) -> float:
        return 1.0 / np.sqrt(len(self.members))


@dataclass(frozen=True)
class SymmetrySector:
    """Zero-momentum, positive-parity subspace of a physical config space."""

    spec: LatticeSpec
    configs: tuple[GaugeFermionConfig, ...]
    orbits: tuple[SymmetryOrbit, ...]

    @property
    def dim(self) -> int:
        return len(self.orbits)

    @property
    def n_configs(self) -> int:
        return len(self.configs)

    def isometry(self) -> np.ndarray:
        """(n_configs x dim) map V from sector coordinates to config
        coordinates; columns are orthonormal, so V.T @ V = identity."""
        v = np.zeros((len(self.configs), len(self.orbits)))
        for s, orbit in enumerate(self.orbits):
            v[list(orbit.members), s] = orbit.amplitude
        return v


def build_symmetry_sector(spec: LatticeSpec) -> SymmetrySector:
    """Project the physical space onto zero momentum and positive parity.

    Translation orbits are superposed uniformly (momentum zero); reflection
    then either fixes a translation orbit as a set (the zero-momentum state is
    automatically parity-even) or swaps two orbits, whose symmetric
    combination survives.  Either way each sector basis state is a uniform
    superposition over one orbit of the full symmetry group, and the count of
    such orbits is the sector dimension.

    Basis states are ordered by (flux square sum, pair count, lexicographic
    representative); both sort observables are orbit invariants.
    """
    configs = enumerate_physical_configs(spec)
    index = {c: i for i, c in enumerate(configs)}

    # translation orbits, each keyed by its sorted member tuple
    seen = set()
    t_orbits = []
    for i, cfg in enumerate(configs):
        if i in seen:
            continue
        orbit = [i]
        nxt = translate_config(cfg)
        while nxt != cfg:
            orbit.append(index[nxt])
            nxt = translate_config(nxt)
        seen.update(orbit)
        t_orbits.append(tuple(sorted(orbit)))

    orbit_of = {}
    for members in t_orbits:
        for i in members:
            orbit_of[i] = members

    # pair translation orbits under reflection
    orbits = []
    done = set()
    for members in t_orbits:
        if members in done:
            continue
        partner = orbit_of[index[reflect_config(configs[members[0]])]]
        done.add(members)
        rep = min(members, key=lambda i: configs[i].sort_key())
        if partner == members:
            combined = members
            partner_rep = None
        else:
            done.add(partner)
            combined = tuple(sorted(members + partner))
            partner_rep = min(partner, key=lambda i: configs[i].sort_key())
        c0 = configs[rep]
        orbits.append(SymmetryOrbit(
            members=combined,
            representative=rep,
            partner_representative=partner_rep,
            flux_square_sum=c0.flux_square_sum,
            n_pairs=c0.n_pairs,
        ))

    orbits.sort(key=lambda o: configs[o.representative].sort_key())
    return SymmetrySector(spec=spec, configs=tuple(configs), orbits=tuple(orbits))


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def configs_to_json(spec: LatticeSpec, configs) -> str:
    payload = {
        "n_sites": spec.n_sites,
        "flux_cutoff": spec.flux_cutoff,
        "truncate_total_flux": spec.truncate_total_flux,
        "configs": [
            {"occupations": list(c.occupations), "fluxes": list(c.fluxes)}
            for c in configs
        ],
    }
    return json.dumps(payload, indent=2)


def configs_from_json(text: str) -> tuple[LatticeSpec, list[GaugeFermionConfig]]:
    payload = json.loads(text)
    spec = LatticeSpec(
        n_sites=payload["n_sites"],
        flux_cutoff=payload["flux_cutoff"],
        truncate_total_flux=payload["truncate_total_flux"],
    )
    configs = [
        GaugeFermionConfig(tuple(d["occupations"]), tuple(d["fluxes"]))
        for d in payload["configs"]
    ]
    return spec, configs
