"""Constrained-basis construction: enumeration, counting, symmetry projection."""

from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from openschwinger import (
    GaugeFermionConfig,
    LatticeSpec,
    build_symmetry_sector,
    count_physical_states,
    enumerate_physical_configs,
    gauss_residuals,
    staggered_charges,
)
from openschwinger.lattice import (
    configs_from_json,
    configs_to_json,
    reflect_config,
    translate_config,
)

# physical-space dimensions at cutoff 1, small enough to recount here; the
# odd-N values come from the flux-first scan below, the even-N ones are
# also pinned independently in the acceptance suite
KNOWN_COUNTS = {1: 5, 2: 13, 3: 38, 4: 117, 5: 370, 6: 1186}

# zero-momentum positive-parity dimensions (full space / truncated space)
SECTOR_DIMS = {1: 3, 2: 5, 3: 9, 4: 19, 6: 110}
SECTOR_DIMS_TRUNCATED = {2: 4, 4: 18, 6: 109}


def flux_first_configs(n_sites):
    """Enumerate the physical space by scanning flux tuples.

    Independent of the package's occupation-first construction: the charge on
    site n is the flux difference across it, so each flux tuple determines a
    unique occupation candidate, kept when every entry is 0 or 1.
    """
    nf = 2 * n_sites
    out = set()
    for fluxes in product((-1, 0, 1), repeat=nf):
        occ = []
        for n in range(nf):
            o = (n % 2) - (fluxes[n] - fluxes[n - 1])
            if o not in (0, 1):
                break
            occ.append(o)
        else:
            out.add(GaugeFermionConfig(tuple(occ), tuple(fluxes)))
    return out


@pytest.mark.parametrize("n_sites", [1, 2, 3, 4])
def test_enumeration_matches_flux_first_scan(n_sites):
    spec = LatticeSpec(n_sites=n_sites)
    assert set(enumerate_physical_configs(spec)) == flux_first_configs(n_sites)


@pytest.mark.parametrize("n_sites,expected", sorted(KNOWN_COUNTS.items()))
def test_closed_form_count_matches_enumeration(n_sites, expected):
    spec = LatticeSpec(n_sites=n_sites)
    configs = enumerate_physical_configs(spec)
    assert len(configs) == expected
    assert count_physical_states(n_sites) == expected


def test_counting_is_exact_at_large_volume():
    # integer combinatorics, no floats anywhere
    value = count_physical_states(50)
    assert isinstance(value, int)
    assert value == 37495403206807318414369013


@pytest.mark.parametrize("n_sites", [2, 3, 4])
def test_truncation_removes_the_two_uniform_flux_loops(n_sites):
    full = set(enumerate_physical_configs(LatticeSpec(n_sites=n_sites)))
    kept = set(
        enumerate_physical_configs(
            LatticeSpec(n_sites=n_sites, truncate_total_flux=True)
        )
    )
    removed = full - kept
    assert kept < full
    assert len(removed) == 2
    for cfg in removed:
        assert all(abs(l) == 1 for l in cfg.fluxes)
        assert cfg.total_abs_flux == 2 * n_sites
    for cfg in kept:
        assert cfg.total_abs_flux < 2 * n_sites


def test_staggered_charges_on_the_two_site_chain():
    assert staggered_charges((0, 1)) == (0, 0)
    assert staggered_charges((1, 0)) == (-1, 1)
    assert staggered_charges((1, 1)) == (-1, 0)


@pytest.mark.parametrize("n_sites", [1, 2, 3, 4])
def test_gauss_residuals_vanish_on_every_physical_config(n_sites):
    spec = LatticeSpec(n_sites=n_sites)
    for cfg in enumerate_physical_configs(spec):
        assert gauss_residuals(cfg) == (0,) * spec.n_fermion


def test_gauss_residuals_flag_an_unphysical_config():
    bad = GaugeFermionConfig((0, 1), (1, 0))
    assert any(r != 0 for r in gauss_residuals(bad))


@pytest.mark.parametrize("n_sites", [1, 2, 3, 4, 5])
def test_half_filling_is_implied_by_periodicity(n_sites):
    # sum of charges around the loop telescopes to zero, which forces
    # exactly N occupied sites; no explicit filling filter exists
    for cfg in enumerate_physical_configs(LatticeSpec(n_sites=n_sites)):
        assert sum(cfg.occupations) == n_sites


@pytest.mark.parametrize("n_sites,dim", sorted(SECTOR_DIMS.items()))
def test_sector_dimension_full_space(n_sites, dim):
    sector = build_symmetry_sector(LatticeSpec(n_sites=n_sites))
    assert sector.dim == dim
    assert sector.n_configs == count_physical_states(n_sites)


@pytest.mark.parametrize("n_sites,dim", sorted(SECTOR_DIMS_TRUNCATED.items()))
def test_sector_dimension_truncated_space(n_sites, dim):
    spec = LatticeSpec(n_sites=n_sites, truncate_total_flux=True)
    assert build_symmetry_sector(spec).dim == dim


def _permutation_matrix(configs, op):
    index = {c: i for i, c in enumerate(configs)}
    mat = np.zeros((len(configs), len(configs)))
    for i, cfg in enumerate(configs):
        mat[index[op(cfg)], i] = 1.0
    return mat


@pytest.mark.parametrize("n_sites", [1, 2, 3])
def test_sector_equals_trivial_representation_projector(n_sites):
    """Cross-check the orbit construction against the group-average projector.

    The sector is the trivial representation of the group generated by the
    one-site shift and the reflection; its projector is the group average of
    the permutation matrices, its rank the number of group orbits.  The
    isometry columns must span exactly that subspace.
    """
    spec = LatticeSpec(n_sites=n_sites)
    configs = enumerate_physical_configs(spec)
    t = _permutation_matrix(configs, translate_config)
    p = _permutation_matrix(configs, reflect_config)

    elements = {np.eye(len(configs)).tobytes(): np.eye(len(configs))}
    frontier = list(elements.values())
    while frontier:
        nxt = []
        for g in frontier:
            for gen in (t, p):
                h = gen @ g
                key = h.tobytes()
                if key not in elements:
                    elements[key] = h
                    nxt.append(h)
        frontier = nxt
    projector = sum(elements.values()) / len(elements)

    sector = build_symmetry_sector(spec)
    v = sector.isometry()
    rank = int(round(np.trace(projector)))
    assert rank == sector.dim
    assert np.allclose(projector @ v, v, atol=1e-12)
    assert np.allclose(v.T @ v, np.eye(sector.dim), atol=1e-12)


@pytest.mark.parametrize("n_sites", [1, 2, 3, 4])
def test_orbit_members_closed_under_both_symmetries(n_sites):
    sector = build_symmetry_sector(LatticeSpec(n_sites=n_sites))
    index = {c: i for i, c in enumerate(sector.configs)}
    for orbit in sector.orbits:
        members = set(orbit.members)
        for i in orbit.members:
            cfg = sector.configs[i]
            assert index[translate_config(cfg)] in members
            assert index[reflect_config(cfg)] in members


@pytest.mark.parametrize("truncate", [False, True])
def test_vacuum_is_always_state_zero(truncate):
    for n_sites in (1, 2, 3, 4):
        spec = LatticeSpec(n_sites=n_sites, truncate_total_flux=truncate)
        sector = build_symmetry_sector(spec)
        first = sector.orbits[0]
        assert first.flux_square_sum == 0
        assert first.n_pairs == 0
        assert len(first.members) == 1
        assert all(l == 0 for l in sector.configs[first.representative].fluxes)


def test_orbits_sorted_by_flux_then_pair_count():
    sector = build_symmetry_sector(LatticeSpec(n_sites=4))
    keys = [(o.flux_square_sum, o.n_pairs) for o in sector.orbits]
    assert keys == sorted(keys)


def test_orbit_amplitudes_normalize_the_superposition():
    sector = build_symmetry_sector(LatticeSpec(n_sites=3))
    for orbit in sector.orbits:
        assert orbit.amplitude == pytest.approx(1.0 / np.sqrt(len(orbit.members)))
    # every config belongs to exactly one orbit
    counts = np.zeros(sector.n_configs, dtype=int)
    for orbit in sector.orbits:
        for i in orbit.members:
            counts[i] += 1
    assert np.all(counts == 1)


def test_spec_rejects_bad_parameters():
    with pytest.raises(ValueError):
        LatticeSpec(n_sites=0)
    with pytest.raises(ValueError):
        LatticeSpec(n_sites=2, flux_cutoff=0)


def test_config_json_round_trip():
    spec = LatticeSpec(n_sites=2, truncate_total_flux=True)
    configs = enumerate_physical_configs(spec)
    spec2, configs2 = configs_from_json(configs_to_json(spec, configs))
    assert spec2 == spec
    assert configs2 == configs


@settings(max_examples=60, deadline=None)
@given(
    n_sites=st.integers(min_value=1, max_value=3),
    pick=st.integers(min_value=0, max_value=10**6),
    n_translations=st.integers(min_value=0, max_value=5),
    do_reflect=st.booleans(),
)
def test_symmetries_preserve_the_physical_constraints(
    n_sites, pick, n_translations, do_reflect
):
    configs = enumerate_physical_configs(LatticeSpec(n_sites=n_sites))
    cfg = configs[pick % len(configs)]
    moved = cfg
    for _ in range(n_translations):
        moved = translate_config(moved)
    if do_reflect:
        moved = reflect_config(moved)
    assert moved in set(configs)
    assert gauss_residuals(moved) == (0,) * (2 * n_sites)
    assert moved.flux_square_sum == cfg.flux_square_sum
    assert moved.n_pairs == cfg.n_pairs
    assert moved.total_abs_flux == cfg.total_abs_flux
