"""Shared fixtures and the acceptance-summary terminal hook."""

import numpy as np
import pytest

from openschwinger import (
    BathParams,
    LatticeSpec,
    ModelParams,
    build_lindblad_operator,
    build_sector_operators,
    build_symmetry_sector,
)

# Populated by tests/test_acceptance.py; echoed after the run so the
# per-criterion verdicts are visible even with output capture on.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def standard_setup(n_sites, *, truncate=True, coupling=3.2, beta=0.1):
    """Sector operators and Lindblad operator at the standard working point
    (a = e = 1, m = 0.1, T = 1/beta)."""
    spec = LatticeSpec(n_sites=n_sites, flux_cutoff=1, truncate_total_flux=truncate)
    sector = build_symmetry_sector(spec)
    params = ModelParams(a=1.0, e=1.0, m=0.1)
    ops = build_sector_operators(sector, params)
    bath = BathParams.from_beta(beta, coupling)
    lop = build_lindblad_operator(ops.hamiltonian, ops.condensate, spec, params, bath)
    return spec, sector, ops, bath, lop


@pytest.fixture(scope="session")
def n2_setup():
    """N=2 truncated sector (dim 4), the standard dynamics workhorse."""
    return standard_setup(2)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240814)
