"""Quantum-circuit emulation of the Lindblad evolution by Stinespring dilation.

One ancilla qubit is enough for a single Lindblad operator.  Per cycle of
length dt the register (ancilla as the leftmost, most significant factor)
starts in |0><0| (x) rho, evolves under

    U_J = exp(-i J sqrt(dt)),   J = [[0, L+], [L, 0]],
    U_H = exp(-i H dt)          (system factor only),

applied in that order, and the ancilla is traced out and reset.  The cycle is
an exactly completely-positive trace-preserving map for any dt; its expansion
in dt reproduces the Lindblad generator at first order, so many short cycles
converge to the continuous evolution.
"""

from __future__ import annotations

import numpy as np

from .lindblad import DensityMatrix, EvolutionRecord, _matrix_of, _record_point

__all__ = [
    "build_dilation_hamiltonian",
    "unitary_from_hamiltonian",
    "cycle_propagator",
    "dilation_cycle",
    "dilation_evolve",
]


def build_dilation_hamiltonian(lindblad_op) -> np.ndarray:
    """J = [[0, L+], [L, 0]]: Hermitian on ancilla (x) system."""
    lop = _matrix_of(lindblad_op)
    dim = lop.shape[0]
    j = np.zeros((2 * dim, 2 * dim), dtype=lop.dtype)
    j[:dim, dim:] = lop.conj().T
    j[dim:, :dim] = lop
    return j


def unitary_from_hamiltonian(h, t: float) -> np.ndarray:
    """exp(-i h t) through the eigendecomposition of Hermitian h."""
    evals, evecs = np.linalg.eigh(_matrix_of(h))
    phases = np.exp(-1j * evals * t)
    return (evecs * phases) @ evecs.conj().T


def cycle_propagator(hamiltonian, lindblad_op, dt: float) -> np.ndarray:
    """First block column of (1 (x) U_H) U_J, all a cycle needs.

    Starting from |0><0| (x) rho only the first d columns of the combined
    unitary act on nonzero input, so the cycle is W rho W+ followed by the
    partial trace over the ancilla blocks.
    """
    if dt <= 0:
        raise ValueError(f"cycle length must be positive, got {dt}")
    lop = _matrix_of(lindblad_op)
    dim = lop.shape[0]
    u_j = unitary_from_hamiltonian(build_dilation_hamiltonian(lop), np.sqrt(dt))
    u_h = unitary_from_hamiltonian(hamiltonian, dt)
    w = u_j[:, :dim].copy()
    w[:dim, :] = u_h @ w[:dim, :]
    w[dim:, :] = u_h @ w[dim:, :]
    return w


def dilation_cycle(rho, w: np.ndarray) -> DensityMatrix:
    """Apply one precomputed cycle: trace the ancilla out of W rho W+."""
    r = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
    dim = r.shape[0]
    m = w @ r @ w.conj().T
    return DensityMatrix(m[:dim, :dim] + m[dim:, dim:])


def dilation_evolve(
    rho0,
    hamiltonian,
    lindblad_op,
    t_max: float,
    n_cycles: int,
    *,
    pair_count,
    electric_square,
    trace_tol: float = 1e-12,
    psd_tol: float = 1e-10,
) -> EvolutionRecord:
    """Run n_cycles dilation cycles of length t_max / n_cycles.

    The state is validated after every cycle (trace to ``trace_tol``,
    positivity to ``psd_tol``); the returned record samples every cycle
    boundary including t=0.
    """
    if n_cycles < 1:
        raise ValueError(f"need at least one cycle, got {n_cycles}")
    dt = t_max / n_cycles
    w = cycle_propagator(hamiltonian, lindblad_op, dt)
    pairs_mat = _matrix_of(pair_count)
    e2_mat = _matrix_of(electric_square)

    rho = rho0.matrix if isinstance(rho0, DensityMatrix) else np.asarray(rho0)
    rho = rho.astype(complex)
    rows = []
    max_herm = 0.0
    for k in range(n_cycles + 1):
        if k > 0:
            rho = dilation_cycle(rho, w).validate(
                trace_tol=trace_tol, herm_tol=1e-10, psd_tol=psd_tol
            ).matrix
        n_val, e_val, tr, purity, herm, mn = _record_point(
            rho, None, None, pairs_mat, e2_mat
        )
        max_herm = max(max_herm, herm)
        rows.append((k * dt, n_val, e_val, tr, purity, mn))
    data = np.array(rows)
    return EvolutionRecord(
        times=data[:, 0], n_pairs=data[:, 1], e2=data[:, 2],
        trace=data[:, 3], purity=data[:, 4], min_eig=data[:, 5],
        max_hermiticity_error=max_herm,
    )
