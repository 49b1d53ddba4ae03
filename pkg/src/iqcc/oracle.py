"""Brute-force verification backend: matrix realization and diagonalization.

Basis convention (single source of truth, shared with ReferenceState): basis
index b has bit j set iff qubit j is occupied (spin-down, z-eigenvalue -1),
with qubit 0 as the least significant bit.  A canonical word i^y X^x Z^z acts
on |b> as  i^y * (-1)^popcount(z & b) * |b XOR x>,  so Z0 on one qubit is
diag(+1, -1) in basis order (unoccupied, occupied).

Dense realizations are allowed up to 12 qubits; a sparse matrix-vector path
covers 13-16.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import CapacityError, IqccError
from .pauli import PauliWord, multiply
from .pauli_sum import PauliSum, ReferenceState

DENSE_QUBIT_LIMIT = 12
SPARSE_QUBIT_LIMIT = 16

_I_POW = np.array([1, 1j, -1, -1j])


def _word_action(x: int, z: int, y: int, basis: np.ndarray):
    """Rows, column signs for one word over all basis columns."""
    rows = basis ^ x
    signs = np.where(np.bitwise_count(basis & z) % 2 == 1, -1.0, 1.0)
    return rows, _I_POW[y % 4] * signs


def to_matrix(h: PauliSum) -> np.ndarray:
    """Dense 2^N x 2^N realization of a Pauli sum."""
    n = h.n_qubits
    if n > DENSE_QUBIT_LIMIT:
        raise CapacityError(f"{n} qubits exceeds dense limit {DENSE_QUBIT_LIMIT}")
    dim = 1 << n
    basis = np.arange(dim, dtype=np.uint64)
    mat = np.zeros((dim, dim), dtype=complex)
    for (x, z), c in h.raw_items():
        rows, vals = _word_action(x, z, (x & z).bit_count(), basis)
        mat[rows, basis] += c * vals
    return mat


def to_sparse(h: PauliSum) -> sp.csr_matrix:
    n = h.n_qubits
    if n > SPARSE_QUBIT_LIMIT:
        raise CapacityError(f"{n} qubits exceeds sparse limit {SPARSE_QUBIT_LIMIT}")
    dim = 1 << n
    basis = np.arange(dim, dtype=np.uint64)
    rows_all, cols_all, vals_all = [], [], []
    for (x, z), c in h.raw_items():
        rows, vals = _word_action(x, z, (x & z).bit_count(), basis)
        rows_all.append(rows.astype(np.int64))
        cols_all.append(basis.astype(np.int64))
        vals_all.append(c * vals)
    if not rows_all:
        return sp.csr_matrix((dim, dim), dtype=complex)
    return sp.csr_matrix(
        (np.concatenate(vals_all), (np.concatenate(rows_all), np.concatenate(cols_all))),
        shape=(dim, dim),
    )


def word_matrix(w: PauliWord) -> np.ndarray:
    return to_matrix(PauliSum(w.n_qubits, [(w.canonical()[0], 1.0)])) * _I_POW[w.phase_exp]


def ground_state(h: PauliSum) -> tuple[float, np.ndarray]:
    """Lowest eigenpair; dense below 11 qubits, Lanczos above.

    The residual ||Hv - Ev|| is verified to 1e-10 times the coefficient scale.
    """
    n = h.n_qubits
    if n > SPARSE_QUBIT_LIMIT:
        raise CapacityError(f"{n} qubits exceeds oracle limit {SPARSE_QUBIT_LIMIT}")
    if n <= 10:
        mat = to_matrix(h)
        vals, vecs = np.linalg.eigh(mat)
        energy, vec = float(vals[0]), vecs[:, 0]
        mv = mat @ vec
    else:
        mat = to_sparse(h)
        dim = mat.shape[0]
        v0 = np.full(dim, 1.0 / np.sqrt(dim))
        vals, vecs = spla.eigsh(mat, k=1, which="SA", v0=v0, tol=0)
        energy, vec = float(vals[0]), vecs[:, 0]
        mv = mat @ vec
    scale = max(1.0, abs(energy))
    resid = float(np.linalg.norm(mv - energy * vec))
    if resid > 1e-10 * scale:
        raise IqccError(f"eigen-residual {resid:.3e} above tolerance")
    return energy, vec


def expectation_matrix(op: np.ndarray, vec: np.ndarray) -> float:
    return float(np.real(np.vdot(vec, op @ vec)))


def spin_resolved_spectrum(
    h: PauliSum,
    s_squared: PauliSum,
    s_z: PauliSum,
    sector: tuple[float, float],
) -> float:
    """Lowest eigenvalue of h among simultaneous (S^2, S_z) eigenstates.

    ``sector`` is (s, m_s); states must have <S^2> within 1e-6 of s(s+1) and
    <S_z> within 1e-6 of m_s.  Degenerate h-eigenspaces are resolved by
    diagonalizing S^2 and then S_z inside each cluster, so spin labels are
    sharp even across multiplet degeneracies.
    """
    n = h.n_qubits
    if n > DENSE_QUBIT_LIMIT:
        raise CapacityError(f"{n} qubits exceeds dense limit {DENSE_QUBIT_LIMIT}")
    s, m_s = sector
    hm = to_matrix(h)
    s2m = to_matrix(s_squared)
    szm = to_matrix(s_z)
    for name, om in (("S^2", s2m), ("S_z", szm)):
        comm = om @ hm - hm @ om
        if np.max(np.abs(comm)) > 1e-10 * max(1.0, np.max(np.abs(hm))):
            raise IqccError(f"{name} does not commute with the Hamiltonian")

    evals, evecs = np.linalg.eigh(hm)
    target_s2 = s * (s + 1.0)
    best = None
    idx = 0
    dim = len(evals)
    while idx < dim:
        # cluster nearly degenerate h-eigenvalues
        j = idx + 1
        while j < dim and evals[j] - evals[idx] < 1e-9 * max(1.0, abs(evals[idx])):
            j += 1
        block = evecs[:, idx:j]
        s2_block = block.conj().T @ s2m @ block
        s2_vals, s2_vecs = np.linalg.eigh(s2_block)
        for s2_val in np.unique(np.round(s2_vals, 6)):
            sel = np.abs(s2_vals - s2_val) < 1e-6
            sub = block @ s2_vecs[:, sel]
            sz_sub = sub.conj().T @ szm @ sub
            sz_vals, _ = np.linalg.eigh(sz_sub)
            if abs(s2_val - target_s2) < 1e-6 and np.any(np.abs(sz_vals - m_s) < 1e-6):
                energy = float(evals[idx])
                if best is None or energy < best:
                    best = energy
        if best is not None:
            return best
        idx = j
    raise IqccError(f"no eigenstates in spin sector (s={s}, m_s={m_s})")


def reference_vector(ref: ReferenceState) -> np.ndarray:
    vec = np.zeros(1 << ref.n_qubits, dtype=complex)
    vec[ref.basis_index()] = 1.0
    return vec


def ansatz_unitary(entanglers, n_qubits: int) -> np.ndarray:
    """Dense product of exp(-i t T / 2) factors in the given order.

    The first entangler is the leftmost factor, matching the dressing
    convention used by the symbolic engine.
    """
    dim = 1 << n_qubits
    u = np.eye(dim, dtype=complex)
    for t_gen, t_val in entanglers:
        tm = word_matrix(t_gen)
        u = u @ (np.cos(t_val / 2) * np.eye(dim) - 1j * np.sin(t_val / 2) * tm)
    return u


def multiplication_check(a: PauliWord, b: PauliWord) -> bool:
    """matrix(a) @ matrix(b) == i^k matrix(c) with (c, k) = multiply(a, b)."""
    c, k = multiply(a, b)
    lhs = word_matrix(a) @ word_matrix(b)
    rhs = _I_POW[k] * word_matrix(c)
    return bool(np.allclose(lhs, rhs, atol=1e-12))
