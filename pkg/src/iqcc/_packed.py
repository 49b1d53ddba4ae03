"""Vectorized kernels over packed Pauli-sum arrays (N <= 64 qubits).

A packed sum is three parallel arrays: x and z masks as uint64 and float64
coefficients, lexsorted by (x, z) with exact duplicates merged.  The kernels
reproduce the dict-based reference implementations bit for bit where a key
receives at most two float contributions (addition is commutative in IEEE
754), and deterministically everywhere else because the merge order is the
canonical sorted order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import HermiticityError
from .pauli import PauliWord
from .pauli_sum import PauliSum, ReferenceState

PACKED_QUBIT_LIMIT = 64


def _popcount(a: np.ndarray) -> np.ndarray:
    return np.bitwise_count(a).astype(np.int64)


@dataclass(frozen=True)
class PackedSum:
    n_qubits: int
    x: np.ndarray  # uint64, lexsorted with x primary
    z: np.ndarray  # uint64
    c: np.ndarray  # float64

    def __len__(self) -> int:
        return len(self.c)


def _canonical(n_qubits: int, x: np.ndarray, z: np.ndarray, c: np.ndarray) -> PackedSum:
    if len(c) == 0:
        return PackedSum(n_qubits, x, z, c)
    order = np.lexsort((z, x))  # stable: x primary, z secondary
    x, z, c = x[order], z[order], c[order]
    boundary = np.empty(len(x), dtype=bool)
    boundary[0] = True
    np.logical_or(x[1:] != x[:-1], z[1:] != z[:-1], out=boundary[1:])
    starts = np.flatnonzero(boundary)
    summed = np.add.reduceat(c, starts)
    xs, zs = x[starts], z[starts]
    keep = summed != 0.0
    return PackedSum(n_qubits, xs[keep], zs[keep], summed[keep])


def pack(h: PauliSum) -> PackedSum:
    if h.n_qubits > PACKED_QUBIT_LIMIT:
        raise ValueError(f"packed path limited to {PACKED_QUBIT_LIMIT} qubits")
    m = len(h._terms)
    x = np.empty(m, dtype=np.uint64)
    z = np.empty(m, dtype=np.uint64)
    c = np.empty(m, dtype=np.float64)
    for i, ((xi, zi), ci) in enumerate(h._terms.items()):
        x[i] = xi
        z[i] = zi
        c[i] = ci
    return _canonical(h.n_qubits, x, z, c)


def unpack(p: PackedSum) -> PauliSum:
    raw = {
        (int(xi), int(zi)): float(ci)
        for xi, zi, ci in zip(p.x.tolist(), p.z.tolist(), p.c.tolist())
    }
    return PauliSum._from_raw(p.n_qubits, raw)


def dress_packed(p: PackedSum, t_gen: PauliWord, t_opt: float) -> PackedSum:
    """Vectorized counterpart of pauli_sum.dress on packed arrays."""
    if t_opt == 0.0 or len(p) == 0:
        return p
    tx = np.uint64(t_gen.x)
    tz = np.uint64(t_gen.z)
    yt = int(t_gen.y_count())
    anti = (_popcount(p.x & tz) + _popcount(p.z & tx)) % 2 == 1
    if not np.any(anti):
        return p
    cos_t = np.cos(t_opt)
    sin_t = np.sin(t_opt)
    base_c = np.where(anti, p.c * cos_t, p.c)

    ax, az, ac = p.x[anti], p.z[anti], p.c[anti]
    nx = ax ^ tx
    nz = az ^ tz
    k = (
        _popcount(ax & az)
        + yt
        - _popcount(nx & nz)
        + 2 * _popcount(az & tx)
    ) % 4
    spawn_c = np.where(k == 1, ac * sin_t, -ac * sin_t)

    return _canonical(
        p.n_qubits,
        np.concatenate([p.x, nx]),
        np.concatenate([p.z, nz]),
        np.concatenate([base_c, spawn_c]),
    )


def dress_chain(p: PackedSum, pairs) -> PackedSum:
    for gen, t in pairs:
        p = dress_packed(p, gen, t)
    return p


def expectation_packed(p: PackedSum, ref: ReferenceState) -> float:
    """<0|p|0>: diagonal words only, occupied qubits give -1 per z factor."""
    diag = p.x == 0
    if not np.any(diag):
        return 0.0
    occ = np.uint64(ref.occupation)
    parity = _popcount(p.z[diag] & occ) % 2
    vals = np.where(parity == 1, -p.c[diag], p.c[diag])
    return float(np.sum(vals))


def x_group_slice(p: PackedSum, wx: int) -> tuple[int, int]:
    """Index range of terms with the given x mask (x-groups are contiguous)."""
    wx = np.uint64(wx)
    lo = int(np.searchsorted(p.x, wx, side="left"))
    hi = int(np.searchsorted(p.x, wx, side="right"))
    return lo, hi


def block_statistics(
    p: PackedSum, ref: ReferenceState
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per distinct off-diagonal x-support: (x, omega_signed, D).

    omega_signed = <0|I_k|0> times the reference z-eigenvalue at the lowest
    x position (the sign of dE/dt at t=0 for the canonical generator), and
    D = <0|T H T - H|0> = -2 * sum of diagonal terms anticommuting with the
    generator.  Raises on odd-y words (non-hermitian input).
    """
    occ = np.uint64(ref.occupation)
    y = _popcount(p.x & p.z)
    if np.any(y % 2 == 1):
        bad = int(np.flatnonzero(y % 2 == 1)[0])
        from .pauli import render_word

        raise HermiticityError(
            "odd y-count word "
            f"{render_word(PauliWord(int(p.x[bad]), int(p.z[bad]), p.n_qubits))} in operator"
        )

    diag_mask = p.x == 0
    diag_z = p.z[diag_mask]
    diag_parity = _popcount(diag_z & occ) % 2
    diag_vals = np.where(diag_parity == 1, -p.c[diag_mask], p.c[diag_mask])

    off = ~diag_mask
    if not np.any(off):
        empty = np.array([], dtype=np.uint64)
        return empty, np.array([]), np.array([])
    ox, oz, oc = p.x[off], p.z[off], p.c[off]
    # <0|I_k|0> contributions: y-fold sign times reference parity sign
    sy = np.where(_popcount(ox & oz) % 4 == 0, 1.0, -1.0)
    par = np.where(_popcount(oz & occ) % 2 == 1, -1.0, 1.0)
    vals = oc * sy * par
    boundary = np.empty(len(ox), dtype=bool)
    boundary[0] = True
    boundary[1:] = ox[1:] != ox[:-1]
    starts = np.flatnonzero(boundary)
    xs = ox[starts]
    omega = np.add.reduceat(vals, starts)
    # sign of the reference z-eigenvalue at the substituted (lowest-x) qubit
    jmin_bit = xs & (~xs + np.uint64(1))
    omega_signed = np.where((jmin_bit & occ) != 0, -omega, omega)

    n_blocks = len(xs)
    d_values = np.zeros(n_blocks)
    if len(diag_z):
        if len(diag_z) <= n_blocks:
            for zd, vd in zip(diag_z, diag_vals):
                odd = _popcount(xs & zd) % 2 == 1
                d_values[odd] -= 2.0 * vd
        else:
            for i in range(n_blocks):
                odd = _popcount(diag_z & xs[i]) % 2 == 1
                d_values[i] = -2.0 * float(np.sum(diag_vals[odd]))
    return xs, omega_signed, d_values
