"""Generator derivation, ranking, and the QCC energy functional.

Every X-string block of the Ising decomposition yields one canonical
generator: the lowest-index x replaced by y, giving a purely imaginary word
with a potentially non-zero gradient.  For a single generator T the energy is
an exact sinusoid

    E(t) = E0 + w sin(t) + D (1 - cos t) / 2,

where the signed w is the slope dE/dt at t = 0 (its magnitude is the omega of
the ranking formulas) and D = <0| T H T - H |0>.  The closed-form global
minimizer of that sinusoid provides both the importance measure |t| and the
warm start for the multi-generator optimization.

Energies of the full Ansatz are evaluated by exact symbolic conjugation
(dressing) of the Hamiltonian; gradients use the conjugation chain pushed
onto the generators:  dE/dt_j = Im <0| H_L T~_j |0>  with H_L the fully
dressed Hamiltonian and T~_j the generator dressed through the later chain
entries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import CapacityError, InvalidGeneratorError
from .pauli import PauliWord, render_word
from .pauli_sum import (
    IsingDecomposition,
    PauliSum,
    ReferenceState,
    diagonal_expectation,
    dress_sequence,
    expectation,
    ising_decompose,
)

MAX_GENERATORS = 16
_PACKED_LIMIT = 64  # qubit bound of the vectorized path


@dataclass(frozen=True)
class RankedGenerator:
    """A canonical generator with its ranking data."""

    generator: PauliWord
    source_x_string: PauliWord
    omega: float
    omega_signed: float
    d_value: float
    t_estimate: float
    importance: float

    def to_json_dict(self) -> dict:
        return {
            "word": render_word(self.generator),
            "omega": self.omega,
            "d_value": self.d_value,
            "t_estimate": self.t_estimate,
            "importance": self.importance,
        }


class Ansatz:
    """Ordered entanglers (generator, amplitude); at most 16 of them."""

    __slots__ = ("pairs",)

    def __init__(self, pairs: Sequence[tuple[PauliWord, float]]):
        pairs = tuple((g, float(t)) for g, t in pairs)
        if not 1 <= len(pairs) <= MAX_GENERATORS:
            raise CapacityError(
                f"ansatz length {len(pairs)} outside 1..{MAX_GENERATORS}"
            )
        for g, t in pairs:
            if g.y_count() % 2 == 0:
                raise InvalidGeneratorError(f"generator {render_word(g)} has even y-count")
            if not math.isfinite(t):
                raise ValueError("non-finite amplitude")
        self.pairs = pairs

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self) -> Iterator[tuple[PauliWord, float]]:
        return iter(self.pairs)

    @property
    def generators(self) -> tuple[PauliWord, ...]:
        return tuple(g for g, _ in self.pairs)

    @property
    def amplitudes(self) -> tuple[float, ...]:
        return tuple(t for _, t in self.pairs)

    def with_amplitudes(self, amplitudes: Sequence[float]) -> "Ansatz":
        if len(amplitudes) != len(self.pairs):
            raise ValueError("amplitude count mismatch")
        return Ansatz(list(zip(self.generators, amplitudes)))


def derive_canonical_generator(x_string: PauliWord) -> PauliWord:
    """Replace the lowest-index x of an X-string with y."""
    if not x_string.is_x_string():
        raise InvalidGeneratorError(
            f"{render_word(x_string)} is not a non-trivial X-string"
        )
    jmin_bit = x_string.x & -x_string.x
    return PauliWord(x_string.x, jmin_bit, x_string.n_qubits)


def compute_omega(
    decomp: IsingDecomposition, block_index: int, ref: ReferenceState
) -> tuple[float, float]:
    """(omega, omega_signed) for one block: omega = |<0|I_k|0>|.

    The signed value carries the sign of Im <0| H T_k |0> = dE/dt(0), i.e. the
    block expectation times the reference z-eigenvalue at the substituted
    qubit.
    """
    block = decomp.blocks[block_index]
    val = diagonal_expectation(block.iz_factor, ref)
    jmin = (block.x_string.x & -block.x_string.x).bit_length() - 1
    signed = ref.sign(jmin) * val
    return abs(signed), signed


def compute_d(h: PauliSum, t_gen: PauliWord, ref: ReferenceState) -> float:
    """<0| T H T - H |0> = -2 sum of diagonal terms anticommuting with T."""
    if t_gen.y_count() % 2 == 0:
        raise InvalidGeneratorError(f"generator {render_word(t_gen)} has even y-count")
    tx = t_gen.x
    occ = ref.occupation
    total = 0.0
    for (x, z), c in h.raw_items():
        if x == 0 and (z & tx).bit_count() % 2:
            total += -c if (z & occ).bit_count() % 2 else c
    return -2.0 * total


def estimate_amplitude(omega_signed: float, d: float) -> tuple[float, float]:
    """Global minimizer of E(t) = E0 + w sin t + D (1 - cos t)/2 and its lowering.

    A two-argument arctangent covers every sign of D; the lowering is
    D/2 - sqrt((D/2)^2 + w^2) <= 0.  A vanishing omega is a stationary
    direction and returns (0, 0) by contract.
    """
    if omega_signed == 0.0:
        return 0.0, 0.0
    half_d = 0.5 * d
    t = math.atan2(half_d, omega_signed) - 0.5 * math.pi
    if t <= -math.pi:
        t += 2.0 * math.pi
    delta_e = half_d - math.hypot(half_d, omega_signed)
    return t, delta_e


def block_ranking_data(
    h: PauliSum, ref: ReferenceState
) -> list[tuple[int, float, float]]:
    """(x-support, omega_signed, D) per Ising block, deterministic order."""
    if h.n_qubits <= _PACKED_LIMIT:
        from . import _packed

        xs, omega_signed, d_vals = _packed.block_statistics(_packed.pack(h), ref)
        return list(zip(xs.tolist(), omega_signed.tolist(), d_vals.tolist()))
    decomp = ising_decompose(h)
    out = []
    for idx, block in enumerate(decomp.blocks):
        _omega, omega_signed = compute_omega(decomp, idx, ref)
        gen = derive_canonical_generator(block.x_string)
        out.append((block.x_string.x, omega_signed, compute_d(h, gen, ref)))
    return out


def rank_generators(
    h: PauliSum,
    ref: ReferenceState,
    top_l: int,
    measure: str = "amplitude",
) -> tuple[list[RankedGenerator], list[RankedGenerator]]:
    """One canonical generator per Ising block, ranked by importance.

    ``measure`` selects |optimal amplitude| (default) or |gradient| = omega.
    Ties break on the deterministic word order.  Returns (top ``top_l``,
    remainder); both empty for a diagonal Hamiltonian.
    """
    if not 1 <= top_l <= MAX_GENERATORS:
        raise CapacityError(f"top_l {top_l} outside 1..{MAX_GENERATORS}")
    if measure not in ("amplitude", "gradient"):
        raise ValueError(f"unknown importance measure {measure!r}")
    n = h.n_qubits
    ranked = []
    for x_support, omega_signed, d_val in block_ranking_data(h, ref):
        x_string = PauliWord(x_support, 0, n)
        gen = PauliWord(x_support, x_support & -x_support, n)
        t_est, _ = estimate_amplitude(omega_signed, d_val)
        importance = abs(t_est) if measure == "amplitude" else abs(omega_signed)
        ranked.append(
            RankedGenerator(
                gen, x_string, abs(omega_signed), omega_signed, d_val, t_est, importance
            )
        )
    ranked.sort(key=lambda r: (-r.importance, r.generator.sort_key()))
    return ranked[:top_l], ranked[top_l:]


def qcc_energy(h: PauliSum, ansatz: Ansatz, ref: ReferenceState) -> float:
    """<0| U^dag H U |0> by dressing H through the Ansatz, then projecting."""
    if h.n_qubits <= _PACKED_LIMIT:
        from . import _packed

        chain = _packed.dress_chain(_packed.pack(h), list(ansatz))
        return _packed.expectation_packed(chain, ref)
    return expectation(dress_sequence(h, ansatz), ref)


def qcc_energy_and_gradient(
    h: PauliSum, ansatz: Ansatz, ref: ReferenceState
) -> tuple[float, list[float]]:
    """Energy and exact analytic gradient in one pass.

    The fully dressed H_L serves both: E = <0|H_L|0> and
    dE/dt_j = Im <0| H_L T~_j |0>, where T~_j is generator j conjugated
    through entries j+1..L of the chain.
    """
    pairs = list(ansatz)
    if h.n_qubits <= _PACKED_LIMIT:
        return _packed_energy_and_gradient(h, pairs, ref)
    dressed = dress_sequence(h, pairs)
    energy = expectation(dressed, ref)

    by_x: dict[int, list[tuple[int, float]]] = {}
    for (x, z), c in dressed.raw_items():
        by_x.setdefault(x, []).append((z, c))

    occ = ref.occupation
    grad = []
    for j, (gen, _t) in enumerate(pairs):
        tilde = dress_sequence(
            PauliSum(h.n_qubits, [(gen, 1.0)]), pairs[j + 1 :]
        )
        gj = 0.0
        for (wx, wz), cw in tilde.raw_items():
            matches = by_x.get(wx)
            if not matches:
                continue
            yw = (wx & wz).bit_count()
            for pz, cp in matches:
                # phase of P * W: the product is diagonal, so Im(i^k) = +-1
                k = ((wx & pz).bit_count() + yw + 2 * (pz & wx).bit_count()) % 4
                if k % 2 == 0:
                    continue
                val = cp * cw if k == 1 else -cp * cw
                if ((pz ^ wz) & occ).bit_count() % 2:
                    val = -val
                gj += val
        grad.append(gj)
    return energy, grad


def _packed_energy_and_gradient(
    h: PauliSum, pairs: list[tuple[PauliWord, float]], ref: ReferenceState
) -> tuple[float, list[float]]:
    from . import _packed

    chain = _packed.dress_chain(_packed.pack(h), pairs)
    energy = _packed.expectation_packed(chain, ref)
    occ = np.uint64(ref.occupation)
    grad = []
    for j, (gen, _t) in enumerate(pairs):
        tilde = _packed.dress_chain(
            _packed.pack(PauliSum(h.n_qubits, [(gen, 1.0)])), pairs[j + 1 :]
        )
        gj = 0.0
        for wx, wz, cw in zip(tilde.x.tolist(), tilde.z.tolist(), tilde.c.tolist()):
            lo, hi = _packed.x_group_slice(chain, wx)
            if lo == hi:
                continue
            pz = chain.z[lo:hi]
            pc = chain.c[lo:hi]
            yw = (wx & wz).bit_count()
            m = np.bitwise_count(pz & np.uint64(wx)).astype(np.int64)
            k = (3 * m + yw) % 4
            val = np.where(k == 1, pc, -pc)
            val = np.where(k % 2 == 1, val, 0.0)
            parity = np.bitwise_count((pz ^ np.uint64(wz)) & occ).astype(np.int64) % 2
            val = np.where(parity == 1, -val, val)
            gj += cw * float(np.sum(val))
        grad.append(gj)
    return energy, grad


def qcc_gradient(h: PauliSum, ansatz: Ansatz, ref: ReferenceState) -> list[float]:
    return qcc_energy_and_gradient(h, ansatz, ref)[1]
