"""Sparse real-coefficient sums of Pauli words and their exact transformations.

Coefficients are in Hartree throughout.  A sum is held as a mapping from the
canonical (phase-free) word, keyed by its raw ``(x, z)`` masks, to a float.
Zero coefficients are removed on construction; insertion order is whatever
order the terms were produced in, which the pipeline keeps deterministic.

The interesting operations:

* ``ising_decompose`` regroups a hermitian sum into a z-only diagonal part
  plus blocks of z-only prefactors attached to distinct X-strings.
* ``dress`` conjugates a sum by exp(-i t T / 2) for a purely imaginary word
  T, exactly, term by term.  Words commuting with T pass through; a word P
  anticommuting with T keeps cos(t) of its coefficient and spawns the single
  product direction i*P*T with a sin(t)-weighted real coefficient.
* ``prune`` drops small terms and reports the dropped absolute weight, an
  upper bound on the spectral-norm perturbation.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import DimensionError, HermiticityError, InvalidGeneratorError
from .pauli import PauliWord, parse_word, render_word


@dataclass(frozen=True, slots=True)
class ReferenceState:
    """Fixed qubit product state: bit j set means qubit j occupied (spin-down).

    Occupied means z-eigenvalue -1.  The state never changes during iQCC
    iterations.
    """

    occupation: int
    n_qubits: int

    def __post_init__(self):
        if self.occupation & ~((1 << self.n_qubits) - 1):
            raise DimensionError("occupation mask exceeds qubit count")

    @property
    def n_occupied(self) -> int:
        return self.occupation.bit_count()

    def sign(self, qubit: int) -> int:
        """z-eigenvalue of the given qubit: -1 if occupied, +1 otherwise."""
        return -1 if (self.occupation >> qubit) & 1 else 1

    def parity_sign(self, z_mask: int) -> int:
        """Product of z-eigenvalues over the mask."""
        return -1 if (z_mask & self.occupation).bit_count() % 2 else 1

    def basis_index(self) -> int:
        """Index of this state in the oracle's basis (qubit 0 = LSB)."""
        return self.occupation


class PauliSum:
    """Real linear combination of canonical Pauli words over ``n_qubits``."""

    __slots__ = ("n_qubits", "_terms")

    def __init__(self, n_qubits: int, terms: Iterable[tuple[PauliWord, float]] | None = None):
        self.n_qubits = n_qubits
        data: dict[tuple[int, int], float] = {}
        if terms:
            items = terms.items() if isinstance(terms, dict) else terms
            for word, coeff in items:
                if word.n_qubits != n_qubits:
                    raise DimensionError(
                        f"word over {word.n_qubits} qubits in a {n_qubits}-qubit sum"
                    )
                if word.phase_exp:
                    raise ValueError("sums are keyed on canonical words (phase_exp == 0)")
                key = (word.x, word.z)
                data[key] = data.get(key, 0.0) + float(coeff)
        self._terms = {k: c for k, c in data.items() if c != 0.0}

    @classmethod
    def _from_raw(cls, n_qubits: int, raw: dict[tuple[int, int], float]) -> "PauliSum":
        """Adopt a prebuilt raw dict (zeros already removed)."""
        out = cls.__new__(cls)
        out.n_qubits = n_qubits
        out._terms = raw
        return out

    @classmethod
    def identity(cls, n_qubits: int, coeff: float = 1.0) -> "PauliSum":
        return cls(n_qubits, [(PauliWord.identity(n_qubits), coeff)])

    # -- inspection ------------------------------------------------------

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def items(self) -> Iterator[tuple[PauliWord, float]]:
        n = self.n_qubits
        for (x, z), c in self._terms.items():
            yield PauliWord(x, z, n), c

    def sorted_items(self) -> list[tuple[PauliWord, float]]:
        return sorted(self.items(), key=lambda wc: wc[0].sort_key())

    @property
    def terms(self) -> dict[PauliWord, float]:
        return dict(self.items())

    def raw_items(self):
        return self._terms.items()

    def coefficient(self, word: PauliWord) -> float:
        return self._terms.get((word.x, word.z), 0.0)

    def max_abs_coefficient(self) -> float:
        return max((abs(c) for c in self._terms.values()), default=0.0)

    def is_diagonal(self) -> bool:
        return all(x == 0 for (x, _z) in self._terms)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PauliSum)
            and self.n_qubits == other.n_qubits
            and self._terms == other._terms
        )

    def __repr__(self) -> str:
        n = len(self._terms)
        head = ", ".join(
            f"{c:+.6g}*{render_word(w)}" for w, c in list(self.items())[:4]
        )
        more = ", ..." if n > 4 else ""
        return f"PauliSum({self.n_qubits} qubits, {n} terms: {head}{more})"

    # -- arithmetic ------------------------------------------------------

    def __add__(self, other: "PauliSum") -> "PauliSum":
        return sum_add(self, other)

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        return sum_add(self, sum_scale(other, -1.0))

    def __mul__(self, c: float) -> "PauliSum":
        return sum_scale(self, c)

    __rmul__ = __mul__


def sum_add(a: PauliSum, b: PauliSum) -> PauliSum:
    """Termwise merge with canonical-key collision summation; compacted."""
    if a.n_qubits != b.n_qubits:
        raise DimensionError(f"qubit counts differ: {a.n_qubits} vs {b.n_qubits}")
    raw = dict(a._terms)
    for key, c in b._terms.items():
        new = raw.get(key, 0.0) + c
        if new == 0.0:
            raw.pop(key, None)
        else:
            raw[key] = new
    return PauliSum._from_raw(a.n_qubits, raw)


def sum_scale(a: PauliSum, c: float) -> PauliSum:
    c = float(c)
    if c == 0.0:
        return PauliSum(a.n_qubits)
    return PauliSum._from_raw(a.n_qubits, {k: c * v for k, v in a._terms.items()})


# -- Ising decomposition --------------------------------------------------


@dataclass(frozen=True, slots=True)
class IsingBlock:
    x_string: PauliWord
    iz_factor: PauliSum


@dataclass(frozen=True, slots=True)
class IsingDecomposition:
    """Split of a hermitian sum into a diagonal part and X-string blocks.

    The y factors of the source words are folded into the iz coefficients as
    signs, so ``i0 + sum_k iz_factor_k * x_string_k`` recomposes the source
    exactly.
    """

    i0: PauliSum
    blocks: tuple[IsingBlock, ...]
    n_qubits: int

    def recompose(self) -> PauliSum:
        raw: dict[tuple[int, int], float] = dict(self.i0._terms)
        for block in self.blocks:
            bx = block.x_string.x
            for (_, z), c in block.iz_factor._terms.items():
                # iz word * x-string: i^y from commuting Z^z past X^x restores
                # the original coefficient of the canonical word (x, z).
                y = (bx & z).bit_count()
                coeff = c if y % 4 == 0 else -c
                key = (bx, z)
                raw[key] = raw.get(key, 0.0) + coeff
        return PauliSum._from_raw(self.n_qubits, {k: c for k, c in raw.items() if c != 0.0})


def ising_decompose(h: PauliSum) -> IsingDecomposition:
    """Group words by x-support; empty x-support goes to the diagonal part.

    Raises :class:`HermiticityError` on any odd-y word.
    """
    n = h.n_qubits
    i0_raw: dict[tuple[int, int], float] = {}
    by_x: dict[int, dict[tuple[int, int], float]] = {}
    for (x, z), c in h._terms.items():
        y = (x & z).bit_count()
        if y % 2:
            raise HermiticityError(
                f"odd y-count word {render_word(PauliWord(x, z, n))} in operator"
            )
        if x == 0:
            i0_raw[(0, z)] = c
        else:
            # canonical word = i^y X^x Z^z = i^(-y) Z^z X^x; with y even the
            # z-only prefactor coefficient is c * (-1)^(y/2).
            coeff = c if y % 4 == 0 else -c
            by_x.setdefault(x, {})[(0, z)] = coeff
    blocks = tuple(
        IsingBlock(PauliWord(x, 0, n), PauliSum._from_raw(n, zraw))
        for x, zraw in sorted(
            by_x.items(), key=lambda item: (item[0].bit_count(), item[0])
        )
    )
    return IsingDecomposition(PauliSum._from_raw(n, i0_raw), blocks, n)


# -- expectation values ---------------------------------------------------


def diagonal_expectation(iz: PauliSum, ref: ReferenceState) -> float:
    """<0|iz|0> for a sum of z/identity words only.

    Each word contributes its coefficient times the product of z-eigenvalues
    (-1 for occupied qubits) over its support.
    """
    if iz.n_qubits != ref.n_qubits:
        raise DimensionError("sum and reference state qubit counts differ")
    occ = ref.occupation
    total = 0.0
    for (x, z), c in iz._terms.items():
        if x != 0:
            raise ValueError(
                f"non-diagonal word {render_word(PauliWord(x, z, iz.n_qubits))} "
                "in diagonal expectation"
            )
        total += -c if (z & occ).bit_count() % 2 else c
    return total


def expectation(h: PauliSum, ref: ReferenceState) -> float:
    """<0|h|0> for a general sum: only the diagonal part contributes."""
    if h.n_qubits != ref.n_qubits:
        raise DimensionError("sum and reference state qubit counts differ")
    occ = ref.occupation
    total = 0.0
    for (x, z), c in h._terms.items():
        if x == 0:
            total += -c if (z & occ).bit_count() % 2 else c
    return total


# -- dressing --------------------------------------------------------------


def _require_generator(t_gen: PauliWord) -> None:
    if t_gen.y_count() % 2 == 0:
        raise InvalidGeneratorError(
            f"generator {render_word(t_gen)} has even y-count (not purely imaginary)"
        )


_PACKED_MIN_TERMS = 64


def dress(h: PauliSum, t_gen: PauliWord, t_opt: float) -> PauliSum:
    """Exact unitary conjugation of h by exp(-i t_opt T / 2).

    Equal to h - (i/2) sin(t) [h, T] + ((1-cos t)/2) (T h T - h).  Words
    commuting with T are untouched; a word P anticommuting with T scales by
    cos(t) and spawns -i sin(t) P*T, whose phase collapses to a real sign.
    Large sums over at most 64 qubits take a vectorized path with identical
    results (every output key receives at most two float contributions).
    """
    if h.n_qubits != t_gen.n_qubits:
        raise DimensionError("sum and generator qubit counts differ")
    _require_generator(t_gen)
    if not math.isfinite(t_opt):
        raise ValueError(f"non-finite amplitude {t_opt!r}")
    if t_opt == 0.0:
        return h
    if h.n_qubits <= 64 and len(h._terms) >= _PACKED_MIN_TERMS:
        from . import _packed

        return _packed.unpack(_packed.dress_packed(_packed.pack(h), t_gen, t_opt))
    tx, tz = t_gen.x, t_gen.z
    yt = (tx & tz).bit_count()
    cos_t = math.cos(t_opt)
    sin_t = math.sin(t_opt)
    out: dict[tuple[int, int], float] = {}
    for key, c in h._terms.items():
        px, pz = key
        if ((px & tz).bit_count() + (pz & tx).bit_count()) % 2 == 0:
            out[key] = out.get(key, 0.0) + c
            continue
        out[key] = out.get(key, 0.0) + c * cos_t
        nx = px ^ tx
        nz = pz ^ tz
        # P*T = i^k C with k odd here; the spawned coefficient -i sin(t) i^k
        # is real: +sin(t) for k == 1, -sin(t) for k == 3.
        k = (
            (px & pz).bit_count()
            + yt
            - (nx & nz).bit_count()
            + 2 * (pz & tx).bit_count()
        ) % 4
        new = c * sin_t if k == 1 else -c * sin_t
        nkey = (nx, nz)
        out[nkey] = out.get(nkey, 0.0) + new
    return PauliSum._from_raw(h.n_qubits, {k: c for k, c in out.items() if c != 0.0})


def dress_sequence(h: PauliSum, gens: Iterable[tuple[PauliWord, float]]) -> PauliSum:
    """Apply ``dress`` for each (generator, amplitude) pair in Ansatz order.

    Conjugation nests outward, so for U = prod_j exp(-i t_j T_j / 2) the
    first pair ends up innermost: the result is U^dagger h U.  Large sums
    stay in packed-array form across the whole chain.
    """
    gens = list(gens)
    if (
        h.n_qubits <= 64
        and len(h._terms) >= _PACKED_MIN_TERMS
        and len(gens) > 1
    ):
        for t_gen, t_opt in gens:
            _require_generator(t_gen)
            if h.n_qubits != t_gen.n_qubits:
                raise DimensionError("sum and generator qubit counts differ")
            if not math.isfinite(t_opt):
                raise ValueError(f"non-finite amplitude {t_opt!r}")
        from . import _packed

        return _packed.unpack(_packed.dress_chain(_packed.pack(h), gens))
    for t_gen, t_opt in gens:
        h = dress(h, t_gen, t_opt)
    return h


def prune(h: PauliSum, threshold: float) -> tuple[PauliSum, float]:
    """Drop terms with |coefficient| < threshold; report dropped weight."""
    if threshold < 0:
        raise ValueError("prune threshold must be >= 0")
    if threshold == 0.0:
        return h, 0.0
    kept: dict[tuple[int, int], float] = {}
    dropped = 0.0
    for key, c in h._terms.items():
        if abs(c) < threshold:
            dropped += abs(c)
        else:
            kept[key] = c
    return PauliSum._from_raw(h.n_qubits, kept), dropped


# -- serialization ---------------------------------------------------------


def to_json_dict(h: PauliSum) -> dict:
    """JSON-ready form with coefficients at 17 significant digits."""
    return {
        "n_qubits": h.n_qubits,
        "terms": [
            {"word": render_word(w), "coeff": float(f"{c:.17g}")}
            for w, c in h.sorted_items()
        ],
    }


def to_json(h: PauliSum) -> str:
    terms = ",\n    ".join(
        f'{{"word": {json.dumps(render_word(w))}, "coeff": {c:.17g}}}'
        for w, c in h.sorted_items()
    )
    return (
        f'{{\n  "n_qubits": {h.n_qubits},\n  "terms": [\n    {terms}\n  ]\n}}'
        if terms
        else f'{{\n  "n_qubits": {h.n_qubits},\n  "terms": []\n}}'
    )


def from_json_dict(data: dict) -> PauliSum:
    n = int(data["n_qubits"])
    return PauliSum(
        n, [(parse_word(t["word"], n), float(t["coeff"])) for t in data["terms"]]
    )


def from_json(text: str) -> PauliSum:
    return from_json_dict(json.loads(text))
