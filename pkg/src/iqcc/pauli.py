"""Exact algebra of Pauli words over N qubits.

A word is stored in symplectic form as two bitmasks: bit j of ``x`` means an
x-factor acts on qubit j, bit j of ``z`` means a z-factor acts there.  A qubit
with both bits set carries y, under the fixed convention

    y = i * x * z,

so the operator encoded by the masks is  i**y_count * X^x * Z^z,  which is
always hermitian.  An extra power of the imaginary unit can ride along in
``phase_exp`` (mod 4); the canonical form used as a key in Pauli sums has
``phase_exp == 0``.  All phase bookkeeping is integer arithmetic mod 4, never
floating point.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import DimensionError

_AXIS_TO_BITS = {"X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_TOKEN_RE = re.compile(r"([XYZ])(\d+)")


@dataclass(frozen=True, slots=True)
class PauliWord:
    """Single Pauli string in symplectic bitmask form."""

    x: int
    z: int
    n_qubits: int
    phase_exp: int = 0

    def __post_init__(self):
        mask = (1 << self.n_qubits) - 1
        if self.x & ~mask or self.z & ~mask:
            raise DimensionError(
                f"mask exceeds {self.n_qubits} qubits: x={self.x:#x} z={self.z:#x}"
            )
        object.__setattr__(self, "phase_exp", self.phase_exp % 4)

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliWord":
        return cls(0, 0, n_qubits)

    @classmethod
    def single(cls, axis: str, qubit: int, n_qubits: int) -> "PauliWord":
        xb, zb = _AXIS_TO_BITS[axis.upper()]
        return cls(xb << qubit, zb << qubit, n_qubits)

    def weight(self) -> int:
        """Number of qubits the word acts on non-trivially."""
        return (self.x | self.z).bit_count()

    def y_count(self) -> int:
        """Number of y factors; even iff the word is a real operator."""
        return (self.x & self.z).bit_count()

    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    def is_x_string(self) -> bool:
        """True iff the word is a nonempty product of x factors only."""
        return self.z == 0 and self.x != 0

    def is_diagonal(self) -> bool:
        """True iff the word contains only z factors (or is the identity)."""
        return self.x == 0

    def canonical(self) -> tuple["PauliWord", int]:
        """Split off the stored phase: returns (phase-free word, phase_exp)."""
        if self.phase_exp == 0:
            return self, 0
        return PauliWord(self.x, self.z, self.n_qubits), self.phase_exp

    def sort_key(self) -> tuple[int, int, int, int]:
        """Total order: by weight, then lexicographically on the masks."""
        return (self.weight(), self.x, self.z, self.phase_exp)

    def axis(self, qubit: int) -> str:
        xb = (self.x >> qubit) & 1
        zb = (self.z >> qubit) & 1
        return ("I", "X", "Z", "Y")[xb + 2 * zb]

    def __str__(self) -> str:
        return render_word(self)

    def __repr__(self) -> str:
        s = render_word(self)
        if self.phase_exp:
            s = f"i^{self.phase_exp} {s}"
        return f"PauliWord({s!r}, n_qubits={self.n_qubits})"


def raw_multiply(ax: int, az: int, bx: int, bz: int) -> tuple[int, int, int]:
    """Mask-level product: (ax,az) * (bx,bz) == i**k * (cx,cz), phase-free words.

    The phase exponent k follows from counting the y factors of each operand
    and of the product, plus the anticommutations needed to move b's
    x-factors past a's z-factors.
    """
    cx = ax ^ bx
    cz = az ^ bz
    k = (
        (ax & az).bit_count()
        + (bx & bz).bit_count()
        - (cx & cz).bit_count()
        + 2 * (az & bx).bit_count()
    ) % 4
    return cx, cz, k


def multiply(a: PauliWord, b: PauliWord) -> tuple[PauliWord, int]:
    """Product of two words: a * b == i**k * c with c canonical."""
    if a.n_qubits != b.n_qubits:
        raise DimensionError(f"qubit counts differ: {a.n_qubits} vs {b.n_qubits}")
    cx, cz, k = raw_multiply(a.x, a.z, b.x, b.z)
    return PauliWord(cx, cz, a.n_qubits), (k + a.phase_exp + b.phase_exp) % 4


def commutes(a: PauliWord, b: PauliWord) -> bool:
    """True iff ab == ba: the symplectic form <a.x,b.z> + <a.z,b.x> is even."""
    if a.n_qubits != b.n_qubits:
        raise DimensionError(f"qubit counts differ: {a.n_qubits} vs {b.n_qubits}")
    return ((a.x & b.z).bit_count() + (a.z & b.x).bit_count()) % 2 == 0


def y_count(w: PauliWord) -> int:
    return w.y_count()


def is_x_string(w: PauliWord) -> bool:
    return w.is_x_string()


def render_word(w: PauliWord) -> str:
    """Render as e.g. ``"X0 Z3 Y7"`` (qubit indices ascending); identity -> ``"I"``."""
    parts = []
    support = w.x | w.z
    q = 0
    while support:
        if support & 1:
            parts.append(f"{w.axis(q)}{q}")
        support >>= 1
        q += 1
    return " ".join(parts) if parts else "I"


def parse_word(text: str, n_qubits: int) -> PauliWord:
    """Parse the rendering grammar; accepts ``"I"`` or ``""`` for the identity."""
    stripped = text.strip()
    if stripped in ("", "I"):
        return PauliWord.identity(n_qubits)
    x = z = 0
    pos = 0
    for m in _TOKEN_RE.finditer(stripped):
        if stripped[pos:m.start()].strip():
            raise ValueError(f"unparseable Pauli word {text!r}")
        q = int(m.group(2))
        if q >= n_qubits:
            raise DimensionError(f"qubit {q} out of range for {n_qubits} qubits")
        if (x | z) >> q & 1:
            raise ValueError(f"qubit {q} appears twice in {text!r}")
        xb, zb = _AXIS_TO_BITS[m.group(1)]
        x |= xb << q
        z |= zb << q
        pos = m.end()
    if stripped[pos:].strip():
        raise ValueError(f"unparseable Pauli word {text!r}")
    return PauliWord(x, z, n_qubits)
