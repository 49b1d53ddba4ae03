"""Iterative qubit coupled cluster electronic-structure engine."""

__version__ = "0.1.0"

from .driver import (
    GapResult,
    IqccConfig,
    IterationRecord,
    RunResult,
    pt_correction,
    resource_estimate,
    run_iqcc,
    singlet_triplet_gap,
)
from .engine import (
    Ansatz,
    RankedGenerator,
    derive_canonical_generator,
    estimate_amplitude,
    qcc_energy,
    qcc_gradient,
    rank_generators,
)
from .errors import IqccError
from .fcidump import CASWindow, MolecularIntegrals, load_fcidump, parse_fcidump, select_cas
from .mapping import SpinPenalty, jordan_wigner, penalize, reference_state, spin_operators
from .optimizer import OptimizationConfig, OptimizationResult, minimize
from .pauli import PauliWord, commutes, multiply, parse_word, render_word
from .pauli_sum import (
    IsingDecomposition,
    PauliSum,
    ReferenceState,
    diagonal_expectation,
    dress,
    dress_sequence,
    expectation,
    ising_decompose,
    prune,
)
