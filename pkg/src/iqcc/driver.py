"""The outer iQCC loop and the singlet/triplet gap workflow.

Each iteration decomposes the current Hamiltonian, ranks one canonical
generator per X-string block, warm-starts the top L amplitudes from the
closed-form estimates, minimizes the QCC energy, folds the optimized Ansatz
into the Hamiltonian by exact dressing, prunes numerically dead terms, and
(optionally) adds a perturbative estimate of the energy still recoverable
from the generators that were not selected.  The reference state never
changes.

The perturbative correction is the sum of exact per-generator lowerings
Delta_E = D/2 - sqrt((D/2)^2 + omega^2) over the non-selected generators,
with omega and D recomputed against the freshly dressed Hamiltonian.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from .engine import (
    MAX_GENERATORS,
    Ansatz,
    RankedGenerator,
    estimate_amplitude,
    qcc_energy_and_gradient,
    rank_generators,
)
from .errors import CapacityError, IterationAbort, OptimizationError
from .fcidump import CASWindow, MolecularIntegrals, select_cas
from .mapping import SpinPenalty, jordan_wigner, penalize, reference_state
from .optimizer import OptimizationConfig, OptimizationResult, minimize
from .pauli_sum import PauliSum, ReferenceState, dress_sequence, expectation, prune

HARTREE_TO_EV = 27.211386245988  # CODATA


@dataclass(frozen=True)
class IqccConfig:
    generators_per_iteration: int = 8
    max_iterations: int = 100
    energy_convergence: float = 1e-5  # Hartree
    prune_threshold: float = 1e-10
    penalty: SpinPenalty = field(default_factory=SpinPenalty)
    enable_pt: bool = True
    memory_budget_terms: int = 50_000_000
    importance_measure: str = "amplitude"
    # rank against the bare Hamiltonian instead of the penalized operator
    # actually being minimized (a parallel bare copy is then dressed along)
    rank_on_bare: bool = False
    optimizer: OptimizationConfig = field(default_factory=OptimizationConfig)

    def __post_init__(self):
        if not 1 <= self.generators_per_iteration <= MAX_GENERATORS:
            raise CapacityError(
                f"generators_per_iteration outside 1..{MAX_GENERATORS}"
            )
        if self.energy_convergence <= 0:
            raise ValueError("energy_convergence must be positive")
        if self.prune_threshold < 0:
            raise ValueError("prune_threshold must be >= 0")
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be >= 0")
        if self.memory_budget_terms <= 0:
            raise ValueError("memory_budget_terms must be positive")


@dataclass(frozen=True)
class IterationRecord:
    index: int
    energy: float
    energy_with_pt: float
    amplitudes: tuple[float, ...]
    term_count: int
    dropped_weight: float
    wall_time: float
    selected_generators: tuple[RankedGenerator, ...] = ()
    optimizer_evaluations: int = 0

    def to_json_dict(self) -> dict:
        return {
            "index": self.index,
            "energy": self.energy,
            "energy_with_pt": self.energy_with_pt,
            "amplitudes": list(self.amplitudes),
            "term_count": self.term_count,
            "dropped_weight": self.dropped_weight,
            "selected_generators": [g.to_json_dict() for g in self.selected_generators],
            "optimizer_evaluations": self.optimizer_evaluations,
            "wall_time_s": self.wall_time,
        }


@dataclass(frozen=True)
class RunResult:
    records: tuple[IterationRecord, ...]
    ansatz_history: tuple[Ansatz, ...]
    initial_energy: float
    final_energy: float
    final_energy_with_pt: float
    converged: bool
    reference: ReferenceState
    final_hamiltonian: PauliSum

    @property
    def total_dropped_weight(self) -> float:
        return sum(r.dropped_weight for r in self.records)

    def to_json_dict(self) -> dict:
        cnot, rz = resource_estimate(self.ansatz_history)
        return {
            "initial_energy": self.initial_energy,
            "final_energy": self.final_energy,
            "final_energy_with_pt": self.final_energy_with_pt,
            "converged": self.converged,
            "n_iterations": len(self.records),
            "final_term_count": len(self.final_hamiltonian),
            "total_dropped_weight": self.total_dropped_weight,
            "resource_estimate": {"cnot_count": cnot, "rz_count": rz},
            "iterations": [r.to_json_dict() for r in self.records],
        }


def pt_correction(
    h: PauliSum, remainder: list[RankedGenerator], ref: ReferenceState
) -> float:
    """Sum of exact per-generator lowerings over non-selected generators.

    omega and D are recomputed against ``h`` (the current, freshly dressed
    Hamiltonian); every summand is <= 0.
    """
    if not remainder:
        return 0.0
    from .engine import block_ranking_data

    stats = {x: (w, d) for x, w, d in block_ranking_data(h, ref)}
    total = 0.0
    for gen in remainder:
        signed, d_val = stats.get(gen.source_x_string.x, (0.0, 0.0))
        _, delta_e = estimate_amplitude(signed, d_val)
        total += delta_e
    return total


def run_iqcc(h0: PauliSum, ref: ReferenceState, cfg: IqccConfig) -> RunResult:
    """Iterate rank -> optimize -> dress -> prune -> correct until converged.

    Stops when the energy change drops to ``cfg.energy_convergence``, when no
    off-diagonal blocks remain, or at ``cfg.max_iterations``.  Numeric
    failures and capacity overruns raise :class:`IterationAbort` carrying the
    partial trajectory.
    """
    h = penalize(h0, cfg.penalty) if cfg.penalty.mu > 0 else h0
    # optional parallel bare copy when ranking is decoupled from the penalty
    track_bare = cfg.rank_on_bare and cfg.penalty.mu > 0
    h_bare = h0 if track_bare else None
    e_prev = expectation(h, ref)
    initial_energy = e_prev
    records: list[IterationRecord] = []
    history: list[Ansatz] = []
    converged = False

    for index in range(1, cfg.max_iterations + 1):
        started = time.perf_counter()
        rank_source = h_bare if track_bare else h
        selected, remainder = rank_generators(
            rank_source, ref, cfg.generators_per_iteration, cfg.importance_measure
        )
        if not selected:
            converged = True
            break

        base = Ansatz([(g.generator, g.t_estimate) for g in selected])

        def value_and_gradient(t, _h=h, _base=base):
            e, g = qcc_energy_and_gradient(_h, _base.with_amplitudes(t), ref)
            return e, np.asarray(g)

        try:
            opt: OptimizationResult = minimize(
                None,
                None,
                np.array(base.amplitudes),
                cfg.optimizer,
                value_and_gradient=value_and_gradient,
            )
        except OptimizationError as exc:
            raise IterationAbort(
                f"optimizer failed at iteration {index}: {exc}", records=records
            ) from exc

        ansatz = base.with_amplitudes(opt.t_opt)
        h = dress_sequence(h, ansatz)
        if len(h) > cfg.memory_budget_terms:
            raise IterationAbort(
                f"term count {len(h)} exceeds budget {cfg.memory_budget_terms} "
                f"at iteration {index}",
                records=records,
            )
        h, dropped = prune(h, cfg.prune_threshold)
        if track_bare:
            h_bare, _ = prune(dress_sequence(h_bare, ansatz), cfg.prune_threshold)
        energy = opt.energy
        pt_source = h_bare if track_bare else h
        pt = pt_correction(pt_source, remainder, ref) if cfg.enable_pt else 0.0

        history.append(ansatz)
        records.append(
            IterationRecord(
                index=index,
                energy=energy,
                energy_with_pt=energy + pt,
                amplitudes=ansatz.amplitudes,
                term_count=len(h),
                dropped_weight=dropped,
                wall_time=time.perf_counter() - started,
                selected_generators=tuple(selected),
                optimizer_evaluations=opt.evaluations,
            )
        )
        if abs(energy - e_prev) <= cfg.energy_convergence:
            converged = True
            break
        e_prev = energy

    final_energy = records[-1].energy if records else initial_energy
    final_pt = records[-1].energy_with_pt if records else initial_energy
    return RunResult(
        records=tuple(records),
        ansatz_history=tuple(history),
        initial_energy=initial_energy,
        final_energy=final_energy,
        final_energy_with_pt=final_pt,
        converged=converged,
        reference=ref,
        final_hamiltonian=h,
    )


# -- singlet/triplet gap ----------------------------------------------------


@dataclass(frozen=True)
class GapResult:
    e_singlet: float
    e_triplet: float
    e_singlet_with_pt: float
    e_triplet_with_pt: float
    gap_ev: float
    gap_with_pt_ev: float
    singlet: RunResult
    triplet: RunResult

    @property
    def trajectories(self) -> tuple[tuple[IterationRecord, ...], tuple[IterationRecord, ...]]:
        return (self.singlet.records, self.triplet.records)

    def to_json_dict(self) -> dict:
        return {
            "e_singlet": self.e_singlet,
            "e_triplet": self.e_triplet,
            "e_singlet_with_pt": self.e_singlet_with_pt,
            "e_triplet_with_pt": self.e_triplet_with_pt,
            "gap_ev": self.gap_ev,
            "gap_with_pt_ev": self.gap_with_pt_ev,
            "hartree_to_ev": HARTREE_TO_EV,
            "singlet": self.singlet.to_json_dict(),
            "triplet": self.triplet.to_json_dict(),
        }


def gap_from_runs(singlet: RunResult, triplet: RunResult) -> GapResult:
    return GapResult(
        e_singlet=singlet.final_energy,
        e_triplet=triplet.final_energy,
        e_singlet_with_pt=singlet.final_energy_with_pt,
        e_triplet_with_pt=triplet.final_energy_with_pt,
        gap_ev=(triplet.final_energy - singlet.final_energy) * HARTREE_TO_EV,
        gap_with_pt_ev=(triplet.final_energy_with_pt - singlet.final_energy_with_pt)
        * HARTREE_TO_EV,
        singlet=singlet,
        triplet=triplet,
    )


def singlet_triplet_gap(
    mi: MolecularIntegrals,
    window: CASWindow | None,
    cfg: IqccConfig,
) -> GapResult:
    """Two penalized runs over the same integrals: s=0 closed shell, s=1 ROHF.

    The penalty strength is shared (``cfg.penalty.mu``); the spin quantum
    number is overridden per state.  The gap is reported in eV.
    """
    if window is not None:
        mi = select_cas(mi, window)
    if mi.n_electrons % 2:
        raise ValueError("gap workflow needs an even electron count")
    h_bare = jordan_wigner(mi)
    n_qubits = 2 * mi.n_spatial
    mu = cfg.penalty.mu

    ref_s = reference_state(mi.n_electrons, n_qubits, ms2=0)
    ref_t = reference_state(mi.n_electrons, n_qubits, ms2=2)
    run_s = run_iqcc(h_bare, ref_s, replace(cfg, penalty=SpinPenalty(mu=mu, s=0.0)))
    run_t = run_iqcc(h_bare, ref_t, replace(cfg, penalty=SpinPenalty(mu=mu, s=1.0)))
    return gap_from_runs(run_s, run_t)


# -- bookkeeping ------------------------------------------------------------


def resource_estimate(ansatz_history) -> tuple[int, int]:
    """(CNOT count, RZ count) for the standard ladder decomposition.

    Each exponentiated generator of weight w costs 2(w - 1) CNOTs and one RZ.
    """
    cnot = 0
    rz = 0
    for ansatz in ansatz_history:
        for gen, _t in ansatz:
            cnot += 2 * (gen.weight() - 1)
            rz += 1
    return cnot, rz


def trajectory_csv(records) -> str:
    """Convergence trajectory as CSV (iteration, energies, size, drops)."""
    lines = ["iteration,energy,energy_with_pt,term_count,dropped_weight"]
    for r in records:
        lines.append(
            f"{r.index},{r.energy!r},{r.energy_with_pt!r},"
            f"{r.term_count},{r.dropped_weight!r}"
        )
    return "\n".join(lines) + "\n"
