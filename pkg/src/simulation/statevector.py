"""
Statevector engine

Exact evolution of measurement-free circuits, exact and shot-sampled
expectation values with QWC grouping, and the adjoint gradient of the
UpCCD energy.

Author: jsecco ®
"""

import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from algebra.grouping import QwcGroup, group_qwc
from algebra.pauli import PauliSum, PauliTerm
from compiler.gates import Circuit, FIXED_MATRICES, Gate, GateKind, rz_matrix

from . import kernels

logger = logging.getLogger(__name__)

MAX_STATEVECTOR_QUBITS = 24


class SimulationError(RuntimeError):
    """Raised when a circuit cannot be simulated on the requested path."""


@dataclass
class ShotResult:
    """Measured bitstrings (qubit 0 leftmost) and their occurrences."""

    counts: Dict[str, int] = field(default_factory=dict)
    shots: int = 0

    def __post_init__(self):
        total = sum(self.counts.values())
        if self.shots == 0:
            self.shots = total
        elif total != self.shots:
            raise SimulationError(f"Counts sum to {total}, expected {self.shots} shots")

    def probabilities(self) -> Dict[str, float]:
        return {bits: n / self.shots for bits, n in self.counts.items()}

    def marginal_one(self, qubit: int) -> float:
        """Fraction of shots reading 1 on `qubit`."""
        ones = sum(n for bits, n in self.counts.items() if bits[qubit] == "1")
        return ones / self.shots

    def merge(self, other: "ShotResult") -> "ShotResult":
        counts = dict(self.counts)
        for bits, n in other.counts.items():
            counts[bits] = counts.get(bits, 0) + n
        return ShotResult(counts, self.shots + other.shots)

    def to_csv(self, path: Union[str, Path]) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f)
            writer.writerow(["bitstring", "count"])
            for bits in sorted(self.counts):
                writer.writerow([bits, self.counts[bits]])

    @classmethod
    def from_csv(cls, path: Union[str, Path]) -> "ShotResult":
        with open(path, "r", newline="", encoding="utf-8") as f:
            reader = csv.DictReader(f)
            counts = {row["bitstring"]: int(row["count"]) for row in reader}
        return cls(counts)


def bitstring(index: int, n_qubits: int) -> str:
    return "".join("1" if (index >> u) & 1 else "0" for u in range(n_qubits))


def counts_from_indices(indices: np.ndarray, n_qubits: int) -> Dict[str, int]:
    values, occurrences = np.unique(np.asarray(indices, dtype=np.int64), return_counts=True)
    return {bitstring(int(v), n_qubits): int(n) for v, n in zip(values, occurrences)}


def total_variation_distance(a: ShotResult, b: ShotResult) -> float:
    pa, pb = a.probabilities(), b.probabilities()
    keys = set(pa) | set(pb)
    return 0.5 * sum(abs(pa.get(k, 0.0) - pb.get(k, 0.0)) for k in keys)


def apply_gate(states: np.ndarray, gate: Gate) -> np.ndarray:
    """Apply one unitary gate to a batch of states."""
    kind = gate.kind
    if kind is GateKind.RZ:
        return kernels.apply_1q(states, rz_matrix(gate.angle), gate.qubits[0])
    if kind is GateKind.ID or kind is GateKind.BARRIER:
        return states
    if kind in FIXED_MATRICES:
        return kernels.apply_1q(states, FIXED_MATRICES[kind], gate.qubits[0])
    if kind is GateKind.CX:
        return kernels.apply_cx(states, gate.qubits[0], gate.qubits[1])
    if kind is GateKind.PAULI_EVOLUTION:
        return kernels.apply_pauli_rotation(states, gate.term, gate.angle)
    raise SimulationError(f"Gate {gate.name} is not unitary")


def evolve(c: Circuit, states: np.ndarray) -> np.ndarray:
    for gate in c.gates:
        states = apply_gate(states, gate)
    return states


def run_statevector(c: Circuit) -> np.ndarray:
    """
    Final state of a measurement-free circuit started in |0…0⟩.

    Args:
        c: Circuit on at most 24 qubits

    Returns:
        Normalized 2**n complex amplitudes

    Raises:
        SimulationError: If the circuit measures or is too large
    """
    if c.n_qubits > MAX_STATEVECTOR_QUBITS:
        raise SimulationError(f"{c.n_qubits} qubits exceed the statevector limit")
    if c.has_measurements():
        raise SimulationError("Statevector path does not support measurements")
    return evolve(c, kernels.zero_states(c.n_qubits))[0]


def state_expectation(state: np.ndarray, h: PauliSum) -> float:
    """Σ ω⟨ψ|P|ψ⟩ for a single state, real part for Hermitian h."""
    batch = state.reshape(1, -1)
    total = 0.0j
    for term in h.terms:
        total += term.coeff * kernels.pauli_expectations(batch, term)[0]
    return float(total.real)


def exact_expectation(c: Union[Circuit, np.ndarray], h: PauliSum) -> float:
    """
    Exact energy of the circuit output (or of a given state).

    Raises:
        SimulationError: If h is not Hermitian
    """
    if not h.is_hermitian():
        raise SimulationError("Expectation requested for a non-Hermitian operator")
    state = run_statevector(c) if isinstance(c, Circuit) else np.asarray(c)
    return state_expectation(state, h)


def measurement_rotation(group: QwcGroup, n_qubits: int) -> Circuit:
    """Gates taking the group's shared basis to the Z basis."""
    circuit = Circuit(n_qubits)
    for q, letter in enumerate(group.measurement_basis):
        if letter == "X":
            circuit.h(q)
        elif letter == "Y":
            circuit.sdg(q)
            circuit.h(q)
    return circuit


def group_values(h: PauliSum, group: QwcGroup) -> np.ndarray:
    """Estimator value of the whole group for every measured basis index."""
    values = np.zeros(1 << h.n_qubits)
    for index in group.members:
        term = h.terms[index]
        values += term.coeff.real * kernels.z_parity_signs(h.n_qubits, term.support)
    return values


def estimate_from_counts(values: np.ndarray, counts: np.ndarray) -> Tuple[float, float]:
    """Sample mean and its variance from per-index estimator values and counts."""
    shots = int(counts.sum())
    mean = float(np.dot(counts, values) / shots)
    if shots < 2:
        return mean, 0.0
    second = float(np.dot(counts, values ** 2) / shots)
    variance = max(second - mean * mean, 0.0) * shots / (shots - 1)
    return mean, variance / shots


def sampled_expectation(
    c: Union[Circuit, np.ndarray],
    h: PauliSum,
    shots: int,
    seed: Optional[int] = None,
    groups: Optional[List[QwcGroup]] = None,
) -> Tuple[float, float]:
    """
    Shot-based energy estimate with QWC grouping.

    Each group rotates the exact output state into its measurement basis,
    samples `shots` bitstrings and combines its members' parities.

    Args:
        c: Measurement-free circuit, or its output state
        h: Hermitian Hamiltonian
        shots: Shots per group
        seed: Seed of the sampling generator
        groups: Precomputed groups of h

    Returns:
        (mean, stderr) in the units of h
    """
    if shots < 1:
        raise SimulationError(f"shots must be >= 1, got {shots}")
    state = run_statevector(c) if isinstance(c, Circuit) else np.asarray(c)
    groups = groups if groups is not None else group_qwc(h)
    rng = np.random.default_rng(seed)

    mean = h.identity_coeff().real
    variance = 0.0
    for group in groups:
        rotated = evolve(measurement_rotation(group, h.n_qubits), state.reshape(1, -1))[0]
        probabilities = np.abs(rotated) ** 2
        probabilities /= probabilities.sum()
        counts = rng.multinomial(shots, probabilities)
        group_mean, group_var = estimate_from_counts(group_values(h, group), counts)
        mean += group_mean
        variance += group_var
    return mean, math.sqrt(variance)


def sample_counts(state: np.ndarray, shots: int, seed: Optional[int] = None) -> ShotResult:
    rng = np.random.default_rng(seed)
    probabilities = np.abs(state) ** 2
    probabilities /= probabilities.sum()
    n_qubits = len(state).bit_length() - 1
    indices = rng.choice(len(state), size=shots, p=probabilities)
    return ShotResult(counts_from_indices(indices, n_qubits), shots)


def circuit_unitary(c: Circuit) -> np.ndarray:
    """Dense unitary of a measurement-free circuit (column j = U|j⟩)."""
    dim = 1 << c.n_qubits
    states = evolve(c, np.eye(dim, dtype=complex))
    return states.T


def equal_up_to_phase(u: np.ndarray, v: np.ndarray, tolerance: float = 1e-9) -> bool:
    k = np.unravel_index(np.argmax(np.abs(v)), v.shape)
    if abs(v[k]) < tolerance:
        return bool(np.allclose(u, v, atol=tolerance))
    phase = u[k] / v[k]
    if abs(abs(phase) - 1.0) > tolerance:
        return False
    return bool(np.allclose(u, phase * v, atol=tolerance))


def upccd_energy_and_gradient(
    hf_index: int,
    generators: Sequence[Sequence[PauliTerm]],
    parameters: Sequence[float],
    h: PauliSum,
) -> Tuple[float, np.ndarray]:
    """
    Energy of the UpCCD state and its exact gradient by the adjoint method.

    Excitation m applies Π_l exp(i·θ_m/8·c_l·P_l); its strings commute, so
    dU_m/dθ_m = A_m U_m with A_m = Σ_l (i c_l / 8) P_l.

    Args:
        hf_index: Basis index of the reference state
        generators: Real-weighted strings of each excitation
        parameters: θ per excitation
        h: Hermitian Hamiltonian

    Returns:
        (energy, gradient)
    """
    n_qubits = h.n_qubits
    state = kernels.basis_states(n_qubits, np.array([hf_index]))
    for terms, theta in zip(generators, parameters):
        for term in terms:
            state = kernels.apply_pauli_rotation(state, term, theta / 8.0)

    h_state = np.zeros_like(state)
    for term in h.terms:
        h_state += kernels.apply_term(state, term)
    energy = float(np.vdot(state[0], h_state[0]).real)

    gradient = np.zeros(len(parameters))
    phi, lam = state, h_state
    for m in reversed(range(len(parameters))):
        generator_phi = np.zeros_like(phi)
        for term in generators[m]:
            generator_phi += (1j * term.coeff.real / 8.0) * kernels.apply_pauli(phi, term.x_mask, term.z_mask)
        gradient[m] = 2.0 * float(np.vdot(lam[0], generator_phi[0]).real)
        for term in reversed(generators[m]):
            phi = kernels.apply_pauli_rotation(phi, term, -parameters[m] / 8.0)
            lam = kernels.apply_pauli_rotation(lam, term, -parameters[m] / 8.0)
    return energy, gradient
