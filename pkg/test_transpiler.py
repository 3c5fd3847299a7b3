#!/usr/bin/env python3
"""
Test script for the circuit IR and the native-gate transpiler
"""

import logging
import sys
from pathlib import Path

import numpy as np
import pytest
from scipy.linalg import expm
from scipy.stats import unitary_group

# Add src to path
sys.path.insert(0, str(Path(__file__).parent / 'src'))

from algebra.pauli import PauliTerm
from compiler.gates import Circuit, CircuitError, Gate, GateKind, from_text
from compiler.transpiler import (
    TranspileError,
    lower_pauli_evolution,
    synthesize_1q,
    transpile,
    wrap_angle,
)
from physics.ansatz import bind, build_ansatz_spec, build_upccd, initial_parameters
from physics.levels import he6_scheme
from simulation.statevector import circuit_unitary, equal_up_to_phase

logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)


def evolution_gate(label: str, weight: float, angle: float) -> Gate:
    term = PauliTerm.from_label(label, weight)
    return Gate(GateKind.PAULI_EVOLUTION, tuple(term.support_qubits()), angle=angle, term=term)


@pytest.mark.parametrize("label", ["Z", "X", "Y", "XY", "ZIZ", "YXXY", "IXYZ", "XXXY"])
@pytest.mark.parametrize("weight", [1.0, -1.0])
def test_lowered_evolution_matches_expm(label, weight):
    angle = 0.37
    gate = evolution_gate(label, weight, angle)
    lowered = lower_pauli_evolution(gate)
    expected = expm(1j * angle * weight * PauliTerm.from_label(label).to_matrix())
    assert equal_up_to_phase(circuit_unitary(lowered), expected)


def test_identity_evolution_rejected():
    with pytest.raises(TranspileError):
        lower_pauli_evolution(evolution_gate("II", 1.0, 0.1))


def random_circuit(n_qubits: int, n_gates: int, rng: np.random.Generator) -> Circuit:
    circuit = Circuit(n_qubits)
    for _ in range(n_gates):
        choice = rng.integers(6)
        q = int(rng.integers(n_qubits))
        if choice == 0:
            circuit.h(q)
        elif choice == 1:
            circuit.s(q)
        elif choice == 2:
            circuit.rz(float(rng.uniform(-np.pi, np.pi)), q)
        elif choice == 3:
            circuit.sx(q)
        elif choice == 4 and n_qubits > 1:
            a, b = rng.choice(n_qubits, size=2, replace=False)
            circuit.cx(int(a), int(b))
        else:
            label = "".join(rng.choice(list("IXYZ"), size=n_qubits))
            if set(label) == {"I"}:
                label = "X" + label[1:]
            circuit.pauli_evolution(PauliTerm.from_label(label, float(rng.choice([-1.0, 1.0]))),
                                    float(rng.uniform(-1.0, 1.0)))
    return circuit


@pytest.mark.parametrize("n_qubits", [1, 2, 3, 4])
def test_transpile_preserves_unitary(n_qubits):
    rng = np.random.default_rng(100 + n_qubits)
    for _ in range(5):
        circuit = random_circuit(n_qubits, 25, rng)
        native = transpile(circuit)
        assert native.is_native()
        assert equal_up_to_phase(circuit_unitary(native), circuit_unitary(circuit))


def test_hadamard_pair_vanishes():
    circuit = Circuit(1).h(0).h(0)
    assert len(transpile(circuit)) == 0


def test_adjacent_cx_pair_cancels():
    circuit = Circuit(2).cx(0, 1).cx(0, 1)
    assert len(transpile(circuit)) == 0


def test_separated_cx_pair_survives():
    circuit = Circuit(2).cx(0, 1).h(1).cx(0, 1)
    assert transpile(circuit).count_ops()["cx"] == 2


def test_depth_examples():
    assert Circuit(3).depth() == 0
    assert Circuit(3).x(0).x(1).x(2).depth() == 1
    assert Circuit(3).h(0).cx(0, 1).cx(1, 2).depth() == 3
    assert Circuit(4).cx(0, 1).cx(2, 3).x(0).depth() == 2


def test_synthesize_random_unitaries():
    for seed in range(20):
        u = unitary_group.rvs(2, random_state=seed)
        gates = synthesize_1q(u, 0)
        assert len(gates) <= 5
        assert all(g.is_native() for g in gates)
        assert equal_up_to_phase(circuit_unitary(Circuit(1, gates)), u)


def test_synthesize_special_cases():
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    assert [g.kind for g in synthesize_1q(x, 0)] == [GateKind.X]
    assert synthesize_1q(np.eye(2), 0) == []


def test_wrap_angle():
    assert wrap_angle(3 * np.pi) == pytest.approx(np.pi)
    assert wrap_angle(-np.pi) == pytest.approx(np.pi)
    assert wrap_angle(0.5) == pytest.approx(0.5)


def test_text_round_trip():
    circuit = Circuit(3).x(0).rz(0.25, 1).cx(0, 2)
    circuit.pauli_evolution(PauliTerm.from_label("XIY", -1.0), 0.125)
    parsed = from_text(circuit.to_text(), 3)
    assert parsed.to_text() == circuit.to_text()


def test_text_parse_errors():
    with pytest.raises(CircuitError):
        from_text("toffoli 0 1 2", 3)
    with pytest.raises(CircuitError):
        from_text("cx 0 5", 3)


def test_he6_native_depth():
    spec = build_ansatz_spec(he6_scheme())
    circuit = build_upccd(bind(spec, initial_parameters(spec) + 0.1))
    native = transpile(circuit)
    print(f"📐 ⁶He native circuit: depth {native.depth()}, ops {native.count_ops()}")
    assert native.is_native()
    assert 150 <= native.depth() <= 400


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
