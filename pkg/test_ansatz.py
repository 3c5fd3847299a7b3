#!/usr/bin/env python3
"""
Test script for the UpCCD ansatz: structure, symmetries and gradients
"""

import logging
import sys
from pathlib import Path

import numpy as np
import pytest

# Add src to path
sys.path.insert(0, str(Path(__file__).parent / 'src'))

from compiler.gates import GateKind
from physics.ansatz import (
    ALL_PAIRS,
    AnsatzError,
    AnsatzSpec,
    Excitation,
    bind,
    build_ansatz_spec,
    build_upccd,
    excitation_generators,
    hf_prep,
    initial_parameters,
)
from physics.hamiltonian import build_hamiltonian, exact_ground, seniority_zero_basis
from physics.levels import Charge, he6_scheme
from simulation.backends import StatevectorBackend
from simulation.statevector import run_statevector, upccd_energy_and_gradient

logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)


@pytest.fixture(scope="module")
def scheme():
    return he6_scheme()


@pytest.fixture(scope="module")
def hamiltonian(scheme):
    return build_hamiltonian(scheme)


@pytest.fixture(scope="module")
def spec(scheme):
    return build_ansatz_spec(scheme)


def test_excitation_list(spec):
    assert spec.n_parameters == 5
    assert [(e.occupied, e.vacant) for e in spec.excitations] == [(2, 5), (2, 6), (4, 5), (4, 6), (1, 3)]
    assert all(e.charge is Charge.NEUTRON for e in spec.excitations[:4])
    assert spec.excitations[4].charge is Charge.PROTON


def test_all_pairs_mode(scheme):
    spec = build_ansatz_spec(scheme, ALL_PAIRS)
    assert spec.n_parameters == 9
    assert spec.cross_charge


def test_unknown_mode(scheme):
    with pytest.raises(AnsatzError):
        build_ansatz_spec(scheme, "singles")


def test_hf_prep_occupies_pair_qubits(spec):
    state = run_statevector(hf_prep(spec))
    index = int(np.argmax(np.abs(state)))
    assert abs(state[index]) == pytest.approx(1.0)
    assert {q for q in range(12) if (index >> q) & 1} == {0, 1, 2, 3, 6, 7}
    assert bin(index).count("1") == 6
    assert index == spec.hf_index()


def test_initial_parameters(spec):
    theta = initial_parameters(spec)
    assert np.count_nonzero(theta) == 1
    assert theta[spec.index_of(1, 3)] == 1.0


def test_initial_parameters_guard(spec):
    with pytest.raises(AnsatzError):
        initial_parameters(spec, amplitude=np.pi / 2)
    with pytest.raises(AnsatzError):
        initial_parameters(spec, amplitude=0.0)
    with pytest.raises(AnsatzError):
        initial_parameters(spec, excitation=(1, 5))


def test_invalid_spec_rejected():
    with pytest.raises(AnsatzError):
        AnsatzSpec(4, (Excitation(2, 1, Charge.NEUTRON),), (0.0,), frozenset({1}))
    with pytest.raises(AnsatzError):
        AnsatzSpec(4, (Excitation(1, 2, Charge.NEUTRON),), (0.0, 1.0), frozenset({1}))


def test_bind_checks_length(spec):
    with pytest.raises(AnsatzError):
        bind(spec, [0.1, 0.2])


def test_circuit_structure(spec):
    circuit = build_upccd(bind(spec, [0.1, 0.2, 0.3, 0.4, 0.5]))
    ops = circuit.count_ops()
    assert ops["x"] == 6
    assert ops["pauli_evolution"] == 8 * 5
    evolutions = [g for g in circuit.gates if g.kind is GateKind.PAULI_EVOLUTION]
    assert all(abs(abs(g.term.coeff.real) - 1.0) < 1e-12 for g in evolutions)
    assert evolutions[0].angle == pytest.approx(0.1 / 8)


def test_zero_angles_leave_hf(spec, hamiltonian):
    energy = StatevectorBackend(hamiltonian.qubit).energy(spec)
    expected = 2 * (-22.10 - 20.45 - 1.85) - 1.0 / 13.0 - 2.0 / 15.0
    assert energy == pytest.approx(expected, abs=1e-10)


def test_number_and_seniority_preserved(scheme, spec):
    rng = np.random.default_rng(11)
    allowed = np.array(seniority_zero_basis(scheme))
    for _ in range(3):
        state = run_statevector(build_upccd(bind(spec, rng.uniform(-np.pi, np.pi, spec.n_parameters))))
        assert np.linalg.norm(state) == pytest.approx(1.0, abs=1e-10)
        assert np.sum(np.abs(state[allowed]) ** 2) == pytest.approx(1.0, abs=1e-10)


def test_adjoint_gradient_matches_finite_differences(spec, hamiltonian):
    rng = np.random.default_rng(5)
    theta = rng.uniform(-1.0, 1.0, spec.n_parameters)
    generators = excitation_generators(spec)
    energy, gradient = upccd_energy_and_gradient(spec.hf_index(), generators, theta, hamiltonian.qubit)

    backend = StatevectorBackend(hamiltonian.qubit)
    assert energy == pytest.approx(backend.energy(bind(spec, theta)), abs=1e-10)

    step = 1e-5
    for m in range(spec.n_parameters):
        shift = np.zeros_like(theta)
        shift[m] = step
        plus = backend.energy(bind(spec, theta + shift))
        minus = backend.energy(bind(spec, theta - shift))
        assert gradient[m] == pytest.approx((plus - minus) / (2 * step), abs=1e-6)


def test_variational_bound(spec, hamiltonian, scheme):
    exact = exact_ground(hamiltonian, scheme.n_particles)
    backend = StatevectorBackend(hamiltonian.qubit)
    rng = np.random.default_rng(3)
    for _ in range(5):
        theta = rng.uniform(-np.pi, np.pi, spec.n_parameters)
        assert backend.energy(bind(spec, theta)) >= exact - 1e-9


def test_all_pairs_states_stay_in_charge_mixing_sector(scheme, hamiltonian):
    spec = build_ansatz_spec(scheme, ALL_PAIRS)
    mixing = np.array(seniority_zero_basis(scheme, charge_conserving=False))
    bound = exact_ground(hamiltonian, scheme.n_particles, charge_conserving=False)
    backend = StatevectorBackend(hamiltonian.qubit)
    rng = np.random.default_rng(17)
    for _ in range(5):
        theta = rng.uniform(-np.pi, np.pi, spec.n_parameters)
        state = run_statevector(build_upccd(bind(spec, theta)))
        assert np.sum(np.abs(state[mixing]) ** 2) == pytest.approx(1.0, abs=1e-10)
        assert backend.energy(bind(spec, theta)) >= bound - 1e-9
    assert bound <= exact_ground(hamiltonian, scheme.n_particles) + 1e-12


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
