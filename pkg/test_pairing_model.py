#!/usr/bin/env python3
"""
Test script for level schemes and the pairing Hamiltonian
"""

import json
import logging
import sys
from pathlib import Path

import numpy as np
import pytest

# Add src to path
sys.path.insert(0, str(Path(__file__).parent / 'src'))

from physics.hamiltonian import (
    SectorError,
    build_hamiltonian,
    exact_correlation_energy,
    exact_ground,
    pairing_matrix_element,
    seniority_zero_basis,
    total_number_operator,
)
from physics.levels import (
    Charge,
    Level,
    LevelScheme,
    LevelSchemeError,
    he6_scheme,
    load_level_scheme,
    save_level_scheme,
    scheme_from_dict,
)
from simulation import kernels
from simulation.statevector import exact_expectation

logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)

CONFIG_DIR = Path(__file__).parent / 'config'


@pytest.fixture(scope="module")
def he6():
    return build_hamiltonian(he6_scheme())


def two_level_scheme(e1: float, e2: float, g: float) -> LevelScheme:
    levels = [Level(1, e1, Charge.NEUTRON, True), Level(2, e2, Charge.NEUTRON, False)]
    return LevelScheme(levels, {Charge.NEUTRON: g}, label="two-level")


def test_he6_scheme_layout():
    scheme = he6_scheme()
    assert scheme.n_levels == 6
    assert scheme.n_qubits == 12
    assert scheme.n_nucleons == {Charge.NEUTRON: 4, Charge.PROTON: 2}
    assert scheme.n_particles == 6
    assert scheme.hf_bitmask() == 0b000011001111
    assert scheme.hf_energy() == pytest.approx(2 * (-22.10 - 20.45 - 1.85))


def test_pairing_matrix_elements():
    scheme = he6_scheme()
    assert pairing_matrix_element(scheme, Charge.NEUTRON) == pytest.approx(-1.0 / 15.0)
    assert pairing_matrix_element(scheme, Charge.PROTON) == pytest.approx(-1.0 / 13.0)


def test_bundled_levels_file_matches_builtin():
    loaded = load_level_scheme(CONFIG_DIR / 'he6_levels.json')
    assert loaded.fingerprint() == he6_scheme().fingerprint()


def test_save_and_load(tmp_path):
    path = tmp_path / "levels.json"
    save_level_scheme(he6_scheme(), path)
    assert load_level_scheme(path).fingerprint() == he6_scheme().fingerprint()


def test_malformed_schemes_rejected():
    data = he6_scheme().to_dict()
    with pytest.raises(LevelSchemeError):
        scheme_from_dict({**data, "schema_version": 2})
    with pytest.raises(LevelSchemeError):
        scheme_from_dict({**data, "n_nucleons_per_charge": {"neutron": 2, "proton": 2}})
    with pytest.raises(LevelSchemeError):
        LevelScheme([Level(2, -1.0, Charge.NEUTRON, True)], {Charge.NEUTRON: 1.0})
    with pytest.raises(LevelSchemeError):
        scheme_from_dict({"levels": [{"index": 1}], "pairing": {"g_mev_per_charge": {}}})
    broken = json.loads(json.dumps(data))
    broken["levels"][0]["charge"] = "muon"
    with pytest.raises(LevelSchemeError):
        scheme_from_dict(broken)


def test_hamiltonian_is_hermitian(he6):
    assert he6.qubit.hermitian
    matrix = he6.sparse_matrix()
    assert abs(matrix - matrix.conj().T).max() < 1e-12


def test_hf_expectation(he6):
    state = kernels.basis_states(12, np.array([he6_scheme().hf_bitmask()]))[0]
    expected = 2 * (-22.10 - 20.45 - 1.85) - 1.0 / 13.0 - 2.0 / 15.0
    assert exact_expectation(state, he6.qubit) == pytest.approx(expected, abs=1e-10)


def test_pair_prefactor_scales_pair_term():
    h = build_hamiltonian(he6_scheme(), pair_prefactor=0.5)
    state = kernels.basis_states(12, np.array([he6_scheme().hf_bitmask()]))[0]
    expected = 2 * (-22.10 - 20.45 - 1.85) + 0.5 * (-1.0 / 13.0 - 2.0 / 15.0)
    assert exact_expectation(state, h.qubit) == pytest.approx(expected, abs=1e-10)


def test_commutes_with_particle_number(he6):
    h = he6.sparse_matrix()
    n = total_number_operator(12).to_sparse()
    commutator = h @ n - n @ h
    assert abs(commutator).max() < 1e-10


def test_seniority_zero_sector_size():
    assert len(seniority_zero_basis(he6_scheme())) == 2 * 6
    # three pairs over six levels once charges may mix
    assert len(seniority_zero_basis(he6_scheme(), charge_conserving=False)) == 20


def test_two_level_closed_form():
    e1, e2, g = -3.0, 1.0, 2.0
    scheme = two_level_scheme(e1, e2, g)
    h = build_hamiltonian(scheme)
    v = -g / 13.0
    block = np.array([[2 * e1 + v, v], [v, 2 * e2 + v]])
    expected = np.linalg.eigvalsh(block)[0]
    assert exact_ground(h, 2) == pytest.approx(expected, abs=1e-10)
    assert exact_correlation_energy(h) == pytest.approx(expected - 2 * e1, abs=1e-10)


def test_exact_ground_vector_is_eigenvector(he6):
    energy, vector = exact_ground(he6, 6, return_vector=True)
    residual = he6.sparse_matrix() @ vector - energy * vector
    assert np.linalg.norm(residual) < 1e-9
    assert np.linalg.norm(vector) == pytest.approx(1.0)


def test_exact_below_hf(he6):
    e_corr = exact_correlation_energy(he6)
    print(f"🔬 ⁶He exact correlation energy: {e_corr:.6f} MeV")
    assert e_corr < 0.0


def test_wrong_particle_number(he6):
    with pytest.raises(SectorError):
        exact_ground(he6, 4)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
