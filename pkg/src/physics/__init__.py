"""
Nuclear Pairing Physics Module

Level schemes, the pairing Hamiltonian with its exact-diagonalization
reference, and the UpCCD ansatz.

Author: jsecco ®
"""

from .levels import Charge, Level, LevelScheme, LevelSchemeError, he6_scheme, load_level_scheme, save_level_scheme
from .hamiltonian import (
    PairingHamiltonian,
    SectorError,
    build_hamiltonian,
    correlation_energy,
    exact_ground,
    pairing_matrix_element,
)
from .ansatz import AnsatzError, AnsatzSpec, Excitation, bind, build_ansatz_spec, build_upccd, hf_prep, initial_parameters

__all__ = [
    'Charge', 'Level', 'LevelScheme', 'LevelSchemeError', 'he6_scheme', 'load_level_scheme', 'save_level_scheme',
    'PairingHamiltonian', 'SectorError', 'build_hamiltonian', 'correlation_energy', 'exact_ground',
    'pairing_matrix_element',
    'AnsatzError', 'AnsatzSpec', 'Excitation', 'bind', 'build_ansatz_spec', 'build_upccd', 'hf_prep',
    'initial_parameters',
]
