"""
Pairing Hamiltonian

H = Σ e_i n_i + Σ_{i,j same charge} V_q a†_i a†_ī a_j̄ a_j with the
constant attractive element V_q = -G_q / (11 + N_q). The sum runs over
ordered level pairs including i = j; unlike charges never couple.

Author: jsecco ®
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple, Union

import numpy as np
from scipy import sparse

from algebra.fermion import FermionOperator, FermionTerm, annihilation, creation, jw_map, number_operator
from algebra.pauli import PauliSum, PauliTerm

from .levels import Charge, LevelScheme, LevelSchemeError

logger = logging.getLogger(__name__)

MAX_EXACT_QUBITS = 14


class SectorError(ValueError):
    """Raised when the requested particle-number sector is empty or inconsistent."""


def pairing_matrix_element(scheme: LevelScheme, charge: Charge) -> float:
    """
    Constant pairing element for one charge state.

    Args:
        scheme: Level scheme holding G_q and N_q
        charge: Charge state q

    Returns:
        -G_q / (11 + N_q) in MeV
    """
    if charge not in scheme.g_mev:
        raise LevelSchemeError(f"No pairing strength defined for {charge.value}")
    g = scheme.g_mev[charge]
    if g == 0.0:
        return 0.0
    return -g / (11.0 + scheme.n_nucleons.get(charge, 0))


@dataclass
class PairingHamiltonian:
    """Fermionic and qubit forms of the pairing Hamiltonian of one scheme."""

    scheme: LevelScheme
    fermionic: FermionOperator
    qubit: PauliSum
    hf_energy: float
    _sparse: Optional[sparse.csr_matrix] = field(default=None, repr=False)

    @property
    def n_qubits(self) -> int:
        return self.qubit.n_qubits

    def sparse_matrix(self) -> sparse.csr_matrix:
        if self._sparse is None:
            self._sparse = self.qubit.to_sparse().tocsr()
        return self._sparse


def build_hamiltonian(scheme: LevelScheme, pair_prefactor: float = 1.0) -> PairingHamiltonian:
    """
    Build the pairing Hamiltonian of a level scheme.

    Args:
        scheme: Validated level scheme
        pair_prefactor: Factor on the pair-scattering sum (1.0 sums every ordered pair once)

    Returns:
        PairingHamiltonian with a Hermitian qubit form
    """
    n_qubits = scheme.n_qubits
    op = FermionOperator()

    for level in scheme.levels:
        for mode in level.qubits:
            op = op + number_operator(mode, level.e_mev)

    for charge in scheme.charges_present():
        v = pair_prefactor * pairing_matrix_element(scheme, charge)
        if v == 0.0:
            continue
        same = scheme.levels_of(charge)
        for upper, lower in itertools.product(same, same):
            i, i_bar = upper.qubits
            j, j_bar = lower.qubits
            op.add(FermionTerm((creation(i), creation(i_bar), annihilation(j_bar), annihilation(j)), v))

    qubit = jw_map(op, n_qubits).as_hermitian()
    logger.info(
        f"Built pairing Hamiltonian: {len(op)} fermionic terms -> {len(qubit)} Pauli strings on {n_qubits} qubits"
    )
    return PairingHamiltonian(scheme, op, qubit, scheme.hf_energy())


def correlation_energy(energy: float, scheme: LevelScheme) -> float:
    """E_corr = E minus the summed energies of all occupied single-particle states."""
    return energy - scheme.hf_energy()


def _pair_masks(levels, n_pairs: int) -> List[int]:
    masks = []
    for chosen in itertools.combinations(levels, n_pairs):
        mask = 0
        for level in chosen:
            for qubit in level.qubits:
                mask |= 1 << qubit
        masks.append(mask)
    return masks


def seniority_zero_basis(scheme: LevelScheme, charge_conserving: bool = True) -> List[int]:
    """
    Basis-state indices with every pair fully occupied or empty.

    With charge_conserving the per-charge pair counts of the reference
    occupation are kept; otherwise only the total pair count is, which is
    the sector cross-charge excitations reach.
    """
    if not charge_conserving:
        n_pairs = scheme.n_particles // 2
        return sorted(_pair_masks(scheme.levels, n_pairs))
    per_charge: List[List[int]] = []
    for charge in scheme.charges_present():
        n_pairs = scheme.n_nucleons.get(charge, 0) // 2
        per_charge.append(_pair_masks(scheme.levels_of(charge), n_pairs))
    basis = [sum(combo) for combo in itertools.product(*per_charge)]
    return sorted(basis)


def exact_ground(
    h: PairingHamiltonian, n_particles: int, return_vector: bool = False,
    charge_conserving: bool = True,
) -> Union[float, Tuple[float, np.ndarray]]:
    """
    Lowest eigenvalue in the seniority-zero sector reachable by pair moves.

    Args:
        h: Pairing Hamiltonian
        n_particles: Total particle number of the sector
        return_vector: Also return the full 2^N ground vector
        charge_conserving: Keep per-charge pair counts; False lets pairs
            change charge, bounding all_pairs ansatz energies

    Returns:
        Ground energy in MeV, or (energy, vector)

    Raises:
        SectorError: If the sector is empty or the particle number mismatches
    """
    scheme = h.scheme
    if h.n_qubits > MAX_EXACT_QUBITS:
        raise SectorError(f"Exact diagonalization limited to {MAX_EXACT_QUBITS} qubits")
    if n_particles != scheme.n_particles:
        raise SectorError(f"Scheme holds {scheme.n_particles} particles, asked for {n_particles}")
    basis = seniority_zero_basis(scheme, charge_conserving)
    if not basis:
        raise SectorError("Seniority-zero sector is empty")

    matrix = h.sparse_matrix()[basis, :][:, basis].toarray()
    values, vectors = np.linalg.eigh(matrix)
    energy = float(values[0])
    logger.debug(f"Exact ground state over {len(basis)} seniority-zero states: {energy:.8f} MeV")
    if not return_vector:
        return energy
    full = np.zeros(1 << h.n_qubits, dtype=complex)
    full[basis] = vectors[:, 0]
    return energy, full


def exact_correlation_energy(h: PairingHamiltonian) -> float:
    return correlation_energy(exact_ground(h, h.scheme.n_particles), h.scheme)


def total_number_operator(n_qubits: int) -> PauliSum:
    """N = Σ (I - Z_u)/2 as a Hermitian PauliSum."""
    terms = [PauliTerm.identity(n_qubits, n_qubits / 2.0)]
    terms += [PauliTerm(n_qubits, 0, 1 << u, -0.5) for u in range(n_qubits)]
    return PauliSum(n_qubits, terms, hermitian=True)
