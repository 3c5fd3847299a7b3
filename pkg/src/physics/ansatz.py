"""
UpCCD ansatz

Hartree-Fock preparation followed by one first-order Trotter step of
paired double excitations. Each excitation moves the pair in occupied
level i to vacant level j through eight commuting Pauli evolutions.

Author: jsecco ®
"""

import logging
import math
from dataclasses import dataclass, replace
from typing import FrozenSet, List, Optional, Sequence, Tuple

import numpy as np

from algebra.fermion import map_pair_excitation
from algebra.pauli import PauliTerm
from compiler.gates import Circuit

from .levels import Charge, LevelScheme, level_qubits

logger = logging.getLogger(__name__)

SAME_CHARGE = "same_charge"
ALL_PAIRS = "all_pairs"
NPI2_GUARD = 1e-6


class AnsatzError(ValueError):
    """Raised for inconsistent excitation sets or parameter vectors."""


@dataclass(frozen=True)
class Excitation:
    occupied: int
    vacant: int
    charge: Charge

    @property
    def label(self) -> str:
        return f"{self.occupied}->{self.vacant}"


@dataclass(frozen=True)
class AnsatzSpec:
    """
    Ordered excitations, one angle per excitation, and the HF occupation.

    cross_charge marks specs built in all-pairs mode, where the excitation
    list may move a pair between charge states. Those states leave the
    per-charge sector; their energies are bounded by
    exact_ground(h, n, charge_conserving=False), not the default oracle.
    """

    n_qubits: int
    excitations: Tuple[Excitation, ...]
    parameters: Tuple[float, ...]
    initial_occupation: FrozenSet[int]
    cross_charge: bool = False

    def __post_init__(self):
        if len(self.parameters) != len(self.excitations):
            raise AnsatzError(
                f"{len(self.parameters)} parameters for {len(self.excitations)} excitations"
            )
        for excitation in self.excitations:
            if excitation.occupied not in self.initial_occupation:
                raise AnsatzError(f"Excitation {excitation.label} starts from a vacant level")
            if excitation.vacant in self.initial_occupation:
                raise AnsatzError(f"Excitation {excitation.label} ends in an occupied level")

    @property
    def n_parameters(self) -> int:
        return len(self.excitations)

    def index_of(self, occupied: int, vacant: int) -> int:
        for k, excitation in enumerate(self.excitations):
            if (excitation.occupied, excitation.vacant) == (occupied, vacant):
                return k
        raise AnsatzError(f"No excitation {occupied}->{vacant} in this ansatz")

    def hf_index(self) -> int:
        mask = 0
        for level in self.initial_occupation:
            for q in level_qubits(level):
                mask |= 1 << q
        return mask


def build_ansatz_spec(scheme: LevelScheme, mode: str = SAME_CHARGE,
                      parameters: Optional[Sequence[float]] = None) -> AnsatzSpec:
    """
    Excitation list of a scheme, lexicographic by (charge, i, j).

    Args:
        scheme: Level scheme
        mode: 'same_charge' (pairs stay within a charge state) or 'all_pairs'
        parameters: Initial angles, zeros when omitted

    Returns:
        AnsatzSpec
    """
    if mode not in (SAME_CHARGE, ALL_PAIRS):
        raise AnsatzError(f"Unknown excitation mode '{mode}'")
    charge_order = {charge: k for k, charge in enumerate(Charge)}
    excitations: List[Excitation] = []
    for occupied in scheme.occupied_levels():
        for vacant in scheme.vacant_levels():
            if mode == SAME_CHARGE and occupied.charge is not vacant.charge:
                continue
            excitations.append(Excitation(occupied.index, vacant.index, occupied.charge))
    excitations.sort(key=lambda e: (charge_order[e.charge], e.occupied, e.vacant))

    values = tuple(float(v) for v in parameters) if parameters is not None else (0.0,) * len(excitations)
    occupation = frozenset(level.index for level in scheme.occupied_levels())
    spec = AnsatzSpec(scheme.n_qubits, tuple(excitations), values, occupation, mode == ALL_PAIRS)
    logger.debug(f"Ansatz with {spec.n_parameters} excitations: {[e.label for e in excitations]}")
    return spec


def bind(spec: AnsatzSpec, theta: Sequence[float]) -> AnsatzSpec:
    """Same excitations with new angles."""
    values = tuple(float(v) for v in theta)
    if len(values) != spec.n_parameters:
        raise AnsatzError(f"Expected {spec.n_parameters} parameters, got {len(values)}")
    return replace(spec, parameters=values)


def initial_parameters(spec: AnsatzSpec, excitation: Tuple[int, int] = (1, 3),
                       amplitude: float = 1.0) -> np.ndarray:
    """
    Zero vector except `amplitude` on one excitation.

    Raises:
        AnsatzError: If the excitation is absent or the amplitude sits on n·π/2
    """
    multiple = amplitude / (math.pi / 2)
    if abs(multiple - round(multiple)) * (math.pi / 2) < NPI2_GUARD:
        raise AnsatzError(f"Initial amplitude {amplitude} is a multiple of π/2")
    theta = np.zeros(spec.n_parameters)
    theta[spec.index_of(*excitation)] = amplitude
    return theta


def hf_prep(spec: AnsatzSpec) -> Circuit:
    """X on both qubits of every occupied pair level."""
    circuit = Circuit(spec.n_qubits)
    for level in sorted(spec.initial_occupation):
        for q in level_qubits(level):
            circuit.x(q)
    return circuit


def excitation_generators(spec: AnsatzSpec) -> List[List[PauliTerm]]:
    """
    Real-weighted (±1) strings of each excitation.

    The anti-Hermitian generator is Σ_l (i·c_l/8)·P_l; evolving by θ applies
    exp(i·(θ/8)·c_l·P_l) for every string.
    """
    generators = []
    for excitation in spec.excitations:
        i, i_bar = level_qubits(excitation.occupied)
        j, j_bar = level_qubits(excitation.vacant)
        tau = map_pair_excitation(i, i_bar, j, j_bar, 1.0, spec.n_qubits)
        generators.append([term.with_coeff((term.coeff / 1j).real * 8.0) for term in tau.terms])
    return generators


def build_upccd(spec: AnsatzSpec) -> Circuit:
    """
    HF preparation plus the Pauli evolutions of every excitation, in order.
    """
    circuit = hf_prep(spec)
    for terms, theta in zip(excitation_generators(spec), spec.parameters):
        for term in terms:
            circuit.pauli_evolution(term, theta / 8.0)
    return circuit
