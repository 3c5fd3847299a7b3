"""
Statevector kernels

All kernels act on a batch of states shaped (B, 2**n), qubit u being bit u
of the basis index. A single state is the batch B = 1.

Author: jsecco ®
"""

from functools import lru_cache
from typing import Tuple

import numpy as np

from algebra.pauli import PauliTerm, parity_array

_I_POWERS = np.array([1.0, 1.0j, -1.0, -1.0j], dtype=complex)


def zero_states(n_qubits: int, batch: int = 1) -> np.ndarray:
    states = np.zeros((batch, 1 << n_qubits), dtype=complex)
    states[:, 0] = 1.0
    return states


def basis_states(n_qubits: int, indices: np.ndarray) -> np.ndarray:
    """One computational basis state per entry of `indices`."""
    indices = np.asarray(indices, dtype=np.int64)
    states = np.zeros((len(indices), 1 << n_qubits), dtype=complex)
    states[np.arange(len(indices)), indices] = 1.0
    return states


def apply_1q(states: np.ndarray, matrix: np.ndarray, qubit: int) -> np.ndarray:
    """
    Apply a 2x2 matrix, or one per batch row shaped (B, 2, 2), to `qubit`.
    """
    batch, dim = states.shape
    low = 1 << qubit
    view = states.reshape(batch, dim // (2 * low), 2, low)
    if matrix.ndim == 3:
        out = np.einsum("bij,bhjl->bhil", matrix, view)
    else:
        out = np.einsum("ij,bhjl->bhil", matrix, view)
    return out.reshape(batch, dim)


@lru_cache(maxsize=256)
def _cx_permutation(n_qubits: int, control: int, target: int) -> np.ndarray:
    index = np.arange(1 << n_qubits, dtype=np.int64)
    return index ^ (((index >> control) & 1) << target)


def apply_cx(states: np.ndarray, control: int, target: int) -> np.ndarray:
    n_qubits = states.shape[1].bit_length() - 1
    return states[:, _cx_permutation(n_qubits, control, target)]


@lru_cache(maxsize=4096)
def _pauli_action(n_qubits: int, x_mask: int, z_mask: int) -> Tuple[np.ndarray, np.ndarray]:
    """Source index and phase so that (Pψ)[c] = phase[c] · ψ[source[c]]."""
    index = np.arange(1 << n_qubits, dtype=np.int64)
    source = index ^ x_mask
    y_count = bin(x_mask & z_mask).count("1")
    signs = 1 - 2 * parity_array(source & z_mask)
    phase = _I_POWERS[y_count % 4] * signs
    return source, phase


def apply_pauli(states: np.ndarray, x_mask: int, z_mask: int) -> np.ndarray:
    """Apply the unit-weight Pauli string (x_mask, z_mask)."""
    if x_mask == 0 and z_mask == 0:
        return states
    n_qubits = states.shape[1].bit_length() - 1
    source, phase = _pauli_action(n_qubits, x_mask, z_mask)
    return states[:, source] * phase


def apply_term(states: np.ndarray, term: PauliTerm) -> np.ndarray:
    return term.coeff * apply_pauli(states, term.x_mask, term.z_mask)


def apply_pauli_rotation(states: np.ndarray, term: PauliTerm, angle: float) -> np.ndarray:
    """exp(i·angle·c·P) for a real-weighted term c·P."""
    phi = angle * term.coeff.real
    return np.cos(phi) * states + 1j * np.sin(phi) * apply_pauli(states, term.x_mask, term.z_mask)


def pauli_expectations(states: np.ndarray, term: PauliTerm) -> np.ndarray:
    """⟨ψ_b|P|ψ_b⟩ per batch row, unit weight."""
    moved = apply_pauli(states, term.x_mask, term.z_mask)
    return np.einsum("bi,bi->b", states.conj(), moved)


def z_parity_signs(n_qubits: int, mask: int) -> np.ndarray:
    """(-1)^{popcount(index & mask)} for every basis index."""
    index = np.arange(1 << n_qubits, dtype=np.int64)
    return 1 - 2 * parity_array(index & mask)


def normalize(states: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(states, axis=1, keepdims=True)
    return states / np.where(norms > 0.0, norms, 1.0)
