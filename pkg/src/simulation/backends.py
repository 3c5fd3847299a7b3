"""
Energy backends

A backend turns an AnsatzSpec into an energy estimate of the pairing
Hamiltonian: exactly (statevector), with ideal shot sampling, or through
the trajectory noise simulator on the transpiled circuit.

Author: jsecco ®
"""

import logging
import re
from typing import Any, Dict, List, Optional

from algebra.grouping import group_qwc
from algebra.pauli import PauliSum
from compiler.gates import Circuit
from compiler.transpiler import transpile
from physics.ansatz import AnsatzSpec, build_upccd

from .noise import NoiseSpec, NoiseSpecError, TrajectorySimulator
from .statevector import measurement_rotation, run_statevector, sampled_expectation, state_expectation

logger = logging.getLogger(__name__)

GUADALUPE_MEAN = {
    "t1_ms": 0.070,
    "t2_ms": 0.088,
    "err_1q": 3.03e-4,
    "err_2q": 1.08e-2,
    "err_readout": 1.98e-2,
    "err_spam": 1.98e-2,
}

_JOHOR_PATTERNS = (
    re.compile(r"^johor:\s*T\s*=\s*([^,]+),\s*eps\s*=\s*(.+)$", re.IGNORECASE),
    re.compile(r"^johor\(\s*([^,]+?)\s*(?:ms)?\s*,\s*([^)]+)\)$", re.IGNORECASE),
)


class BackendError(ValueError):
    """Raised for unknown backend labels."""


def johor_spec(t_ms: float, eps: float) -> NoiseSpec:
    """T1 = T2 = T and one error probability ε for every error class."""
    return NoiseSpec(
        t1_ms=t_ms, t2_ms=t_ms, err_1q=eps, err_2q=eps, err_readout=eps, err_spam=eps,
        label=f"johor:T={t_ms:g},eps={eps:g}",
    )


def make_backend(label: str) -> NoiseSpec:
    """
    NoiseSpec for a named device model.

    Args:
        label: 'guadalupe-mean', 'johor:T=<ms>,eps=<p>' or 'johor(<ms>, <p>)'

    Returns:
        NoiseSpec

    Raises:
        BackendError: For unknown labels
    """
    text = label.strip()
    if text.lower() == "guadalupe-mean":
        return NoiseSpec(label="guadalupe-mean", **GUADALUPE_MEAN)
    for pattern in _JOHOR_PATTERNS:
        match = pattern.match(text)
        if match:
            try:
                t_ms = float(match.group(1))
                eps = float(match.group(2))
            except ValueError as e:
                raise BackendError(f"Bad johor parameters in '{label}': {e}") from e
            try:
                return johor_spec(t_ms, eps)
            except NoiseSpecError as e:
                raise BackendError(f"Unphysical johor spec '{label}': {e}") from e
    raise BackendError(f"Unknown backend label '{label}'")


class StatevectorBackend:
    """Exact expectation values."""

    name = "statevector"

    def __init__(self, hamiltonian: PauliSum):
        self.hamiltonian = hamiltonian
        self.evaluations = 0
        self.logger = logging.getLogger(self.__class__.__name__)

    def energy(self, spec: AnsatzSpec, seed: Optional[int] = None) -> float:
        self.evaluations += 1
        return state_expectation(run_statevector(build_upccd(spec)), self.hamiltonian)


class SampledBackend(StatevectorBackend):
    """Ideal device: exact state, finite shots per QWC group."""

    name = "sampled"

    def __init__(self, hamiltonian: PauliSum, shots: int = 8192):
        super().__init__(hamiltonian)
        self.shots = shots
        self.groups = group_qwc(hamiltonian)

    def energy(self, spec: AnsatzSpec, seed: Optional[int] = None) -> float:
        self.evaluations += 1
        state = run_statevector(build_upccd(spec))
        mean, _ = sampled_expectation(state, self.hamiltonian, self.shots, seed, self.groups)
        return mean


class NoisyBackend:
    """Transpiled ansatz run through the trajectory simulator."""

    def __init__(self, hamiltonian: PauliSum, noise: NoiseSpec, shots: int = 8192,
                 trajectories: Optional[int] = None):
        self.hamiltonian = hamiltonian
        self.noise = noise
        self.shots = shots
        self.trajectories = trajectories
        self.name = noise.label
        self.evaluations = 0
        self.simulator = TrajectorySimulator(noise)
        self.groups = group_qwc(hamiltonian)
        self.rotations: List[Circuit] = [
            transpile(measurement_rotation(g, hamiltonian.n_qubits)) for g in self.groups
        ]
        self.logger = logging.getLogger(self.__class__.__name__)
        self.logger.info(
            f"NoisyBackend initialized: {self.name}, {shots} shots, "
            f"{trajectories or shots} trajectories, {len(self.groups)} QWC groups"
        )

    def energy(self, spec: AnsatzSpec, seed: Optional[int] = None) -> float:
        self.evaluations += 1
        native = transpile(build_upccd(spec))
        mean, _ = self.simulator.expectation(
            native, self.hamiltonian, self.groups, self.rotations, self.shots, seed, self.trajectories
        )
        return mean


def parse_backend_label(label: str, hamiltonian: PauliSum, config: Optional[Dict[str, Any]] = None):
    """
    Build an energy backend from a CLI/config label.

    Args:
        label: 'statevector', 'sampled', or any make_backend label
        hamiltonian: Qubit Hamiltonian to evaluate
        config: Backend section of the configuration (shots, trajectories)

    Returns:
        Backend object exposing energy(spec, seed)
    """
    config = config or {}
    shots = int(config.get("shots", 8192))
    text = label.strip().lower()
    if text == "statevector":
        return StatevectorBackend(hamiltonian)
    if text == "sampled":
        return SampledBackend(hamiltonian, shots)
    noise = make_backend(label)
    return NoisyBackend(hamiltonian, noise, shots, config.get("trajectories"))
