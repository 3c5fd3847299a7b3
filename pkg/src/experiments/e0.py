"""
Initial-ansatz (k = 0) energy experiment

Evaluates E_corr of the un-optimized ansatz repeatedly on a device model,
separating hardware error from optimization error.

Author: jsecco ®
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from physics.ansatz import AnsatzSpec, bind, initial_parameters
from physics.hamiltonian import PairingHamiltonian, correlation_energy
from simulation.backends import NoisyBackend, StatevectorBackend
from simulation.noise import NoiseSpec

logger = logging.getLogger(__name__)


@dataclass
class E0Result:
    mean: float
    std: float
    statevector: float
    values: List[float] = field(default_factory=list)
    backend: str = "statevector"

    @property
    def deviation(self) -> float:
        return abs(self.mean - self.statevector)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "backend": self.backend,
            "mean_e0_corr_mev": self.mean,
            "std_mev": self.std,
            "statevector_e0_corr_mev": self.statevector,
            "deviation_mev": self.deviation,
            "values_mev": self.values,
        }


def e0_experiment(h: PairingHamiltonian, ansatz: AnsatzSpec, noise: Optional[NoiseSpec], repeats: int,
                  shots: int, seed: int, config: Optional[Dict[str, Any]] = None) -> E0Result:
    """
    Statistics of E⁰_corr over independent seeds.

    Args:
        h: Pairing Hamiltonian
        ansatz: Ansatz structure
        noise: Device model, or None for the statevector path
        repeats: Number of independent evaluations
        shots: Shots per QWC group
        seed: Master seed
        config: VQE section (initial_excitation, initial_amplitude, trajectories)

    Returns:
        E0Result; std is 0 on the statevector path
    """
    config = config or {}
    theta = initial_parameters(ansatz, tuple(config.get("initial_excitation", (1, 3))),
                               float(config.get("initial_amplitude", 1.0)))
    spec = bind(ansatz, theta)
    exact_backend = StatevectorBackend(h.qubit)
    reference = correlation_energy(exact_backend.energy(spec), h.scheme)

    if noise is None:
        return E0Result(reference, 0.0, reference, [reference])

    backend = NoisyBackend(h.qubit, noise, shots, config.get("trajectories"))
    values = []
    for r in range(repeats):
        run_seed = int(np.random.SeedSequence(seed, spawn_key=(r,)).generate_state(1)[0])
        values.append(correlation_energy(backend.energy(spec, run_seed), h.scheme))
    result = E0Result(float(np.mean(values)), float(np.std(values)), reference, values, noise.label)
    logger.info(
        f"E0 on {noise.label}: {result.mean:.5f} ± {result.std:.5f} MeV "
        f"(statevector {reference:.5f} MeV, {repeats} repeats)"
    )
    return result
