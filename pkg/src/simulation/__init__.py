"""
Simulation Module

Statevector engine, trajectory noise simulator and the energy backends
used by the optimizer.

Author: jsecco ®
"""

from .statevector import (
    ShotResult,
    SimulationError,
    exact_expectation,
    run_statevector,
    sampled_expectation,
)
from .noise import NoiseSpec, NoiseSpecError, TrajectorySimulator, run_noisy
from .backends import BackendError, NoisyBackend, SampledBackend, StatevectorBackend, make_backend, parse_backend_label

__all__ = [
    'ShotResult', 'SimulationError', 'exact_expectation', 'run_statevector', 'sampled_expectation',
    'NoiseSpec', 'NoiseSpecError', 'TrajectorySimulator', 'run_noisy',
    'BackendError', 'NoisyBackend', 'SampledBackend', 'StatevectorBackend',
    'make_backend', 'parse_backend_label',
]
