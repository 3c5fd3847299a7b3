"""
Monte-Carlo trajectory noise simulation

A NoiseSpec describes uniform T1/T2 coherence, depolarizing gate errors,
SPAM and readout bit flips plus gate durations. The TrajectorySimulator
evolves batches of statevector trajectories, sampling one Kraus branch per
channel application:

  - preparation: X flip with probability err_spam, then relaxation for prep_ns
  - after x/sx/id/rz: depolarizing(err_1q), then relaxation for the gate duration
  - after cx: two-qubit depolarizing(err_2q) and relaxation on both operands
  - rz takes rz_ns (0 by default), so it relaxes nothing
  - readout: relaxation for readout_ns, sampling, then bit flips (err_readout)

Author: jsecco ®
"""

import json
import logging
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from algebra.grouping import QwcGroup
from algebra.pauli import PauliSum
from compiler.gates import Circuit, FIXED_MATRICES, GateKind, rz_matrix

from . import kernels
from .statevector import (
    ShotResult,
    SimulationError,
    counts_from_indices,
    estimate_from_counts,
    group_values,
)

logger = logging.getLogger(__name__)

DEFAULT_CHUNK_SIZE = 256

_PAULI_STACK = np.array(
    [
        np.eye(2),
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)


class NoiseSpecError(ValueError):
    """Raised for unphysical or malformed noise specifications."""


@dataclass
class GateDurations:
    one_qubit_ns: float = 35.0
    rz_ns: float = 0.0
    two_qubit_ns: float = 300.0
    readout_ns: float = 4000.0
    prep_ns: float = 1000.0

    def to_dict(self) -> Dict[str, float]:
        return {
            "1q_gate_ns": self.one_qubit_ns,
            "rz_gate_ns": self.rz_ns,
            "2q_gate_ns": self.two_qubit_ns,
            "readout_ns": self.readout_ns,
            "prep_ns": self.prep_ns,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "GateDurations":
        defaults = cls()
        return cls(
            one_qubit_ns=float(data.get("1q_gate_ns", defaults.one_qubit_ns)),
            rz_ns=float(data.get("rz_gate_ns", defaults.rz_ns)),
            two_qubit_ns=float(data.get("2q_gate_ns", defaults.two_qubit_ns)),
            readout_ns=float(data.get("readout_ns", defaults.readout_ns)),
            prep_ns=float(data.get("prep_ns", defaults.prep_ns)),
        )


@dataclass
class NoiseSpec:
    """
    Uniform device noise.

    Coherence times are in ms, durations in ns, error rates are probabilities.
    """

    t1_ms: float
    t2_ms: float
    err_1q: float = 0.0
    err_2q: float = 0.0
    err_readout: float = 0.0
    err_spam: float = 0.0
    durations: GateDurations = field(default_factory=GateDurations)
    label: str = "custom"

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if not (self.t1_ms > 0 and self.t2_ms > 0):
            raise NoiseSpecError(f"Coherence times must be positive (T1={self.t1_ms}, T2={self.t2_ms})")
        if self.t2_ms > 2.0 * self.t1_ms * (1.0 + 1e-12):
            raise NoiseSpecError(f"Unphysical spec: T2={self.t2_ms} ms exceeds 2·T1={2 * self.t1_ms} ms")
        for name in ("err_1q", "err_2q", "err_readout", "err_spam"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise NoiseSpecError(f"{name}={value} is not a probability")
        for name, value in self.durations.to_dict().items():
            if value < 0:
                raise NoiseSpecError(f"Duration {name} must be >= 0, got {value}")

    @classmethod
    def ideal(cls) -> "NoiseSpec":
        return cls(t1_ms=1e9, t2_ms=1e9, label="ideal")

    def relaxation(self, duration_ns: float) -> Tuple[float, float]:
        """
        Amplitude-damping and phase-flip probabilities over a duration.

        Returns:
            (1 - exp(-t/T1), (1 - exp(-t/T_phi)) / 2) with 1/T_phi = 1/T2 - 1/(2 T1)
        """
        t_ms = duration_ns * 1e-6
        if t_ms <= 0.0:
            return 0.0, 0.0
        gamma = -math.expm1(-t_ms / self.t1_ms)
        dephasing_rate = 1.0 / self.t2_ms - 1.0 / (2.0 * self.t1_ms)
        p_phase = 0.0
        if dephasing_rate > 0.0:
            p_phase = -0.5 * math.expm1(-t_ms * dephasing_rate)
        return gamma, p_phase

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["durations"] = self.durations.to_dict()
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "NoiseSpec":
        try:
            return cls(
                t1_ms=float(data["t1_ms"]),
                t2_ms=float(data["t2_ms"]),
                err_1q=float(data.get("err_1q", 0.0)),
                err_2q=float(data.get("err_2q", 0.0)),
                err_readout=float(data.get("err_readout", 0.0)),
                err_spam=float(data.get("err_spam", 0.0)),
                durations=GateDurations.from_dict(data.get("durations", {})),
                label=str(data.get("label", "custom")),
            )
        except (KeyError, TypeError, ValueError) as e:
            if isinstance(e, NoiseSpecError):
                raise
            raise NoiseSpecError(f"Malformed noise spec: {e}") from e


def load_noise_spec(path: Union[str, Path]) -> NoiseSpec:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return NoiseSpec.from_dict(json.load(f))
    except (OSError, json.JSONDecodeError) as e:
        raise NoiseSpecError(f"Cannot read noise spec {path}: {e}") from e


def save_noise_spec(spec: NoiseSpec, path: Union[str, Path]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(spec.to_dict(), f, indent=2)


def split_shots(shots: int, trajectories: int) -> np.ndarray:
    """Shots per trajectory, as even as possible, earlier trajectories first."""
    base, extra = divmod(shots, trajectories)
    per = np.full(trajectories, base, dtype=np.int64)
    per[:extra] += 1
    return per


def chunk_rng(seed: Optional[int], chunk: int, stream: int = 0) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(chunk, stream)))


class TrajectorySimulator:
    """
    Batched trajectory simulator for native circuits under a NoiseSpec.
    """

    def __init__(self, spec: NoiseSpec, chunk_size: int = DEFAULT_CHUNK_SIZE):
        """
        Initialize the simulator.

        Args:
            spec: Validated noise specification
            chunk_size: Trajectories evolved together in one batch
        """
        spec.validate()
        self.spec = spec
        self.chunk_size = max(1, int(chunk_size))
        self.logger = logging.getLogger(self.__class__.__name__)

        durations = spec.durations
        self.relax_1q = spec.relaxation(durations.one_qubit_ns)
        self.relax_2q = spec.relaxation(durations.two_qubit_ns)
        self.relax_readout = spec.relaxation(durations.readout_ns)
        self.relax_prep = spec.relaxation(durations.prep_ns)
        self.relax_rz = spec.relaxation(durations.rz_ns)

        self.logger.debug(
            f"TrajectorySimulator initialized for '{spec.label}': "
            f"1q relax={self.relax_1q}, 2q relax={self.relax_2q}, readout relax={self.relax_readout}"
        )

    # Channels
    def _relax(self, states: np.ndarray, qubit: int, probabilities: Tuple[float, float],
               rng: np.random.Generator) -> np.ndarray:
        gamma, p_phase = probabilities
        batch = states.shape[0]
        if gamma > 0.0:
            low = 1 << qubit
            view = states.reshape(batch, -1, 2, low)
            p_one = np.sum(np.abs(view[:, :, 1, :]) ** 2, axis=(1, 2))
            jump = rng.random(batch) < gamma * p_one
            kraus = np.zeros((batch, 2, 2), dtype=complex)
            kraus[:, 0, 0] = np.where(jump, 0.0, 1.0)
            kraus[:, 1, 1] = np.where(jump, 0.0, math.sqrt(1.0 - gamma))
            kraus[:, 0, 1] = np.where(jump, math.sqrt(gamma), 0.0)
            states = kernels.normalize(kernels.apply_1q(states, kraus, qubit))
        if p_phase > 0.0:
            flip = rng.random(batch) < p_phase
            if flip.any():
                diagonal = np.zeros((batch, 2, 2), dtype=complex)
                diagonal[:, 0, 0] = 1.0
                diagonal[:, 1, 1] = np.where(flip, -1.0, 1.0)
                states = kernels.apply_1q(states, diagonal, qubit)
        return states

    def _depolarize(self, states: np.ndarray, qubits: Sequence[int], eps: float,
                    rng: np.random.Generator) -> np.ndarray:
        if eps <= 0.0:
            return states
        batch = states.shape[0]
        hit = rng.random(batch) < eps
        letters = rng.integers(0, 4, size=(batch, len(qubits)))
        letters[~hit] = 0
        for column, qubit in enumerate(qubits):
            if letters[:, column].any():
                states = kernels.apply_1q(states, _PAULI_STACK[letters[:, column]], qubit)
        return states

    def apply_noisy_gate(self, states: np.ndarray, gate, rng: np.random.Generator) -> np.ndarray:
        kind = gate.kind
        if kind is GateKind.RZ:
            q = gate.qubits[0]
            states = kernels.apply_1q(states, rz_matrix(gate.angle), q)
            states = self._depolarize(states, (q,), self.spec.err_1q, rng)
            return self._relax(states, q, self.relax_rz, rng)
        if kind in (GateKind.X, GateKind.SX, GateKind.ID):
            q = gate.qubits[0]
            if kind is not GateKind.ID:
                states = kernels.apply_1q(states, FIXED_MATRICES[kind], q)
            states = self._depolarize(states, (q,), self.spec.err_1q, rng)
            return self._relax(states, q, self.relax_1q, rng)
        if kind is GateKind.CX:
            control, target = gate.qubits
            states = kernels.apply_cx(states, control, target)
            states = self._depolarize(states, (control, target), self.spec.err_2q, rng)
            states = self._relax(states, control, self.relax_2q, rng)
            return self._relax(states, target, self.relax_2q, rng)
        if kind in (GateKind.BARRIER, GateKind.MEASURE):
            return states
        raise SimulationError(f"Noisy path needs native gates, got {gate.name}")

    # Trajectory stages
    def prepare(self, n_qubits: int, batch: int, rng: np.random.Generator) -> np.ndarray:
        flips = rng.random((batch, n_qubits)) < self.spec.err_spam
        indices = (flips.astype(np.int64) << np.arange(n_qubits, dtype=np.int64)).sum(axis=1)
        states = kernels.basis_states(n_qubits, indices)
        for q in range(n_qubits):
            states = self._relax(states, q, self.relax_prep, rng)
        return states

    def evolve(self, c: Circuit, states: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        for gate in c.gates:
            states = self.apply_noisy_gate(states, gate, rng)
        return states

    def read_out(self, states: np.ndarray, shots_per_row: np.ndarray,
                 rng: np.random.Generator) -> np.ndarray:
        """Relax for the readout window, sample basis indices, then flip bits."""
        n_qubits = states.shape[1].bit_length() - 1
        for q in range(n_qubits):
            states = self._relax(states, q, self.relax_readout, rng)
        probabilities = np.abs(states) ** 2
        probabilities /= probabilities.sum(axis=1, keepdims=True)
        samples = []
        for row, shots in enumerate(shots_per_row):
            if shots > 0:
                samples.append(rng.choice(states.shape[1], size=int(shots), p=probabilities[row]))
        indices = np.concatenate(samples) if samples else np.zeros(0, dtype=np.int64)
        if self.spec.err_readout > 0.0 and len(indices):
            flips = rng.random((len(indices), n_qubits)) < self.spec.err_readout
            indices = indices ^ (flips.astype(np.int64) << np.arange(n_qubits, dtype=np.int64)).sum(axis=1)
        return indices.astype(np.int64)

    def _check_native(self, c: Circuit) -> None:
        if not c.is_native():
            bad = sorted({g.name for g in c.gates if not (g.is_native() or g.kind in (GateKind.MEASURE, GateKind.BARRIER))})
            raise SimulationError(f"Circuit must be transpiled first; found {bad}")

    def run(self, c: Circuit, shots: int, seed: Optional[int] = None,
            trajectories: Optional[int] = None) -> ShotResult:
        """
        Sample the noisy output distribution of a native circuit.

        Args:
            c: Native circuit
            shots: Number of measured bitstrings
            seed: Master seed
            trajectories: Independent trajectories sharing the shots (default: one per shot)

        Returns:
            ShotResult over all qubits, qubit 0 leftmost
        """
        self._check_native(c)
        if shots < 1:
            raise SimulationError(f"shots must be >= 1, got {shots}")
        n_traj = min(shots, trajectories or shots)
        per_trajectory = split_shots(shots, n_traj)

        indices: List[np.ndarray] = []
        for chunk, start in enumerate(range(0, n_traj, self.chunk_size)):
            stop = min(start + self.chunk_size, n_traj)
            rng = chunk_rng(seed, chunk)
            states = self.prepare(c.n_qubits, stop - start, rng)
            states = self.evolve(c, states, rng)
            indices.append(self.read_out(states, per_trajectory[start:stop], rng))
        return ShotResult(counts_from_indices(np.concatenate(indices), c.n_qubits), shots)

    def expectation(self, c: Circuit, h: PauliSum, groups: List[QwcGroup],
                    rotations: List[Circuit], shots: int, seed: Optional[int] = None,
                    trajectories: Optional[int] = None) -> Tuple[float, float]:
        """
        Noisy grouped energy estimate.

        Every group gets its own trajectories: state preparation, the group's
        native basis rotation and readout, with `shots` shots spread over
        them. By default each shot is its own trajectory. With a trajectory
        count below `shots` the shots of one trajectory share its noise
        realization, and the returned stderr, which treats shots as
        independent, understates the spread.

        Returns:
            (mean, stderr) in the units of h
        """
        self._check_native(c)
        if shots < 1:
            raise SimulationError(f"shots must be >= 1, got {shots}")
        n_traj = min(shots, trajectories or shots)
        per_trajectory = split_shots(shots, n_traj)

        mean = h.identity_coeff().real
        variance = 0.0
        for g, (group, rotation) in enumerate(zip(groups, rotations)):
            counts = np.zeros(1 << h.n_qubits, dtype=np.int64)
            for chunk, start in enumerate(range(0, n_traj, self.chunk_size)):
                stop = min(start + self.chunk_size, n_traj)
                rng = chunk_rng(seed, chunk, stream=g)
                states = self.evolve(c, self.prepare(c.n_qubits, stop - start, rng), rng)
                states = self.evolve(rotation, states, rng)
                indices = self.read_out(states, per_trajectory[start:stop], rng)
                counts += np.bincount(indices, minlength=1 << h.n_qubits)
            group_mean, group_var = estimate_from_counts(group_values(h, group), counts)
            mean += group_mean
            variance += group_var
        return mean, math.sqrt(variance)


def run_noisy(c: Circuit, spec: NoiseSpec, shots: int, seed: Optional[int] = None,
              trajectories: Optional[int] = None) -> ShotResult:
    """Convenience wrapper around TrajectorySimulator.run."""
    return TrajectorySimulator(spec).run(c, shots, seed, trajectories)
