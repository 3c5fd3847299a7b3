"""
Gate-level circuit IR

Gates are immutable records; a Circuit is an ordered gate list over a fixed
qubit count. Both abstract Pauli-evolution gates and the native
{id, rz, sx, x, cx} set live in the same IR.

Author: jsecco ®
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np

from algebra.pauli import PauliTerm

logger = logging.getLogger(__name__)


class CircuitError(ValueError):
    """Raised on malformed gates or circuits."""


class GateKind(Enum):
    X = "x"
    SX = "sx"
    RZ = "rz"
    ID = "id"
    CX = "cx"
    H = "h"
    S = "s"
    SDG = "sdg"
    PAULI_EVOLUTION = "pauli_evolution"
    MEASURE = "measure"
    BARRIER = "barrier"


NATIVE_KINDS = frozenset({GateKind.ID, GateKind.RZ, GateKind.SX, GateKind.X, GateKind.CX})
DIRECTIVE_KINDS = frozenset({GateKind.MEASURE, GateKind.BARRIER})
SINGLE_QUBIT_KINDS = frozenset(
    {GateKind.X, GateKind.SX, GateKind.RZ, GateKind.ID, GateKind.H, GateKind.S, GateKind.SDG}
)

_SQRT_HALF = 1.0 / math.sqrt(2.0)

FIXED_MATRICES: Dict[GateKind, np.ndarray] = {
    GateKind.X: np.array([[0, 1], [1, 0]], dtype=complex),
    GateKind.SX: 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]], dtype=complex),
    GateKind.ID: np.eye(2, dtype=complex),
    GateKind.H: _SQRT_HALF * np.array([[1, 1], [1, -1]], dtype=complex),
    GateKind.S: np.array([[1, 0], [0, 1j]], dtype=complex),
    GateKind.SDG: np.array([[1, 0], [0, -1j]], dtype=complex),
}


def rz_matrix(angle: float) -> np.ndarray:
    return np.array([[np.exp(-0.5j * angle), 0], [0, np.exp(0.5j * angle)]], dtype=complex)


@dataclass(frozen=True)
class Gate:
    """
    One circuit instruction.

    angle is set for RZ and PAULI_EVOLUTION; term is the (real-weighted)
    Pauli string of a PAULI_EVOLUTION gate, which implements
    exp(i · angle · term.coeff · P).
    """

    kind: GateKind
    qubits: Tuple[int, ...]
    angle: Optional[float] = None
    term: Optional[PauliTerm] = None

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if self.kind in SINGLE_QUBIT_KINDS or self.kind is GateKind.MEASURE:
            arity_ok = len(self.qubits) == 1
        elif self.kind is GateKind.CX:
            arity_ok = len(self.qubits) == 2 and self.qubits[0] != self.qubits[1]
        elif self.kind is GateKind.PAULI_EVOLUTION:
            arity_ok = self.term is not None and list(self.qubits) == self.term.support_qubits()
        else:
            arity_ok = len(self.qubits) >= 1 and len(set(self.qubits)) == len(self.qubits)
        if not arity_ok:
            raise CircuitError(f"Bad operands {self.qubits} for {self.kind.value}")
        if self.kind in (GateKind.RZ, GateKind.PAULI_EVOLUTION):
            if self.angle is None or not math.isfinite(self.angle):
                raise CircuitError(f"{self.kind.value} needs a finite angle, got {self.angle}")

    @property
    def name(self) -> str:
        return self.kind.value

    def is_native(self) -> bool:
        return self.kind in NATIVE_KINDS

    def matrix(self) -> np.ndarray:
        """2x2 matrix of a single-qubit gate."""
        if self.kind is GateKind.RZ:
            return rz_matrix(self.angle)
        if self.kind in FIXED_MATRICES:
            return FIXED_MATRICES[self.kind]
        raise CircuitError(f"{self.kind.value} has no single-qubit matrix")

    def to_text(self) -> str:
        operands = " ".join(str(q) for q in self.qubits)
        if self.kind is GateKind.RZ:
            return f"rz {self.angle:.10g} {operands}"
        if self.kind is GateKind.PAULI_EVOLUTION:
            return f"pauli_evolution {self.angle:.10g} {self.term.coeff.real:.10g} {self.term.label()}"
        return f"{self.name} {operands}"


@dataclass
class Circuit:
    """Ordered gate list on n_qubits qubits."""

    n_qubits: int
    gates: List[Gate] = field(default_factory=list)

    def __post_init__(self):
        if self.n_qubits < 1:
            raise CircuitError(f"n_qubits must be positive, got {self.n_qubits}")
        for gate in self.gates:
            self._check(gate)

    def _check(self, gate: Gate) -> None:
        for q in gate.qubits:
            if not 0 <= q < self.n_qubits:
                raise CircuitError(f"Qubit {q} out of range in {gate.to_text()}")
        if gate.term is not None and gate.term.n_qubits != self.n_qubits:
            raise CircuitError("Pauli evolution term acts on a different qubit count")

    def append(self, gate: Gate) -> "Circuit":
        self._check(gate)
        self.gates.append(gate)
        return self

    def extend(self, gates: Iterable[Gate]) -> "Circuit":
        for gate in gates:
            self.append(gate)
        return self

    def compose(self, other: "Circuit") -> "Circuit":
        if other.n_qubits != self.n_qubits:
            raise CircuitError(f"Cannot compose {other.n_qubits}-qubit circuit onto {self.n_qubits}")
        return Circuit(self.n_qubits, self.gates + other.gates)

    def copy(self) -> "Circuit":
        return Circuit(self.n_qubits, list(self.gates))

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    # Builders
    def x(self, q: int) -> "Circuit":
        return self.append(Gate(GateKind.X, (q,)))

    def sx(self, q: int) -> "Circuit":
        return self.append(Gate(GateKind.SX, (q,)))

    def rz(self, angle: float, q: int) -> "Circuit":
        return self.append(Gate(GateKind.RZ, (q,), angle=float(angle)))

    def id(self, q: int) -> "Circuit":
        return self.append(Gate(GateKind.ID, (q,)))

    def h(self, q: int) -> "Circuit":
        return self.append(Gate(GateKind.H, (q,)))

    def s(self, q: int) -> "Circuit":
        return self.append(Gate(GateKind.S, (q,)))

    def sdg(self, q: int) -> "Circuit":
        return self.append(Gate(GateKind.SDG, (q,)))

    def cx(self, control: int, target: int) -> "Circuit":
        return self.append(Gate(GateKind.CX, (control, target)))

    def measure(self, q: int) -> "Circuit":
        return self.append(Gate(GateKind.MEASURE, (q,)))

    def measure_all(self) -> "Circuit":
        for q in range(self.n_qubits):
            self.measure(q)
        return self

    def barrier(self, *qubits: int) -> "Circuit":
        return self.append(Gate(GateKind.BARRIER, tuple(qubits) or tuple(range(self.n_qubits))))

    def pauli_evolution(self, term: PauliTerm, angle: float) -> "Circuit":
        return self.append(
            Gate(GateKind.PAULI_EVOLUTION, tuple(term.support_qubits()), angle=float(angle), term=term)
        )

    # Queries
    def has_measurements(self) -> bool:
        return any(g.kind is GateKind.MEASURE for g in self.gates)

    def is_native(self) -> bool:
        return all(g.is_native() or g.kind in DIRECTIVE_KINDS for g in self.gates)

    def count_ops(self) -> Dict[str, int]:
        counts: Dict[str, int] = {}
        for gate in self.gates:
            counts[gate.name] = counts.get(gate.name, 0) + 1
        return counts

    def depth(self) -> int:
        return depth(self)

    def to_text(self) -> str:
        return "\n".join(gate.to_text() for gate in self.gates)


def depth(c: Circuit) -> int:
    """
    Longest dependency chain, gates on disjoint qubits sharing a layer.

    Barriers and measurements occupy a layer on their operands.
    """
    levels = [0] * c.n_qubits
    for gate in c.gates:
        layer = max(levels[q] for q in gate.qubits) + 1
        for q in gate.qubits:
            levels[q] = layer
    return max(levels, default=0)


def from_text(text: str, n_qubits: int) -> Circuit:
    """
    Parse the one-gate-per-line dump written by Circuit.to_text.

    Raises:
        CircuitError: On unknown gate names or malformed lines
    """
    circuit = Circuit(n_qubits)
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            kind = GateKind(parts[0].lower())
            if kind is GateKind.RZ:
                circuit.rz(float(parts[1]), int(parts[2]))
            elif kind is GateKind.PAULI_EVOLUTION:
                term = PauliTerm.from_label(parts[3], float(parts[2]))
                circuit.pauli_evolution(term, float(parts[1]))
            else:
                circuit.append(Gate(kind, tuple(int(p) for p in parts[1:])))
        except (ValueError, IndexError) as e:
            raise CircuitError(f"Line {line_no}: cannot parse '{raw}': {e}") from e
    return circuit
