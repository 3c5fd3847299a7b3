"""
Transpiler to the native gate set {id, rz, sx, x, cx}

Pauli evolutions are lowered to basis changes around a CX ladder, the
remaining Clifford helpers are rewritten as rz/sx sequences, and peephole
passes run to a fixed point: single-qubit run fusion with ZSX Euler
resynthesis, adjacent CX cancellation and zero-angle RZ removal.

Author: jsecco ®
"""

import logging
import math
from typing import Dict, List, Optional, Tuple

import numpy as np

from .gates import Circuit, CircuitError, DIRECTIVE_KINDS, Gate, GateKind

logger = logging.getLogger(__name__)

ANGLE_TOLERANCE = 1e-9
MAX_PEEPHOLE_ROUNDS = 20


class TranspileError(CircuitError):
    """Raised for gates the transpiler cannot lower."""


def wrap_angle(angle: float) -> float:
    """Map an angle into (-π, π]."""
    wrapped = math.fmod(angle + math.pi, 2.0 * math.pi)
    if wrapped <= 0.0:
        wrapped += 2.0 * math.pi
    return wrapped - math.pi


def _is_zero_angle(angle: float) -> bool:
    return abs(wrap_angle(angle)) < ANGLE_TOLERANCE


def lower_pauli_evolution(g: Gate) -> Circuit:
    """
    Lower exp(i·angle·c·P) to basis changes, a CX ladder and one RZ.

    X qubits get H, Y qubits get Sdg then H; the ladder runs over the
    support in ascending order onto the highest qubit, which carries
    RZ(-2·angle·c). Everything before the RZ is then undone.

    Args:
        g: PAULI_EVOLUTION gate with a real-weighted term

    Returns:
        Circuit over the term's qubit count

    Raises:
        TranspileError: For identity or complex-weighted terms
    """
    if g.kind is not GateKind.PAULI_EVOLUTION or g.term is None:
        raise TranspileError(f"Expected a Pauli evolution, got {g.name}")
    term = g.term
    if term.is_identity():
        raise TranspileError("Identity evolution is a global phase; fold it into the constant")
    if abs(term.coeff.imag) > 1e-12:
        raise TranspileError(f"Evolution term {term.label()} must have a real weight")

    support = term.support_qubits()
    circuit = Circuit(term.n_qubits)
    for q in support:
        letter = term.letter(q)
        if letter == "X":
            circuit.h(q)
        elif letter == "Y":
            circuit.sdg(q)
            circuit.h(q)
    ladder = list(zip(support[:-1], support[1:]))
    for control, target in ladder:
        circuit.cx(control, target)
    circuit.rz(-2.0 * g.angle * term.coeff.real, support[-1])
    for control, target in reversed(ladder):
        circuit.cx(control, target)
    for q in support:
        letter = term.letter(q)
        if letter == "X":
            circuit.h(q)
        elif letter == "Y":
            circuit.h(q)
            circuit.s(q)
    return circuit


def _native_rewrite(g: Gate) -> List[Gate]:
    q = g.qubits[0] if g.qubits else None
    if g.kind is GateKind.H:
        return [
            Gate(GateKind.RZ, (q,), angle=math.pi / 2),
            Gate(GateKind.SX, (q,)),
            Gate(GateKind.RZ, (q,), angle=math.pi / 2),
        ]
    if g.kind is GateKind.S:
        return [Gate(GateKind.RZ, (q,), angle=math.pi / 2)]
    if g.kind is GateKind.SDG:
        return [Gate(GateKind.RZ, (q,), angle=-math.pi / 2)]
    if g.is_native() or g.kind in DIRECTIVE_KINDS:
        return [g]
    raise TranspileError(f"Unsupported gate kind {g.name}")


def zsx_angles(u: np.ndarray) -> Tuple[float, float, float]:
    """
    ZYZ Euler angles (θ, φ, λ) with U ∝ RZ(φ)·RY(θ)·RZ(λ).
    """
    det = np.linalg.det(u)
    v = u / np.sqrt(det)
    theta = 2.0 * math.atan2(abs(v[1, 0]), abs(v[0, 0]))
    s = 0.0 if abs(v[0, 0]) < ANGLE_TOLERANCE else float(np.angle(v[1, 1]))
    d = 0.0 if abs(v[1, 0]) < ANGLE_TOLERANCE else float(np.angle(v[1, 0]))
    return theta, s + d, s - d


def synthesize_1q(u: np.ndarray, qubit: int) -> List[Gate]:
    """
    Native rz/sx/x sequence reproducing a 2x2 unitary up to global phase.

    Args:
        u: 2x2 unitary
        qubit: Target qubit

    Returns:
        Between zero and five native gates
    """
    theta, phi, lam = zsx_angles(u)
    gates: List[Gate] = []

    def rz(angle: float) -> None:
        if not _is_zero_angle(angle):
            gates.append(Gate(GateKind.RZ, (qubit,), angle=wrap_angle(angle)))

    if abs(theta) < ANGLE_TOLERANCE:
        rz(phi + lam)
    elif abs(theta - math.pi / 2) < ANGLE_TOLERANCE:
        rz(lam - math.pi / 2)
        gates.append(Gate(GateKind.SX, (qubit,)))
        rz(phi + math.pi / 2)
    elif abs(theta - math.pi) < ANGLE_TOLERANCE:
        rz(lam - phi - math.pi)
        gates.append(Gate(GateKind.X, (qubit,)))
    else:
        rz(lam)
        gates.append(Gate(GateKind.SX, (qubit,)))
        rz(theta - math.pi)
        gates.append(Gate(GateKind.SX, (qubit,)))
        rz(phi + math.pi)
    return gates


def _fuse_single_qubit_runs(gates: List[Gate], n_qubits: int) -> List[Gate]:
    out: List[Gate] = []
    pending: Dict[int, List[Gate]] = {q: [] for q in range(n_qubits)}

    def flush(q: int) -> None:
        run = pending[q]
        if not run:
            return
        matrix = np.eye(2, dtype=complex)
        for gate in run:
            matrix = gate.matrix() @ matrix
        replacement = synthesize_1q(matrix, q)
        out.extend(replacement if len(replacement) <= len(run) else run)
        pending[q] = []

    for gate in gates:
        if gate.kind in (GateKind.RZ, GateKind.SX, GateKind.X):
            pending[gate.qubits[0]].append(gate)
            continue
        for q in gate.qubits:
            flush(q)
        out.append(gate)
    for q in range(n_qubits):
        flush(q)
    return out


def _cancel_cx_pairs(gates: List[Gate], n_qubits: int) -> List[Gate]:
    out: List[Optional[Gate]] = []
    stacks: Dict[int, List[int]] = {q: [] for q in range(n_qubits)}
    for gate in gates:
        if gate.kind is GateKind.CX:
            control, target = gate.qubits
            if stacks[control] and stacks[target] and stacks[control][-1] == stacks[target][-1]:
                previous = out[stacks[control][-1]]
                if previous is not None and previous.kind is GateKind.CX and previous.qubits == gate.qubits:
                    out[stacks[control][-1]] = None
                    stacks[control].pop()
                    stacks[target].pop()
                    continue
        index = len(out)
        out.append(gate)
        for q in gate.qubits:
            stacks[q].append(index)
    return [g for g in out if g is not None]


def _drop_zero_rz(gates: List[Gate]) -> List[Gate]:
    return [g for g in gates if not (g.kind is GateKind.RZ and _is_zero_angle(g.angle))]


def peephole(c: Circuit) -> Circuit:
    """Run the peephole passes until the gate list stops shrinking."""
    gates = list(c.gates)
    for _ in range(MAX_PEEPHOLE_ROUNDS):
        before = len(gates)
        gates = _fuse_single_qubit_runs(gates, c.n_qubits)
        gates = _cancel_cx_pairs(gates, c.n_qubits)
        gates = _drop_zero_rz(gates)
        if len(gates) >= before:
            break
    return Circuit(c.n_qubits, gates)


def lower(c: Circuit) -> Circuit:
    """Lower Pauli evolutions and Clifford helpers without optimizing."""
    out = Circuit(c.n_qubits)
    for gate in c.gates:
        if gate.kind is GateKind.PAULI_EVOLUTION:
            expanded = lower_pauli_evolution(gate).gates
        else:
            expanded = [gate]
        for g in expanded:
            out.extend(_native_rewrite(g))
    return out


def transpile(c: Circuit) -> Circuit:
    """
    Rewrite a circuit into {id, rz, sx, x, cx} plus measure/barrier directives.

    Args:
        c: Any circuit of the IR

    Returns:
        Native circuit, equal to c up to global phase

    Raises:
        TranspileError: On gates that cannot be lowered
    """
    lowered = lower(c)
    optimized = peephole(lowered)
    logger.debug(
        f"Transpiled {len(c)} gates -> {len(lowered)} lowered -> {len(optimized)} native "
        f"(depth {optimized.depth()})"
    )
    return optimized
