"""
Circuit Compiler Module

Gate-level IR plus the transpiler to the native {id, rz, sx, x, cx} set.

Author: jsecco ®
"""

from .gates import Circuit, CircuitError, Gate, GateKind, depth, from_text
from .transpiler import TranspileError, lower_pauli_evolution, synthesize_1q, transpile

__all__ = [
    'Circuit', 'CircuitError', 'Gate', 'GateKind', 'depth', 'from_text',
    'TranspileError', 'lower_pauli_evolution', 'synthesize_1q', 'transpile',
]
