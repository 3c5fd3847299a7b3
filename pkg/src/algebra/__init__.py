"""
Operator Algebra Module

Pauli-string algebra, qubit-wise commuting grouping and the
Jordan-Wigner mapping of fermionic operators.

Author: jsecco ®
"""

from .pauli import PauliError, PauliSum, PauliTerm, commutes, mul, qwc_commutes
from .grouping import QwcGroup, group_qwc
from .fermion import (
    FermionError,
    FermionOperator,
    FermionTerm,
    LadderKind,
    jw_ladder,
    jw_map,
    map_pair_excitation,
)

__all__ = [
    'PauliError', 'PauliSum', 'PauliTerm', 'commutes', 'mul', 'qwc_commutes',
    'QwcGroup', 'group_qwc',
    'FermionError', 'FermionOperator', 'FermionTerm', 'LadderKind',
    'jw_ladder', 'jw_map', 'map_pair_excitation',
]
