"""
Qubit-wise commuting measurement grouping

Greedy first-fit colouring of the Hamiltonian terms: terms are visited by
descending |weight| and join the first group whose shared basis they fit.

Author: jsecco ®
"""

import logging
from dataclasses import dataclass, field
from typing import List

from .pauli import PauliSum, PauliTerm, qwc_commutes

logger = logging.getLogger(__name__)


@dataclass
class QwcGroup:
    """
    A set of mutually qubit-wise commuting terms.

    members index into the PauliSum the group was built from;
    measurement_basis holds one letter per qubit ('I' where no member acts).
    """

    members: List[int] = field(default_factory=list)
    measurement_basis: List[str] = field(default_factory=list)

    def basis_term(self) -> PauliTerm:
        return PauliTerm.from_label("".join(self.measurement_basis))

    def accepts(self, term: PauliTerm) -> bool:
        return qwc_commutes(self.basis_term(), term)

    def add(self, index: int, term: PauliTerm) -> None:
        for u in term.support_qubits():
            self.measurement_basis[u] = term.letter(u)
        self.members.append(index)

    def basis_label(self) -> str:
        return "".join(self.measurement_basis)


def group_qwc(h: PauliSum) -> List[QwcGroup]:
    """
    Partition the non-identity terms of h into QWC groups.

    The identity term stays outside every group and is added back as a
    constant by the estimators.

    Args:
        h: Canonical PauliSum

    Returns:
        List of QwcGroup in creation order
    """
    order = sorted(
        (i for i, term in enumerate(h.terms) if not term.is_identity()),
        key=lambda i: -abs(h.terms[i].coeff),
    )
    groups: List[QwcGroup] = []
    for index in order:
        term = h.terms[index]
        for group in groups:
            if group.accepts(term):
                group.add(index, term)
                break
        else:
            group = QwcGroup(members=[], measurement_basis=["I"] * h.n_qubits)
            group.add(index, term)
            groups.append(group)

    logger.debug(f"Grouped {len(order)} terms into {len(groups)} QWC groups")
    return groups


def validate_groups(h: PauliSum, groups: List[QwcGroup]) -> bool:
    """True when groups partition the non-identity terms and each is internally QWC."""
    expected = {i for i, term in enumerate(h.terms) if not term.is_identity()}
    seen: List[int] = [i for group in groups for i in group.members]
    if sorted(seen) != sorted(expected) or len(seen) != len(set(seen)):
        return False
    for group in groups:
        for a in group.members:
            for b in group.members:
                if not qwc_commutes(h.terms[a], h.terms[b]):
                    return False
    return True
