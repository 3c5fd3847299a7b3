"""
Weighted Pauli-string algebra

Pauli strings are stored in symplectic form as two Python int bitsets
(bit u = qubit u). Products carry their phase in the coefficient and
PauliSum canonicalization merges duplicates while keeping first-seen order.

Author: jsecco ®
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Optional, Tuple

import numpy as np
from scipy import sparse

logger = logging.getLogger(__name__)

MERGE_EPSILON = 1e-12
HERMITIAN_TOLERANCE = 1e-12

_I_POWERS = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)


class PauliError(ValueError):
    """Raised on malformed Pauli strings or mismatched qubit counts."""


def popcount(value: int) -> int:
    return bin(value).count("1")


def parity_array(values: np.ndarray) -> np.ndarray:
    """
    Parity of the set bits of every entry (0 or 1).

    Args:
        values: Non-negative integer array

    Returns:
        Array of the same shape holding popcount(values) mod 2
    """
    v = values.astype(np.int64, copy=True)
    shift = 32
    while shift:
        v ^= v >> shift
        shift //= 2
    return v & 1


@dataclass(frozen=True)
class PauliTerm:
    """
    A single Pauli string with a complex weight.

    Qubit u carries X when only x_mask has bit u, Z when only z_mask has it,
    Y when both do, and I otherwise.
    """

    n_qubits: int
    x_mask: int
    z_mask: int
    coeff: complex = 1.0 + 0.0j

    def __post_init__(self):
        if self.n_qubits < 1:
            raise PauliError(f"n_qubits must be positive, got {self.n_qubits}")
        limit = 1 << self.n_qubits
        if not (0 <= self.x_mask < limit and 0 <= self.z_mask < limit):
            raise PauliError(f"Masks exceed {self.n_qubits} qubits")
        coeff = complex(self.coeff)
        if not (math.isfinite(coeff.real) and math.isfinite(coeff.imag)):
            raise PauliError(f"Non-finite coefficient {coeff}")
        object.__setattr__(self, "coeff", coeff)

    @classmethod
    def from_label(cls, label: str, coeff: complex = 1.0) -> "PauliTerm":
        """
        Build a term from a letter string with qubit 0 leftmost.

        Args:
            label: String over {I, X, Y, Z}
            coeff: Weight of the term

        Returns:
            PauliTerm
        """
        x_mask = 0
        z_mask = 0
        for u, letter in enumerate(label.upper()):
            if letter in ("X", "Y"):
                x_mask |= 1 << u
            if letter in ("Z", "Y"):
                z_mask |= 1 << u
            if letter not in "IXYZ":
                raise PauliError(f"Unknown Pauli letter '{letter}' in '{label}'")
        return cls(len(label), x_mask, z_mask, coeff)

    @classmethod
    def from_letters(cls, n_qubits: int, letters: Dict[int, str], coeff: complex = 1.0) -> "PauliTerm":
        """Build a term from a sparse {qubit: letter} map."""
        chars = ["I"] * n_qubits
        for qubit, letter in letters.items():
            if not 0 <= qubit < n_qubits:
                raise PauliError(f"Qubit {qubit} out of range for {n_qubits} qubits")
            chars[qubit] = letter
        return cls.from_label("".join(chars), coeff)

    @classmethod
    def identity(cls, n_qubits: int, coeff: complex = 1.0) -> "PauliTerm":
        return cls(n_qubits, 0, 0, coeff)

    @property
    def key(self) -> Tuple[int, int]:
        return (self.x_mask, self.z_mask)

    @property
    def support(self) -> int:
        return self.x_mask | self.z_mask

    @property
    def y_count(self) -> int:
        return popcount(self.x_mask & self.z_mask)

    def is_identity(self) -> bool:
        return self.support == 0

    def letter(self, qubit: int) -> str:
        x = (self.x_mask >> qubit) & 1
        z = (self.z_mask >> qubit) & 1
        return "IZXY"[2 * x + z]

    def label(self) -> str:
        return "".join(self.letter(u) for u in range(self.n_qubits))

    def support_qubits(self) -> List[int]:
        return [u for u in range(self.n_qubits) if (self.support >> u) & 1]

    def with_coeff(self, coeff: complex) -> "PauliTerm":
        return PauliTerm(self.n_qubits, self.x_mask, self.z_mask, coeff)

    def adjoint(self) -> "PauliTerm":
        return self.with_coeff(self.coeff.conjugate())

    def __mul__(self, other):
        if isinstance(other, PauliTerm):
            return mul(self, other)
        return self.with_coeff(self.coeff * complex(other))

    __rmul__ = __mul__

    def to_sparse(self) -> sparse.csr_matrix:
        """Sparse matrix in the little-endian basis (qubit u is bit u of the index)."""
        dim = 1 << self.n_qubits
        columns = np.arange(dim, dtype=np.int64)
        rows = columns ^ self.x_mask
        signs = 1 - 2 * parity_array(columns & self.z_mask)
        values = self.coeff * _I_POWERS[self.y_count % 4] * signs
        return sparse.csr_matrix((values, (rows, columns)), shape=(dim, dim))

    def to_matrix(self) -> np.ndarray:
        return self.to_sparse().toarray()

    def __str__(self) -> str:
        return f"({format_coeff(self.coeff)}) * {self.label()}"


def format_coeff(coeff: complex) -> str:
    if abs(coeff.imag) <= HERMITIAN_TOLERANCE:
        return f"{coeff.real:.6g}"
    if abs(coeff.real) <= HERMITIAN_TOLERANCE:
        return f"{coeff.imag:.6g}j"
    return f"{coeff.real:.6g}{coeff.imag:+.6g}j"


def _check_same_size(a: PauliTerm, b: PauliTerm) -> None:
    if a.n_qubits != b.n_qubits:
        raise PauliError(f"Qubit count mismatch: {a.n_qubits} vs {b.n_qubits}")


def mul(a: PauliTerm, b: PauliTerm) -> PauliTerm:
    """
    Operator product a·b, phase folded into the coefficient.

    Uses P = i^{#Y} X^x Z^z, so that
    (X^x1 Z^z1)(X^x2 Z^z2) = (-1)^{|z1 & x2|} X^{x1^x2} Z^{z1^z2}.

    Args:
        a: Left factor
        b: Right factor

    Returns:
        PauliTerm equal to a·b

    Raises:
        PauliError: If the qubit counts differ
    """
    _check_same_size(a, b)
    x_mask = a.x_mask ^ b.x_mask
    z_mask = a.z_mask ^ b.z_mask
    exponent = (
        a.y_count
        + b.y_count
        + 2 * popcount(a.z_mask & b.x_mask)
        - popcount(x_mask & z_mask)
    ) % 4
    return PauliTerm(a.n_qubits, x_mask, z_mask, a.coeff * b.coeff * _I_POWERS[exponent])


def commutes(a: PauliTerm, b: PauliTerm) -> bool:
    """Global commutation: symplectic product is even."""
    _check_same_size(a, b)
    return (popcount(a.x_mask & b.z_mask) + popcount(a.z_mask & b.x_mask)) % 2 == 0


def qwc_commutes(a: PauliTerm, b: PauliTerm) -> bool:
    """
    Qubit-wise commutation test.

    Args:
        a: First term
        b: Second term

    Returns:
        True if on every qubit the letters are equal or one of them is I

    Raises:
        PauliError: If the qubit counts differ
    """
    _check_same_size(a, b)
    overlap = a.support & b.support
    differ = (a.x_mask ^ b.x_mask) | (a.z_mask ^ b.z_mask)
    return (overlap & differ) == 0


@dataclass
class PauliSum:
    """
    Sum of weighted Pauli strings over a fixed number of qubits.

    Construction through `canonicalize` guarantees unique strings;
    `hermitian` marks sums whose coefficients were checked real.
    """

    n_qubits: int
    terms: List[PauliTerm] = field(default_factory=list)
    hermitian: bool = False

    def __post_init__(self):
        if self.n_qubits < 1:
            raise PauliError(f"n_qubits must be positive, got {self.n_qubits}")
        for term in self.terms:
            if term.n_qubits != self.n_qubits:
                raise PauliError(
                    f"Term on {term.n_qubits} qubits added to a {self.n_qubits}-qubit sum"
                )

    @classmethod
    def from_terms(cls, n_qubits: int, terms: Iterable[PauliTerm]) -> "PauliSum":
        return cls(n_qubits, list(terms)).canonicalize()

    @classmethod
    def from_labels(cls, pairs: Iterable[Tuple[str, complex]]) -> "PauliSum":
        terms = [PauliTerm.from_label(label, coeff) for label, coeff in pairs]
        if not terms:
            raise PauliError("At least one labelled term is required")
        return cls.from_terms(terms[0].n_qubits, terms)

    @classmethod
    def zero(cls, n_qubits: int) -> "PauliSum":
        return cls(n_qubits, [])

    def __iter__(self) -> Iterator[PauliTerm]:
        return iter(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def canonicalize(self, epsilon: float = MERGE_EPSILON) -> "PauliSum":
        """
        Merge equal strings and drop near-zero weights.

        Terms keep the position of their first occurrence.

        Args:
            epsilon: Weights with modulus below this are removed

        Returns:
            New canonical PauliSum
        """
        merged: Dict[Tuple[int, int], complex] = {}
        for term in self.terms:
            merged[term.key] = merged.get(term.key, 0.0j) + term.coeff
        terms = [
            PauliTerm(self.n_qubits, x_mask, z_mask, coeff)
            for (x_mask, z_mask), coeff in merged.items()
            if abs(coeff) >= epsilon
        ]
        return PauliSum(self.n_qubits, terms, self.hermitian)

    def is_hermitian(self, tolerance: float = HERMITIAN_TOLERANCE) -> bool:
        return all(abs(term.coeff.imag) <= tolerance for term in self.canonicalize().terms)

    def as_hermitian(self, tolerance: float = HERMITIAN_TOLERANCE) -> "PauliSum":
        """
        Canonical copy with real coefficients, flagged Hermitian.

        Raises:
            PauliError: If an imaginary residue exceeds the tolerance
        """
        canonical = self.canonicalize()
        terms = []
        for term in canonical.terms:
            if abs(term.coeff.imag) > tolerance:
                raise PauliError(
                    f"Term {term.label()} has imaginary weight {term.coeff.imag:.3e}"
                )
            terms.append(term.with_coeff(term.coeff.real))
        return PauliSum(self.n_qubits, terms, hermitian=True)

    def scaled(self, factor: complex) -> "PauliSum":
        return PauliSum(self.n_qubits, [t * factor for t in self.terms]).canonicalize()

    def adjoint(self) -> "PauliSum":
        return PauliSum(self.n_qubits, [t.adjoint() for t in self.terms], self.hermitian)

    def __add__(self, other: "PauliSum") -> "PauliSum":
        if other.n_qubits != self.n_qubits:
            raise PauliError(f"Qubit count mismatch: {self.n_qubits} vs {other.n_qubits}")
        return PauliSum(self.n_qubits, self.terms + other.terms).canonicalize()

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        return self + other.scaled(-1.0)

    def __mul__(self, other):
        if isinstance(other, PauliSum):
            if other.n_qubits != self.n_qubits:
                raise PauliError(f"Qubit count mismatch: {self.n_qubits} vs {other.n_qubits}")
            products = [mul(a, b) for a in self.terms for b in other.terms]
            return PauliSum(self.n_qubits, products).canonicalize()
        return self.scaled(other)

    __rmul__ = __mul__

    def identity_coeff(self) -> complex:
        for term in self.terms:
            if term.is_identity():
                return term.coeff
        return 0.0j

    def non_identity_terms(self) -> List[PauliTerm]:
        return [t for t in self.terms if not t.is_identity()]

    def find(self, label: str) -> Optional[PauliTerm]:
        target = PauliTerm.from_label(label)
        for term in self.terms:
            if term.key == target.key:
                return term
        return None

    def to_sparse(self) -> sparse.csr_matrix:
        dim = 1 << self.n_qubits
        total = sparse.csr_matrix((dim, dim), dtype=complex)
        for term in self.terms:
            total = total + term.to_sparse()
        return total

    def to_matrix(self) -> np.ndarray:
        return self.to_sparse().toarray()

    def to_text(self) -> str:
        return "\n".join(str(term) for term in self.terms)

    def __str__(self) -> str:
        return self.to_text() or f"0 on {self.n_qubits} qubits"
