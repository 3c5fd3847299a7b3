"""
Fermionic operators and the Jordan-Wigner mapping

Mode k maps to qubit k. Creation is (X - iY)/2 behind a Z chain on every
lower mode, annihilation is (X + iY)/2 behind the same chain. The paired
double excitation also has a closed form with exactly eight strings.

Author: jsecco ®
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, List, Sequence, Tuple

from .pauli import PauliSum, PauliTerm

logger = logging.getLogger(__name__)


class FermionError(ValueError):
    """Raised on out-of-range or repeated fermionic modes."""


class LadderKind(Enum):
    CREATE = "create"
    ANNIHILATE = "annihilate"


@dataclass(frozen=True)
class FermionTerm:
    """
    Ordered product of ladder operators with a weight (MeV inside a Hamiltonian).

    ladder_ops is read left to right: ((2, CREATE), (0, ANNIHILATE)) is a†₂ a₀.
    """

    ladder_ops: Tuple[Tuple[int, LadderKind], ...]
    coeff: complex = 1.0

    def adjoint(self) -> "FermionTerm":
        flipped = tuple(
            (mode, LadderKind.ANNIHILATE if kind is LadderKind.CREATE else LadderKind.CREATE)
            for mode, kind in reversed(self.ladder_ops)
        )
        return FermionTerm(flipped, complex(self.coeff).conjugate())

    def scaled(self, factor: complex) -> "FermionTerm":
        return FermionTerm(self.ladder_ops, self.coeff * factor)

    def __str__(self) -> str:
        ops = " ".join(
            f"a{'+' if kind is LadderKind.CREATE else ''}{mode}" for mode, kind in self.ladder_ops
        )
        return f"({complex(self.coeff):.6g}) {ops}"


@dataclass
class FermionOperator:
    """Sum of FermionTerm."""

    terms: List[FermionTerm] = field(default_factory=list)

    def add(self, term: FermionTerm) -> None:
        self.terms.append(term)

    def adjoint(self) -> "FermionOperator":
        return FermionOperator([t.adjoint() for t in self.terms])

    def __add__(self, other: "FermionOperator") -> "FermionOperator":
        return FermionOperator(self.terms + other.terms)

    def __len__(self) -> int:
        return len(self.terms)


def creation(mode: int) -> Tuple[int, LadderKind]:
    return (mode, LadderKind.CREATE)


def annihilation(mode: int) -> Tuple[int, LadderKind]:
    return (mode, LadderKind.ANNIHILATE)


def jw_ladder(mode: int, kind: LadderKind, n_qubits: int) -> PauliSum:
    """
    Jordan-Wigner image of a single ladder operator.

    Args:
        mode: Fermionic mode index
        kind: CREATE or ANNIHILATE
        n_qubits: Number of qubits (= modes)

    Returns:
        Two-term PauliSum ½ Z_{<mode} (X ∓ iY)

    Raises:
        FermionError: If mode is out of range
    """
    if not 0 <= mode < n_qubits:
        raise FermionError(f"Mode {mode} out of range for {n_qubits} qubits")
    chain = (1 << mode) - 1
    bit = 1 << mode
    y_sign = -1.0 if kind is LadderKind.CREATE else 1.0
    x_part = PauliTerm(n_qubits, bit, chain, 0.5)
    y_part = PauliTerm(n_qubits, bit, chain | bit, 0.5j * y_sign)
    return PauliSum(n_qubits, [x_part, y_part])


def jw_map(op: FermionOperator, n_qubits: int) -> PauliSum:
    """
    Map a fermionic operator to qubits term by term.

    Args:
        op: Sum of ladder products
        n_qubits: Number of qubits

    Returns:
        Canonical PauliSum
    """
    total = PauliSum.zero(n_qubits)
    for term in op.terms:
        product = PauliSum(n_qubits, [PauliTerm.identity(n_qubits, term.coeff)])
        for mode, kind in term.ladder_ops:
            product = product * jw_ladder(mode, kind, n_qubits)
        total = PauliSum(n_qubits, total.terms + product.terms)
    return total.canonicalize()


# Letters on (j, j̄, i, ī) and the sign of each string in the anti-Hermitian generator.
PAIR_EXCITATION_STRINGS: Sequence[Tuple[str, int]] = (
    ("XXXY", +1),
    ("XXYX", +1),
    ("YXYY", +1),
    ("XYYY", +1),
    ("XYXX", -1),
    ("YXXX", -1),
    ("YYXY", -1),
    ("YYYX", -1),
)


def _open_interval(a: int, b: int) -> int:
    low, high = min(a, b), max(a, b)
    return ((1 << high) - 1) & ~((1 << (low + 1)) - 1)


def _check_modes(modes: Iterable[int], n_qubits: int) -> None:
    modes = list(modes)
    if len(set(modes)) != len(modes):
        raise FermionError(f"Pair excitation needs four distinct modes, got {modes}")
    for mode in modes:
        if not 0 <= mode < n_qubits:
            raise FermionError(f"Mode {mode} out of range for {n_qubits} qubits")


def pair_excitation_operator(i: int, i_bar: int, j: int, j_bar: int) -> FermionOperator:
    """τ = a†_j a†_j̄ a_ī a_i − h.c. as a fermionic operator."""
    forward = FermionTerm((creation(j), creation(j_bar), annihilation(i_bar), annihilation(i)), 1.0)
    return FermionOperator([forward, forward.adjoint().scaled(-1.0)])


def map_pair_excitation(i: int, i_bar: int, j: int, j_bar: int, theta: float, n_qubits: int) -> PauliSum:
    """
    Closed-form Jordan-Wigner image of θ·(T − T†), T = a†_j a†_j̄ a_ī a_i.

    T reduces to s·Z_chain·σ⁺_j σ⁺_j̄ σ⁻_i σ⁻_ī where s picks up a minus
    for each conjugate pair stored in descending order and the chain covers
    the modes strictly inside exactly one of the two pair intervals.
    Expanding σ± = (X ∓ iY)/2 leaves the eight odd-Y strings.

    Args:
        i: Occupied mode
        i_bar: Its time-conjugate partner
        j: Vacant mode
        j_bar: Its time-conjugate partner
        theta: Amplitude multiplying the generator (radians)
        n_qubits: Number of qubits

    Returns:
        PauliSum of exactly eight strings, purely imaginary weights ±iθ/8

    Raises:
        FermionError: If modes repeat or fall out of range
    """
    _check_modes((i, i_bar, j, j_bar), n_qubits)
    sign = (-1 if i_bar < i else 1) * (-1 if j_bar < j else 1)
    chain = _open_interval(i, i_bar) ^ _open_interval(j, j_bar)
    chain &= ~((1 << i) | (1 << i_bar) | (1 << j) | (1 << j_bar))

    terms = []
    for letters, string_sign in PAIR_EXCITATION_STRINGS:
        x_mask = (1 << j) | (1 << j_bar) | (1 << i) | (1 << i_bar)
        z_mask = chain
        for mode, letter in zip((j, j_bar, i, i_bar), letters):
            if letter == "Y":
                z_mask |= 1 << mode
        terms.append(PauliTerm(n_qubits, x_mask, z_mask, 1j * sign * string_sign * theta / 8.0))
    return PauliSum(n_qubits, terms)


def map_pair_excitation_generic(i: int, i_bar: int, j: int, j_bar: int, theta: float, n_qubits: int) -> PauliSum:
    """Same operator as map_pair_excitation, built from ladder products."""
    _check_modes((i, i_bar, j, j_bar), n_qubits)
    return jw_map(pair_excitation_operator(i, i_bar, j, j_bar), n_qubits).scaled(theta)


def number_operator(mode: int, coeff: complex = 1.0) -> FermionOperator:
    return FermionOperator([FermionTerm((creation(mode), annihilation(mode)), coeff)])
