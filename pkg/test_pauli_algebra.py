#!/usr/bin/env python3
"""
Test script for the Pauli-string algebra and QWC grouping
"""

import itertools
import logging
import sys
from pathlib import Path

import numpy as np
import pytest

# Add src to path
sys.path.insert(0, str(Path(__file__).parent / 'src'))

from algebra.grouping import group_qwc, validate_groups
from algebra.pauli import PauliError, PauliSum, PauliTerm, commutes, mul, qwc_commutes
from physics.hamiltonian import build_hamiltonian
from physics.levels import he6_scheme

logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)

LETTERS = "IXYZ"


def dense(label: str) -> np.ndarray:
    """Kronecker product with qubit 0 as the least significant index bit."""
    single = {
        "I": np.eye(2),
        "X": np.array([[0, 1], [1, 0]]),
        "Y": np.array([[0, -1j], [1j, 0]]),
        "Z": np.array([[1, 0], [0, -1]]),
    }
    matrix = np.array([[1.0 + 0j]])
    for letter in label:
        matrix = np.kron(single[letter], matrix)
    return matrix


def test_label_round_trip_and_letters():
    term = PauliTerm.from_label("XYZI", 0.5)
    assert term.label() == "XYZI"
    assert term.x_mask == 0b0011
    assert term.z_mask == 0b0110
    assert term.y_count == 1
    assert term.support_qubits() == [0, 1, 2]
    assert str(term) == "(0.5) * XYZI"


def test_bad_letter_rejected():
    with pytest.raises(PauliError):
        PauliTerm.from_label("XQ")


def test_single_qubit_products():
    x, y, z = (PauliTerm.from_label(c) for c in "XYZ")
    assert mul(x, y).label() == "Z" and mul(x, y).coeff == 1j
    assert mul(y, x).coeff == -1j
    assert mul(y, z).label() == "X" and mul(y, z).coeff == 1j
    assert mul(z, x).label() == "Y" and mul(z, x).coeff == 1j
    assert mul(x, x).is_identity() and mul(x, x).coeff == 1.0


@pytest.mark.parametrize("a,b", list(itertools.product(["XY", "YZ", "ZZ", "IY", "XX", "YY"], repeat=2)))
def test_product_matches_dense(a, b):
    product = mul(PauliTerm.from_label(a), PauliTerm.from_label(b))
    assert np.allclose(product.to_matrix(), dense(a) @ dense(b), atol=1e-12)


def test_to_matrix_matches_kron():
    for letters in itertools.product(LETTERS, repeat=3):
        label = "".join(letters)
        assert np.allclose(PauliTerm.from_label(label).to_matrix(), dense(label))


def test_commutation_rules():
    assert not commutes(PauliTerm.from_label("XI"), PauliTerm.from_label("ZI"))
    assert commutes(PauliTerm.from_label("XX"), PauliTerm.from_label("ZZ"))
    assert not qwc_commutes(PauliTerm.from_label("XX"), PauliTerm.from_label("ZZ"))
    assert qwc_commutes(PauliTerm.from_label("XI"), PauliTerm.from_label("XZ"))
    assert qwc_commutes(PauliTerm.from_label("IIII"), PauliTerm.from_label("XYZX"))


def test_canonicalize_merges_and_keeps_order():
    h = PauliSum.from_labels([("ZI", 1.0), ("XX", 0.5), ("ZI", 2.0), ("YY", 1e-15)])
    assert [t.label() for t in h] == ["ZI", "XX"]
    assert h.find("ZI").coeff == 3.0


def test_cancellation_to_zero():
    h = PauliSum.from_labels([("XY", 1.0)]) - PauliSum.from_labels([("XY", 1.0)])
    assert len(h) == 0


def test_sum_product_matches_dense():
    a = PauliSum.from_labels([("XZ", 0.3), ("YI", -1.2)])
    b = PauliSum.from_labels([("ZZ", 2.0), ("XY", 0.5j)])
    assert np.allclose((a * b).to_matrix(), a.to_matrix() @ b.to_matrix())


def test_hermiticity_checks():
    h = PauliSum.from_labels([("XX", 1.0), ("ZI", -0.5)])
    assert h.is_hermitian()
    assert h.as_hermitian().hermitian
    with pytest.raises(PauliError):
        PauliSum.from_labels([("XY", 1j)]).as_hermitian()


def test_qubit_count_mismatch():
    with pytest.raises(PauliError):
        mul(PauliTerm.from_label("X"), PauliTerm.from_label("XX"))


def test_text_dump():
    h = PauliSum.from_labels([("ZI", 1.5), ("XX", -0.25)])
    assert h.to_text() == "(1.5) * ZI\n(-0.25) * XX"


def test_grouping_small_example():
    h = PauliSum.from_labels([("ZZ", 1.0), ("ZI", 0.5), ("XX", 0.4), ("IX", 0.1), ("II", 3.0)])
    groups = group_qwc(h)
    assert validate_groups(h, groups)
    assert len(groups) == 2
    assert groups[0].basis_label() == "ZZ"
    assert groups[1].basis_label() == "XX"


def test_he6_grouping_partitions_terms():
    h = build_hamiltonian(he6_scheme()).qubit
    groups = group_qwc(h)
    print(f"📊 {len(h)} terms in {len(groups)} QWC groups")
    assert validate_groups(h, groups)
    assert len(groups) < len(h.non_identity_terms())


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
