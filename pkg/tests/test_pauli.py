from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import letters_matrix
from stabtherm.pauli import (
    PauliWord,
    commutation_sign,
    compose,
    format_pauli,
    parse_pauli,
    product_phase,
    symplectic_parity,
    weight,
    weight_one_set,
)

P = parse_pauli


def words(n: int):
    return st.integers(0, 4**n - 1).map(lambda lab: PauliWord.from_label(n, lab))


@pytest.mark.parametrize(
    "a, b, expected",
    [("XI", "ZI", 1), ("XI", "IX", 0), ("YI", "ZI", 1)],
)
def test_symplectic_parity_examples(a, b, expected):
    assert symplectic_parity(P(a), P(b)) == expected


@pytest.mark.parametrize(
    "a, b, expected",
    [("XI", "ZI", -1), ("II", "XY", 1), ("YY", "XX", 1)],
)
def test_commutation_sign_examples(a, b, expected):
    assert commutation_sign(P(a), P(b)) == expected


def test_compose_examples():
    assert compose(P("X"), P("Z")) == P("Y")
    w = P("XZY")
    assert (w ^ w).is_identity
    assert compose(P("XXI"), P("IXX")) == P("XIX")


def test_parse_and_format():
    w = P("XIZ")
    assert (w.x, w.z) == (0b001, 0b100)
    assert P("III") == PauliWord.identity(3)
    assert format_pauli(P("ZYX")) == "ZYX"


def test_parse_errors():
    with pytest.raises(ValueError, match="empty"):
        P("")
    with pytest.raises(ValueError, match="position 1"):
        P("XQ")


def test_length_mismatch():
    with pytest.raises(ValueError, match="mismatch"):
        symplectic_parity(P("X"), P("XX"))
    with pytest.raises(ValueError):
        compose(P("X"), P("XX"))


def test_weight_examples():
    assert weight(PauliWord.identity(4)) == 0
    assert weight(PauliWord.single(3, 1, "Y")) == 1
    assert weight(P("XYZI")) == 3


def test_weight_one_set_layout():
    ws = weight_one_set(3)
    assert [format_pauli(w) for w in ws[:3]] == ["XII", "YII", "ZII"]
    assert len(ws) == 9 and len(set(ws)) == 9
    assert all(weight(w) == 1 for w in ws)


@given(words(3), words(3))
def test_parity_matches_matrix_commutation(a, b):
    ma, mb = letters_matrix(format_pauli(a)), letters_matrix(format_pauli(b))
    anti = np.allclose(ma @ mb, -mb @ ma)
    assert symplectic_parity(a, b) == int(anti)


@given(words(4), words(4), words(4))
def test_bilinearity_and_sign_multiplicativity(a, b, c):
    assert symplectic_parity(a ^ b, c) == symplectic_parity(a, c) ^ symplectic_parity(b, c)
    assert commutation_sign(a ^ b, c) == commutation_sign(a, c) * commutation_sign(b, c)
    assert symplectic_parity(a, b) == symplectic_parity(b, a)


@given(words(4))
def test_round_trip_and_involution(w):
    assert P(format_pauli(w)) == w
    assert (w ^ w).is_identity
    assert w ^ PauliWord.identity(4) == w


@given(words(4).filter(lambda w: not w.is_identity))
def test_two_of_three_letters_anticommute_on_each_site(w):
    for site in w.sites():
        singles = [PauliWord.single(4, site, c) for c in "XYZ"]
        assert sum(symplectic_parity(s, w) for s in singles) == 2


@given(st.lists(words(2), min_size=1, max_size=4))
def test_product_phase_against_matrices(ws):
    prod = np.eye(4, dtype=complex)
    acc = PauliWord.identity(2)
    for w in ws:
        prod = prod @ letters_matrix(format_pauli(w))
        acc = acc ^ w
    k = product_phase(ws)
    assert np.allclose(prod, (1j) ** k * letters_matrix(format_pauli(acc)))


def test_word_validation():
    with pytest.raises(ValueError):
        PauliWord(2, x=0b100)
    with pytest.raises(ValueError):
        PauliWord.single(2, 2, "X")
