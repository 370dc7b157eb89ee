"""Phase-free Pauli words over Z_2^{2N}.

A word is stored as two packed integers ``x`` and ``z``; bit ``i`` of each
refers to site ``i`` (position ``i`` of the letter string).  Products drop the
phase, so only commutation signs are ever produced.

For bulk work every word also has an integer *label* ``x | (z << n)``, which is
what the exhaustive routines iterate over.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

_LETTER_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_BITS_LETTER = {bits: letter for letter, bits in _LETTER_BITS.items()}


@dataclass(frozen=True, order=True)
class PauliWord:
    """A point ``(x|z)`` of Z_2^{2N}, i.e. an N-qubit Pauli modulo phase."""

    n: int
    x: int = 0
    z: int = 0

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("a Pauli word needs at least one site")
        full = (1 << self.n) - 1
        if self.x & ~full or self.z & ~full:
            raise ValueError(f"bits set beyond site {self.n - 1}")

    @classmethod
    def identity(cls, n: int) -> PauliWord:
        return cls(n)

    @classmethod
    def single(cls, n: int, site: int, letter: str) -> PauliWord:
        """The weight-one word with ``letter`` on ``site``."""
        if not 0 <= site < n:
            raise ValueError(f"site {site} out of range for n={n}")
        bx, bz = _LETTER_BITS[letter]
        return cls(n, bx << site, bz << site)

    @classmethod
    def from_label(cls, n: int, label: int) -> PauliWord:
        full = (1 << n) - 1
        return cls(n, int(label) & full, (int(label) >> n) & full)

    @property
    def label(self) -> int:
        return self.x | (self.z << self.n)

    @property
    def support(self) -> int:
        """Bitmask of sites where the word acts non-trivially."""
        return self.x | self.z

    @property
    def is_identity(self) -> bool:
        return not (self.x or self.z)

    def letter(self, site: int) -> str:
        return _BITS_LETTER[((self.x >> site) & 1, (self.z >> site) & 1)]

    def sites(self) -> list[int]:
        s = self.support
        return [i for i in range(self.n) if (s >> i) & 1]

    def _check(self, other: PauliWord) -> None:
        if self.n != other.n:
            raise ValueError(f"length mismatch: {self.n} vs {other.n}")

    def __xor__(self, other: PauliWord) -> PauliWord:
        return compose(self, other)

    def __str__(self) -> str:
        return format_pauli(self)

    def __repr__(self) -> str:
        return f"PauliWord({format_pauli(self)!r})"


def parse_pauli(text: str) -> PauliWord:
    """Parse a letter string over ``IXYZ``; site ``i`` is character ``i``."""
    if not text:
        raise ValueError("empty Pauli string")
    x = z = 0
    for i, ch in enumerate(text.upper()):
        try:
            bx, bz = _LETTER_BITS[ch]
        except KeyError:
            raise ValueError(f"invalid Pauli letter {ch!r} at position {i} in {text!r}") from None
        x |= bx << i
        z |= bz << i
    return PauliWord(len(text), x, z)


def format_pauli(w: PauliWord) -> str:
    return "".join(w.letter(i) for i in range(w.n))


def symplectic_parity(a: PauliWord, b: PauliWord) -> int:
    """``<a^x, b^z> + <a^z, b^x>`` mod 2; 1 iff the words anticommute."""
    a._check(b)
    return ((a.x & b.z).bit_count() + (a.z & b.x).bit_count()) & 1


def commutation_sign(a: PauliWord, b: PauliWord) -> int:
    return -1 if symplectic_parity(a, b) else 1


def compose(a: PauliWord, b: PauliWord) -> PauliWord:
    a._check(b)
    return PauliWord(a.n, a.x ^ b.x, a.z ^ b.z)


def weight(w: PauliWord) -> int:
    return w.support.bit_count()


def weight_one_set(n: int) -> list[PauliWord]:
    """``X_i, Y_i, Z_i`` for every site, in site order."""
    return [PauliWord.single(n, i, c) for i in range(n) for c in "XYZ"]


def all_words(n: int) -> Iterator[PauliWord]:
    for label in range(4**n):
        yield PauliWord.from_label(n, label)


def check_mask(g: PauliWord) -> int:
    """Label mask ``m`` with ``parity(m & label(w)) == symplectic_parity(g, w)``."""
    return g.z | (g.x << g.n)


def label_parity(labels: np.ndarray, mask: int) -> np.ndarray:
    """Vectorised ``popcount(labels & mask) mod 2`` over an int64 array."""
    return (np.bitwise_count(np.asarray(labels, dtype=np.int64) & np.int64(mask)) & 1).astype(np.int64)


def product_phase(words: list[PauliWord]) -> int:
    """Exponent ``k`` (mod 4) with ``sigma(w1)...sigma(wm) = i^k sigma(w1 ^ ... ^ wm)``.

    ``sigma`` is the Hermitian representative ``i^{<x,z>} X^x Z^z`` (so the
    letter ``Y`` is the usual Pauli Y).  Used only to validate generator sets.
    """
    if not words:
        raise ValueError("empty product")
    acc = words[0]
    k = 0
    for w in words[1:]:
        acc._check(w)
        out_x, out_z = acc.x ^ w.x, acc.z ^ w.z
        # X^a Z^b X^c Z^d = (-1)^{<b,c>} X^{a^c} Z^{b^d}
        k += (
            (acc.x & acc.z).bit_count()
            + (w.x & w.z).bit_count()
            + 2 * (acc.z & w.x).bit_count()
            - (out_x & out_z).bit_count()
        )
        acc = PauliWord(acc.n, out_x, out_z)
    return k % 4
