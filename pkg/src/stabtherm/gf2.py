"""GF(2) linear algebra on vectors packed into Python ints."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class EchelonBasis:
    """Incrementally reduced basis of a subspace of GF(2)^n.

    Every stored vector has a distinct pivot (its highest set bit) and no other
    stored vector has that bit set, so membership and coordinates are cheap.
    ``combos[i]`` records which inserted vectors XOR to ``vectors[i]``.
    """

    vectors: list[int] = field(default_factory=list)
    combos: list[int] = field(default_factory=list)
    pivots: list[int] = field(default_factory=list)
    _count: int = 0

    @property
    def rank(self) -> int:
        return len(self.vectors)

    def reduce(self, v: int) -> tuple[int, int]:
        """Return ``(residue, combo)`` with ``v = residue ^ XOR of basis combo``."""
        combo = 0
        for vec, c, p in zip(self.vectors, self.combos, self.pivots):
            if (v >> p) & 1:
                v ^= vec
                combo ^= c
        return v, combo

    def add(self, v: int) -> bool:
        """Insert ``v``; returns False if it was already in the span."""
        tag = 1 << self._count
        self._count += 1
        residue, combo = self.reduce(v)
        if residue == 0:
            return False
        combo ^= tag
        p = residue.bit_length() - 1
        for i, vec in enumerate(self.vectors):
            if (vec >> p) & 1:
                self.vectors[i] ^= residue
                self.combos[i] ^= combo
        self.vectors.append(residue)
        self.combos.append(combo)
        self.pivots.append(p)
        return True

    def contains(self, v: int) -> bool:
        return self.reduce(v)[0] == 0

    def solve(self, v: int) -> int | None:
        """Bitmask over inserted vectors whose XOR equals ``v``, or None."""
        residue, combo = self.reduce(v)
        return combo if residue == 0 else None


def span_basis(vectors: list[int]) -> EchelonBasis:
    basis = EchelonBasis()
    for v in vectors:
        basis.add(v)
    return basis


def rank(vectors: list[int]) -> int:
    return span_basis(vectors).rank


def complement_basis(basis: EchelonBasis, nbits: int) -> list[int]:
    """Unit vectors that extend ``basis`` to all of GF(2)^nbits.

    The basis is fully reduced, so the unit vectors at non-pivot positions are
    independent of it and of each other.
    """
    pivots = set(basis.pivots)
    return [1 << j for j in range(nbits) if j not in pivots]


def kernel_basis(vectors: list[int]) -> list[int]:
    """Basis of ``{x : XOR_i x_i vectors[i] = 0}`` as bitmasks over the inputs."""
    basis = EchelonBasis()
    kernel = []
    for i, v in enumerate(vectors):
        residue, combo = basis.reduce(v)
        if residue == 0:
            kernel.append(combo | (1 << i))
        basis.add(v)
    return kernel


def span_elements(generators: list[int]) -> list[int]:
    """All XOR combinations of independent ``generators`` in binary-counter order."""
    out = [0]
    for g in generators:
        out += [e ^ g for e in out]
    return out


def dot(a: int, b: int) -> int:
    return (a & b).bit_count() & 1
