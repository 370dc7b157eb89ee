"""Commuting Pauli Hamiltonians H = -sum_k J_k g_k and their syndrome spectrum."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import gf2
from .pauli import (
    PauliWord,
    check_mask,
    format_pauli,
    label_parity,
    parse_pauli,
    product_phase,
    symplectic_parity,
    weight_one_set,
)


class ModelError(ValueError):
    """Invalid model input (bad letters, anticommuting generators, ...)."""


class SizeLimitError(RuntimeError):
    """An exhaustive computation was requested beyond its configured limit."""


def check_limit(what: str, size: int, limit: int, unit: str = "N") -> None:
    if size > limit:
        raise SizeLimitError(f"{what}: {unit}={size} exceeds the limit {limit} (raise it explicitly to override)")


def to_fraction(value: object) -> Fraction:
    """Exact rational from an int, Fraction, decimal string or float (via its repr)."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ModelError(f"not a coupling: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    try:
        return Fraction(str(value).strip())
    except (ValueError, ZeroDivisionError):
        raise ModelError(f"coupling {value!r} is not a rational number") from None


@dataclass(frozen=True)
class GeneratorSet:
    generators: tuple[PauliWord, ...]
    couplings: tuple[Fraction, ...]

    @property
    def n(self) -> int:
        return self.generators[0].n if self.generators else 0

    def __len__(self) -> int:
        return len(self.generators)

    def strings(self) -> list[str]:
        return [format_pauli(g) for g in self.generators]


@dataclass(frozen=True)
class SyndromeSpace:
    """Valid syndromes: the image of the parity check, as sorted ints (bit k = generator k)."""

    rank: int
    basis: tuple[int, ...]
    valid: np.ndarray
    multiplicity_log2: int

    @property
    def size(self) -> int:
        return len(self.valid)

    @property
    def multiplicity(self) -> int:
        return 1 << self.multiplicity_log2


@dataclass(frozen=True)
class GibbsTable:
    beta: float
    syndromes: np.ndarray
    energies: np.ndarray
    weights: np.ndarray
    log_partition: float
    multiplicity: int

    @property
    def partition(self) -> float:
        return math.exp(self.log_partition) if self.log_partition < 700 else math.inf

    def total_mass(self) -> float:
        return float(self.weights.sum() * self.multiplicity)


class StabilizerModel:
    """A validated commuting generator set with its parity check and syndrome space."""

    def __init__(
        self,
        generators: Sequence[PauliWord | str],
        couplings: Sequence[object],
        name: str | None = None,
        lattice: tuple[int, int] | None = None,
    ) -> None:
        if not generators:
            raise ModelError("empty generator list")
        words = []
        for k, g in enumerate(generators):
            if isinstance(g, str):
                try:
                    g = parse_pauli(g)
                except ValueError as exc:
                    raise ModelError(f"generator {k}: {exc}") from None
            words.append(g)
        n = words[0].n
        for k, g in enumerate(words):
            if g.n != n:
                raise ModelError(f"generator {k} has length {g.n}, expected {n}")
            if g.is_identity:
                raise ModelError(f"generator {k} is the identity word")
        if len(couplings) != len(words):
            raise ModelError(f"{len(words)} generators but {len(couplings)} couplings")
        for i in range(len(words)):
            for j in range(i + 1, len(words)):
                if symplectic_parity(words[i], words[j]):
                    raise ModelError(
                        f"generators {i} ({format_pauli(words[i])}) and {j} ({format_pauli(words[j])}) anticommute"
                    )
        labels = [g.label for g in words]
        for dep in gf2.kernel_basis(labels):
            members = [words[k] for k in range(len(words)) if (dep >> k) & 1]
            if product_phase(members) == 2:
                idx = [k for k in range(len(words)) if (dep >> k) & 1]
                raise ModelError(f"generators {idx} multiply to -I, so the all-zero syndrome is empty")

        self.gens = GeneratorSet(tuple(words), tuple(to_fraction(c) for c in couplings))
        self.name = name
        self.lattice = lattice
        self.n = n
        self.m = len(words)
        self.masks = tuple(check_mask(g) for g in words)
        self.stabilizer_basis = gf2.span_basis(labels)

        unit_syndromes = [self._syndrome_of_label(1 << j) for j in range(2 * n)]
        sbasis = gf2.span_basis(unit_syndromes)
        valid = np.array(sorted(gf2.span_elements(sbasis.vectors)), dtype=np.int64)
        r = sbasis.rank
        self.syndrome_space = SyndromeSpace(r, tuple(sbasis.vectors), valid, n - r)
        self._index = {int(a): i for i, a in enumerate(valid)}
        self.energies_exact = [self._energy(int(a)) for a in valid]
        self.weight_one = weight_one_set(n)
        self.weight_one_syndromes = [self.syndrome(w) for w in self.weight_one]

    # -- structure ---------------------------------------------------------
    @property
    def couplings(self) -> tuple[Fraction, ...]:
        return self.gens.couplings

    @property
    def generators(self) -> tuple[PauliWord, ...]:
        return self.gens.generators

    @property
    def rank(self) -> int:
        return self.syndrome_space.rank

    @property
    def valid_syndromes(self) -> np.ndarray:
        return self.syndrome_space.valid

    def parity_check(self) -> np.ndarray:
        """E as an M x 2N 0/1 matrix acting on label bits (x part, then z part)."""
        cols = 2 * self.n
        return np.array([[(mask >> j) & 1 for j in range(cols)] for mask in self.masks], dtype=np.uint8)

    def generator_matrix(self) -> np.ndarray:
        """G as a 2N x M 0/1 matrix; column k is the label of generator k."""
        cols = 2 * self.n
        return np.array([[(g.label >> j) & 1 for g in self.generators] for j in range(cols)], dtype=np.uint8)

    def check_eg_zero(self) -> bool:
        return not np.any((self.parity_check().astype(np.int64) @ self.generator_matrix()) % 2)

    def index(self, a: int) -> int:
        try:
            return self._index[int(a)]
        except KeyError:
            raise ModelError(f"syndrome {a:#b} is not in the image of the parity check") from None

    def is_valid(self, a: int) -> bool:
        return int(a) in self._index

    # -- syndromes and energies -------------------------------------------
    def _syndrome_of_label(self, label: int) -> int:
        s = 0
        for k, mask in enumerate(self.masks):
            s |= ((mask & label).bit_count() & 1) << k
        return s

    def syndrome(self, w: PauliWord) -> int:
        if w.n != self.n:
            raise ValueError(f"length mismatch: word has {w.n} sites, model has {self.n}")
        return self._syndrome_of_label(w.label)

    def syndromes_of_labels(self, labels: np.ndarray) -> np.ndarray:
        labels = np.asarray(labels, dtype=np.int64)
        out = np.zeros(labels.shape, dtype=np.int64)
        for k, mask in enumerate(self.masks):
            out |= label_parity(labels, mask) << k
        return out

    def _energy(self, a: int) -> Fraction:
        return -sum(((-j if (a >> k) & 1 else j) for k, j in enumerate(self.couplings)), Fraction(0))

    def energy(self, a: int) -> Fraction:
        self.index(a)
        return self._energy(int(a))

    def bohr_frequency(self, alpha: PauliWord, a: int) -> Fraction:
        """omega = eps_a - eps_{a ^ e(alpha)}, exact."""
        self.index(a)
        e = self.syndrome(alpha)
        return -2 * sum(((-j if (a >> k) & 1 else j) for k, j in enumerate(self.couplings) if (e >> k) & 1), Fraction(0))

    def max_bohr(self) -> Fraction:
        best = Fraction(0)
        for e in self.weight_one_syndromes:
            val = 2 * sum(abs(j) for k, j in enumerate(self.couplings) if (e >> k) & 1)
            best = max(best, val)
        return best

    def max_energy(self) -> Fraction:
        return max(self.energies_exact)

    def min_energy(self) -> Fraction:
        return min(self.energies_exact)

    def gibbs(self, beta: float) -> GibbsTable:
        if beta < 0 or not math.isfinite(beta):
            raise ValueError(f"beta must be finite and non-negative, got {beta}")
        eps = np.array([float(e) for e in self.energies_exact])
        e0 = float(self.min_energy())
        boltz = np.exp(-beta * (eps - e0))
        mult = self.syndrome_space.multiplicity
        zs = mult * boltz.sum()
        return GibbsTable(
            beta=float(beta),
            syndromes=self.valid_syndromes,
            energies=eps,
            weights=boltz / zs,
            log_partition=math.log(zs) - beta * e0,
            multiplicity=mult,
        )

    # -- misc --------------------------------------------------------------
    def scaled(self, factor: object) -> StabilizerModel:
        c = to_fraction(factor)
        return StabilizerModel(self.generators, [c * j for j in self.couplings], self.name, self.lattice)

    def in_stabilizer_group(self, w: PauliWord) -> bool:
        return self.stabilizer_basis.contains(w.label)

    def describe(self) -> str:
        return self.name or f"model(n={self.n}, m={self.m})"

    def __repr__(self) -> str:
        return f"StabilizerModel({self.gens.strings()}, {[str(j) for j in self.couplings]})"


def build_model(generators: Iterable[str], couplings: Iterable[object], name: str | None = None) -> StabilizerModel:
    return StabilizerModel(list(generators), list(couplings), name=name)


def _word(n: int, letters: dict[int, str]) -> PauliWord:
    chars = ["I"] * n
    for site, c in letters.items():
        chars[site % n] = c
    return parse_pauli("".join(chars))


def ising_chain(n: int, j: object = 1, periodic: bool = False) -> StabilizerModel:
    if n < 2:
        raise ModelError("ising chain needs N >= 2")
    bonds = n if periodic and n > 2 else n - 1
    gens = [_word(n, {i: "Z", i + 1: "Z"}) for i in range(bonds)]
    tag = "pbc" if periodic else "obc"
    return StabilizerModel(gens, [j] * len(gens), name=f"ising_chain({n},{j},{tag})")


def cluster_chain(n: int, j: object = 1) -> StabilizerModel:
    if n < 3:
        raise ModelError("cluster chain needs N >= 3")
    gens = [_word(n, {i - 1: "Z", i: "X", i + 1: "Z"}) for i in range(1, n - 1)]
    return StabilizerModel(gens, [j] * len(gens), name=f"cluster_chain({n},{j})")


def toric_edge(lx: int, ly: int, kind: str, i: int, j: int) -> int:
    """Qubit index of the horizontal ('h') or vertical ('v') edge at (i, j)."""
    i %= lx
    j %= ly
    base = 0 if kind == "h" else lx * ly
    return base + j * lx + i


def toric_code(lx: int, ly: int, j: object = 1) -> StabilizerModel:
    """Plaquette X-terms followed by vertex Z-terms on an Lx x Ly torus."""
    if lx < 2 or ly < 2:
        raise ModelError("toric code needs Lx, Ly >= 2")
    n = 2 * lx * ly
    e = lambda kind, i, jj: toric_edge(lx, ly, kind, i, jj)  # noqa: E731
    gens = []
    for jj in range(ly):
        for i in range(lx):
            sites = {e("h", i, jj), e("h", i, jj + 1), e("v", i, jj), e("v", i + 1, jj)}
            gens.append(_word(n, {s: "X" for s in sites}))
    for jj in range(ly):
        for i in range(lx):
            sites = {e("h", i, jj), e("h", i - 1, jj), e("v", i, jj), e("v", i, jj - 1)}
            gens.append(_word(n, {s: "Z" for s in sites}))
    return StabilizerModel(gens, [j] * len(gens), name=f"toric_code({lx},{ly},{j})", lattice=(lx, ly))


_RANDOM_COUPLINGS = [Fraction(k, 2) for k in (-3, -2, -1, 1, 2, 3, 4)]


def random_commuting(n: int, m: int, seed: int) -> StabilizerModel:
    """Seeded random model with ``m`` independent commuting generators and rational couplings."""
    if not 1 <= m <= n:
        raise ModelError("need 1 <= m <= n for an independent commuting set")
    rng = np.random.default_rng(seed)
    chosen: list[PauliWord] = []
    basis = gf2.EchelonBasis()
    while len(chosen) < m:
        w = PauliWord.from_label(n, int(rng.integers(1, 4**n)))
        if any(symplectic_parity(w, g) for g in chosen) or basis.contains(w.label):
            continue
        basis.add(w.label)
        chosen.append(w)
    couplings = [_RANDOM_COUPLINGS[int(rng.integers(len(_RANDOM_COUPLINGS)))] for _ in range(m)]
    return StabilizerModel(chosen, couplings, name=f"random_commuting({n},{m},seed={seed})")
