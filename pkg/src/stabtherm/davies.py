"""Davies generator of a commuting Pauli Hamiltonian.

The generator is block diagonal over cosets of the stabilizer label space.
Within the coset of ``rep`` we use the orthonormal basis
``v_a = 2^{(r-N)/2} sigma(rep) P(a)`` indexed by valid syndromes; in it the
Dirichlet form and the variance are small dense real symmetric matrices.

A literal operator-space construction (:class:`FullGenerator`) is kept for
small N as an oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Mapping, Sequence

import numpy as np
import scipy.linalg as sla
from scipy.special import expit

from . import gf2
from ._parallel import ordered_map
from .barrier import PathFamily, edge_index, family_paths
from .model import GibbsTable, ModelError, SizeLimitError, StabilizerModel, check_limit
from .pauli import PauliWord, commutation_sign, format_pauli, symplectic_parity

ORACLE_LIMIT = 4
COSET_LIMIT = 1 << 16
BLOCK_LIMIT = 1 << 12
RANGE_CUTOFF = 1e-12


class BathError(ValueError):
    pass


@dataclass(frozen=True)
class BathModel:
    """Transition rate h(omega), omega being the energy released by the jump."""

    kind: str
    beta: float
    table: tuple[tuple[Fraction, float], ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in ("metropolis", "glauber", "table"):
            raise BathError(f"unknown bath kind {self.kind!r}")
        if not (self.beta >= 0 and math.isfinite(self.beta)):
            raise BathError(f"beta must be finite and >= 0, got {self.beta}")
        for w, h in self.table:
            if not h > 0:
                raise BathError(f"non-positive rate {h} at omega={w}")

    @classmethod
    def metropolis(cls, beta: float) -> BathModel:
        return cls("metropolis", float(beta))

    @classmethod
    def glauber(cls, beta: float) -> BathModel:
        return cls("glauber", float(beta))

    @classmethod
    def from_table(cls, beta: float, rates: Mapping[object, float]) -> BathModel:
        from .model import to_fraction

        items = sorted((to_fraction(w), float(h)) for w, h in rates.items())
        return cls("table", float(beta), tuple(items))

    @classmethod
    def named(cls, kind: str, beta: float) -> BathModel:
        return cls(kind.lower(), float(beta))

    def with_beta(self, beta: float) -> BathModel:
        return BathModel(self.kind, float(beta), self.table)

    def rate(self, omega: Fraction | float) -> float:
        if self.kind == "metropolis":
            return math.exp(min(self.beta * float(omega), 0.0))
        if self.kind == "glauber":
            return float(expit(self.beta * float(omega)))
        lookup = dict(self.table)
        try:
            return lookup[Fraction(omega)]
        except KeyError:
            raise BathError(f"rate table has no entry for omega={omega}") from None

    def kms_residual(self, omegas: Sequence[Fraction]) -> float:
        """max |h(-w) - e^{-beta w} h(w)| / max(h(w), h(-w)) over the given frequencies."""
        worst = 0.0
        for w in omegas:
            h, hm = self.rate(w), self.rate(-w)
            worst = max(worst, abs(hm - math.exp(-self.beta * float(w)) * h) / max(h, hm))
        return worst


def rate(bath: BathModel, omega: Fraction | float) -> float:
    return bath.rate(omega)


def realized_frequencies(model: StabilizerModel) -> list[Fraction]:
    out = set()
    for e in model.weight_one_syndromes:
        for a in model.valid_syndromes:
            out.add(model.energies_exact[model.index(int(a))] - model.energies_exact[model.index(int(a) ^ e)])
    return sorted(out)


# -- coset structure ---------------------------------------------------------


@dataclass(frozen=True)
class CosetDecomposition:
    representatives: tuple[PauliWord, ...]
    rep_syndromes: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.representatives)


def coset_representatives(model: StabilizerModel, limit: int = COSET_LIMIT) -> CosetDecomposition:
    """One word per coset of the stabilizer labels; the identity comes first."""
    n, r = model.n, model.stabilizer_basis.rank
    count = 4**n >> r
    check_limit("coset enumeration", count, limit, unit="cosets")
    comp = gf2.complement_basis(model.stabilizer_basis, 2 * n)
    reps = tuple(PauliWord.from_label(n, lab) for lab in gf2.span_elements(comp))
    return CosetDecomposition(reps, tuple(model.syndrome(w) for w in reps))


def _matrix_text(m: np.ndarray) -> str:
    return "\n".join(" ".join(f"{v:.12g}" for v in row) for row in m)


@dataclass
class _Block:
    rep: PauliWord
    matrix: np.ndarray
    syndromes: np.ndarray
    asymmetry: float = 0.0

    def in_basis_of(self, other: PauliWord, model: StabilizerModel) -> np.ndarray:
        """The same block expressed in the basis of another representative of the coset."""
        combo = model.stabilizer_basis.solve(self.rep.label ^ other.label)
        if combo is None:
            raise ModelError(f"{format_pauli(other)} is not in the coset of {format_pauli(self.rep)}")
        t = np.where(np.bitwise_count(self.syndromes & np.int64(combo)) & 1, -1.0, 1.0)
        return t[:, None] * self.matrix * t[None, :]

    def to_text(self) -> str:
        return f"# rep {format_pauli(self.rep)}\n{_matrix_text(self.matrix)}"


class DirichletBlock(_Block):
    pass


class VarianceBlock(_Block):
    pass


class CosetAssembler:
    """Per-(model, bath) tables shared by all coset blocks."""

    def __init__(self, model: StabilizerModel, bath: BathModel) -> None:
        d = model.syndrome_space.size
        check_limit("coset block dimension", d, BLOCK_LIMIT, unit="dim")
        self.model = model
        self.bath = bath
        self.gibbs: GibbsTable = model.gibbs(bath.beta)
        self.rho = self.gibbs.weights
        self.syn = model.valid_syndromes
        self.dim = d
        if model.m <= 24:
            lookup = np.full(1 << model.m, -1, dtype=np.int64)
            lookup[self.syn] = np.arange(d)
            self._lookup = lookup
        else:
            self._lookup = None
        eps = model.energies_exact
        codes: dict[Fraction, int] = {}
        self.alpha_syn = []
        self.alpha_partner = []
        self.alpha_codes = []
        self.alpha_rates = []
        rate_cache: dict[Fraction, float] = {}
        for e in model.weight_one_syndromes:
            partner = self.shift(e)
            omegas = [eps[i] - eps[j] for i, j in enumerate(partner)]
            for w in omegas:
                if w not in rate_cache:
                    rate_cache[w] = bath.rate(w)
            self.alpha_syn.append(e)
            self.alpha_partner.append(partner)
            self.alpha_codes.append(np.array([codes.setdefault(w, len(codes)) for w in omegas], dtype=np.int64))
            self.alpha_rates.append(np.array([rate_cache[w] for w in omegas]))
        self.frequencies = sorted(codes)
        self.rates = rate_cache

    def shift(self, s: int) -> np.ndarray:
        """Index of ``a ^ s`` for every valid ``a``."""
        if self._lookup is not None:
            idx = self._lookup[self.syn ^ np.int64(s)]
        else:
            idx = np.array([self.model.index(int(a) ^ s) for a in self.syn], dtype=np.int64)
        if np.any(idx < 0):
            raise ModelError(f"syndrome shift {s:#b} leaves the valid set")
        return idx

    def dirichlet(self, rep: PauliWord) -> DirichletBlock:
        s = self.model.syndrome(rep)
        rs = self.shift(s)
        d = self.dim
        mat = np.zeros((d, d))
        rows = np.arange(d)
        for alpha, partner, codes, h in zip(self.model.weight_one, self.alpha_partner, self.alpha_codes, self.alpha_rates):
            mat[rows, rows] += 0.5 * (h + h[rs]) * self.rho
            theta = commutation_sign(alpha, rep)
            same = codes == codes[rs]
            np.add.at(mat, (rows, partner), -theta * np.where(same, h, 0.0) * self.rho)
        # KMS makes the assembled matrix symmetric up to rounding; keep the
        # raw defect for diagnostics and store the exactly symmetric part.
        asym = float(np.max(np.abs(mat - mat.T))) if d else 0.0
        return DirichletBlock(rep, 0.5 * (mat + mat.T), self.syn, asym)

    def variance(self, rep: PauliWord) -> VarianceBlock:
        rho = self.rho
        mat = np.diag(rho.copy())
        combo = self.model.stabilizer_basis.solve(rep.label)
        if combo is not None:
            # the sign functional is constant on each syndrome class: (-1)^{b.y}
            sign = np.where(np.bitwise_count(self.syn & np.int64(combo)) & 1, -1.0, 1.0)
            mat -= self.gibbs.multiplicity * np.outer(sign * rho, sign * rho)
        return VarianceBlock(rep, mat, self.syn)

    def pencil_eigenvalues(self, rep: PauliWord) -> tuple[np.ndarray, float]:
        """Eigenvalues of D v = lam V v on the range of V, and the max residual."""
        dmat = self.dirichlet(rep).matrix
        vmat = self.variance(rep).matrix
        return solve_pencil(dmat, vmat)


def solve_pencil(dmat: np.ndarray, vmat: np.ndarray, cutoff: float = RANGE_CUTOFF) -> tuple[np.ndarray, float]:
    if np.count_nonzero(vmat - np.diag(np.diagonal(vmat))) == 0:
        v = np.diagonal(vmat)
        keep = v > cutoff * v.max()
        inv = 1.0 / np.sqrt(v[keep])
        sub = dmat[np.ix_(keep, keep)] * inv[:, None] * inv[None, :]
        basis = np.zeros((len(v), int(keep.sum())))
        basis[np.flatnonzero(keep), np.arange(int(keep.sum()))] = inv
    else:
        vals, vecs = np.linalg.eigh(vmat)
        keep = vals > cutoff * vals.max()
        basis = vecs[:, keep] / np.sqrt(vals[keep])
        sub = basis.T @ dmat @ basis
    sub = 0.5 * (sub + sub.T)
    lam, u = np.linalg.eigh(sub)
    x = basis @ u[:, :1]
    res = float(np.linalg.norm(dmat @ x - lam[0] * (vmat @ x)))
    return lam, res


def dirichlet_block(rep: PauliWord, model: StabilizerModel, bath: BathModel) -> DirichletBlock:
    return CosetAssembler(model, bath).dirichlet(rep)


def variance_block(rep: PauliWord, model: StabilizerModel, beta: float) -> VarianceBlock:
    return CosetAssembler(model, BathModel.metropolis(beta)).variance(rep)


def variance_block_bruteforce(rep: PauliWord, model: StabilizerModel, beta: float, limit: int = ORACLE_LIMIT) -> np.ndarray:
    """Variance block from an explicit sum over all 4^N words."""
    check_limit("brute-force variance", model.n, limit)
    asm = CosetAssembler(model, BathModel.metropolis(beta))
    rho = asm.rho
    d = asm.dim
    mat = np.zeros((d, d))
    rows = np.arange(d)
    for lab in range(4**model.n):
        eta = PauliWord.from_label(model.n, lab)
        b = model.syndrome(eta)
        shifted = asm.shift(b)
        theta = commutation_sign(eta, rep)
        mat[rows, rows] += rho * rho[shifted]
        np.add.at(mat, (rows, shifted), -theta * rho * rho[shifted])
    return mat / 2**model.n


def minus_vector(model: StabilizerModel, a: int, eta: PauliWord, rep: PauliWord) -> np.ndarray:
    """(|a> - theta_{eta,rep} |a ^ e(eta)>)/sqrt(2) in the coset basis."""
    v = np.zeros(model.syndrome_space.size)
    v[model.index(a)] += 1.0
    v[model.index(a ^ model.syndrome(eta))] -= commutation_sign(eta, rep)
    return v / math.sqrt(2.0)


# -- spectral gap ------------------------------------------------------------


@dataclass
class GapResult:
    gap: float
    achieving_rep: PauliWord
    method: str
    residual: float
    cutoff: float = RANGE_CUTOFF
    n_blocks: int = 0
    per_block: list[float] | None = field(default=None, repr=False)


def _coset_gap(model: StabilizerModel, bath: BathModel, workers: int | None, keep: bool) -> GapResult:
    asm = CosetAssembler(model, bath)
    reps = coset_representatives(model).representatives
    chunk = max(1, len(reps) // 64)
    chunks = [reps[i : i + chunk] for i in range(0, len(reps), chunk)]

    def run(group: Sequence[PauliWord]) -> list[tuple[float, float]]:
        out = []
        for rep in group:
            lam, res = asm.pencil_eigenvalues(rep)
            out.append((float(lam[0]), res))
        return out

    results = [x for part in ordered_map(run, chunks, workers) for x in part]
    best = None
    for rep, (lam, res) in zip(reps, results):
        if best is None:
            best = (lam, rep, res)
            continue
        tol = 1e-12 * max(1.0, abs(best[0]))
        if lam < best[0] - tol or (abs(lam - best[0]) <= tol and format_pauli(rep) < format_pauli(best[1])):
            best = (lam, rep, res)
    assert best is not None
    if best[0] <= 0:
        raise ArithmeticError(f"non-positive pencil eigenvalue {best[0]} (assembly bug)")
    return GapResult(
        gap=best[0],
        achieving_rep=best[1],
        method="coset",
        residual=best[2],
        n_blocks=len(reps),
        per_block=[lam for lam, _ in results] if keep else None,
    )


def spectral_gap(
    model: StabilizerModel,
    bath: BathModel,
    method: str = "coset",
    workers: int | None = None,
    keep_blocks: bool = False,
) -> GapResult:
    if method == "coset":
        return _coset_gap(model, bath, workers, keep_blocks)
    if method == "full":
        return full_generator(model, bath).gap()
    raise ValueError(f"unknown gap method {method!r}")


def all_block_eigenvalues(model: StabilizerModel, bath: BathModel) -> np.ndarray:
    """Union of all coset pencil spectra plus the stationary zero."""
    asm = CosetAssembler(model, bath)
    vals = [np.zeros(1)]
    for rep in coset_representatives(model).representatives:
        vals.append(asm.pencil_eigenvalues(rep)[0])
    return np.sort(np.concatenate(vals))


# -- literal operator-space oracle --------------------------------------------

_LETTERS = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli_matrix(w: PauliWord) -> np.ndarray:
    """Dense Hermitian matrix of a word; site 0 is the leftmost tensor factor."""
    return reduce(np.kron, [_LETTERS[w.letter(i)] for i in range(w.n)])


def _vec(a: np.ndarray) -> np.ndarray:
    return a.reshape(-1, order="F")


def _unvec(v: np.ndarray, dim: int) -> np.ndarray:
    return v.reshape(dim, dim, order="F")


class FullGenerator:
    """The Heisenberg-picture generator as a literal 4^N x 4^N superoperator."""

    def __init__(self, model: StabilizerModel, bath: BathModel) -> None:
        n = model.n
        dim = 2**n
        self.model, self.bath, self.dim = model, bath, dim
        eye = np.eye(dim, dtype=complex)
        gens = [pauli_matrix(g) for g in model.generators]
        proj = {}
        for a in model.valid_syndromes:
            p = eye.copy()
            for k, g in enumerate(gens):
                p = p @ (eye + (-1) ** ((int(a) >> k) & 1) * g) / 2
            proj[int(a)] = p
        self.projectors = proj
        gibbs = model.gibbs(bath.beta)
        self.rho = sum(w * proj[int(a)] for a, w in zip(model.valid_syndromes, gibbs.weights))
        eps = model.energies_exact
        sup = np.zeros((dim * dim, dim * dim), dtype=complex)
        dual = np.zeros_like(sup)
        for alpha, e in zip(model.weight_one, model.weight_one_syndromes):
            s_alpha = pauli_matrix(alpha)
            groups: dict[Fraction, np.ndarray] = {}
            for a in model.valid_syndromes:
                w = eps[model.index(int(a))] - eps[model.index(int(a) ^ e)]
                groups[w] = groups.get(w, 0) + proj[int(a)]
            for w, q in groups.items():
                h = bath.rate(w)
                jump = s_alpha @ q
                jd = jump.conj().T
                # Heisenberg: S^dag f S - 1/2 {Q, f};  Schroedinger: S r S^dag - 1/2 {Q, r}
                sup += h * (np.kron(jump.T, jd) - 0.5 * (np.kron(eye, q) + np.kron(q.T, eye)))
                dual += h * (np.kron(jd.T, jump) - 0.5 * (np.kron(eye, q) + np.kron(q.T, eye)))
        self.L = sup
        self.L_dual = dual
        basis = np.empty((dim * dim, dim * dim), dtype=complex)
        for lab in range(4**n):
            basis[:, lab] = _vec(pauli_matrix(PauliWord.from_label(n, lab))) / math.sqrt(dim)
        self.basis = basis

    def apply(self, f: np.ndarray) -> np.ndarray:
        return _unvec(self.L @ _vec(f), self.dim)

    def apply_dual(self, r: np.ndarray) -> np.ndarray:
        return _unvec(self.L_dual @ _vec(r), self.dim)

    def inner(self, f: np.ndarray, g: np.ndarray) -> complex:
        """<f, g>_rho = Tr(rho f^dag g)."""
        return complex(np.trace(self.rho @ f.conj().T @ g))

    def dirichlet_form(self, f: np.ndarray) -> float:
        return float(np.real(-self.inner(f, self.apply(f))))

    def variance(self, f: np.ndarray) -> float:
        m = complex(np.trace(self.rho @ f))
        return float(np.real(self.inner(f, f) - abs(m) ** 2))

    def matrices(self) -> tuple[np.ndarray, np.ndarray]:
        """Dirichlet matrix and Gram matrix of <.,.>_rho in the normalized Pauli basis."""
        k = np.kron(self.rho.T, np.eye(self.dim))
        dmat = self.basis.conj().T @ (-k @ self.L) @ self.basis
        gram = self.basis.conj().T @ k @ self.basis
        return 0.5 * (dmat + dmat.conj().T), 0.5 * (gram + gram.conj().T)

    def spectrum(self) -> np.ndarray:
        dmat, gram = self.matrices()
        return np.sort(sla.eigh(dmat, gram, eigvals_only=True))

    def gap(self) -> GapResult:
        dmat, gram = self.matrices()
        vals, vecs = sla.eigh(dmat, gram)
        lam = float(vals[1])
        x = vecs[:, 1]
        res = float(np.linalg.norm(dmat @ x - lam * (gram @ x)))
        weights = np.abs(x) ** 2
        rep = PauliWord.from_label(self.model.n, int(np.argmax(weights)))
        reps = coset_representatives(self.model)
        for r in reps.representatives:
            if self.model.stabilizer_basis.contains(r.label ^ rep.label):
                rep = r
                break
        return GapResult(gap=lam, achieving_rep=rep, method="full", residual=res, n_blocks=1)

    def fixed_point_residual(self) -> float:
        return float(np.linalg.norm(self.apply_dual(self.rho)))

    def coset_basis(self, rep: PauliWord) -> list[np.ndarray]:
        """Operators v_a = 2^{(r-N)/2} sigma(rep) P(a) for the valid syndromes, in order."""
        r = self.model.rank
        scale = 2.0 ** ((r - self.model.n) / 2)
        s = pauli_matrix(rep)
        return [scale * s @ self.projectors[int(a)] for a in self.model.valid_syndromes]


def full_generator(model: StabilizerModel, bath: BathModel, limit: int = ORACLE_LIMIT) -> FullGenerator:
    check_limit("full generator", model.n, limit)
    return FullGenerator(model, bath)


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    h = 0.5 * (a + a.conj().T)
    return h / np.linalg.norm(h)


def detailed_balance_check(
    model: StabilizerModel, bath: BathModel, trials: int = 20, seed: int = 0, limit: int = ORACLE_LIMIT
) -> float:
    """max |<f, L g>_rho - <L f, g>_rho| over random Hermitian f, g of unit norm."""
    gen = full_generator(model, bath, limit)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        f = random_hermitian(gen.dim, rng)
        g = random_hermitian(gen.dim, rng)
        worst = max(worst, abs(gen.inner(f, gen.apply(g)) - gen.inner(gen.apply(f), g)))
    return worst


# -- canonical paths ---------------------------------------------------------


def support_bound_canonical(
    model: StabilizerModel, bath: BathModel, family: PathFamily, limit: int = 3
) -> float:
    """Canonical-path upper bound on the support number tau (so 1/tau bounds the gap)."""
    check_limit("canonical-path support bound", model.n, limit)
    asm = CosetAssembler(model, bath)
    rho = asm.rho
    paths = family_paths(model, family, limit=limit)
    edges = edge_index(paths)
    n = model.n
    syn_of = {lab: model.syndrome(PauliWord.from_label(n, lab)) for lab in paths}
    best = 0.0
    for a in model.valid_syndromes:
        a = int(a)
        ia = model.index(a)
        for lab, path in paths.items():
            total = 0.0
            xi = 0
            for step in path.steps:
                axi = a ^ syn_of[xi]
                w = model.energies_exact[model.index(axi)] - model.energies_exact[model.index(axi ^ syn_of[step.label])]
                through = sum(rho[model.index(a ^ syn_of[eta])] for eta in edges[(xi, step.label)])
                total += 4.0 / (2**n * asm.rates[w] * rho[model.index(axi)]) * rho[ia] * through
                xi ^= step.label
            best = max(best, total)
    return best
