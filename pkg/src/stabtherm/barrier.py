"""Energy cost of Pauli paths and the generalized energy barrier.

A node ``gamma`` on the Cayley graph of Z_2^{2N} generated by weight-one words
costs ``c(gamma) = sum_k 2|J_k| e_k(gamma) (1 - e_k(target))``.  The energy cost
of a target is the min over paths of the max node cost; the barrier is the max
of that over every target.

Costs are handled as integers after scaling by the common denominator of the
couplings, so all comparisons are exact.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from ._parallel import ordered_map
from .model import GeneratorSet, ModelError, StabilizerModel, SizeLimitError, check_limit
from .pauli import PauliWord, format_pauli, weight

EXACT_TARGET_LIMIT = 6
EXACT_BARRIER_LIMIT = 5
BRUTE_FORCE_LIMIT = 3


@dataclass(frozen=True)
class PauliPath:
    """Ordered weight-one steps whose XOR is ``target``."""

    target: PauliWord
    steps: tuple[PauliWord, ...]

    def __post_init__(self) -> None:
        acc = PauliWord.identity(self.target.n)
        seen = set()
        for s in self.steps:
            if s.n != self.target.n or weight(s) != 1:
                raise ValueError(f"path step {format_pauli(s)} is not a weight-one word on {self.target.n} sites")
            edge = (acc.label, s.label)
            if edge in seen:
                raise ValueError("path revisits an edge")
            seen.add(edge)
            acc = acc ^ s
        if acc != self.target:
            raise ValueError(f"steps compose to {format_pauli(acc)}, not {format_pauli(self.target)}")

    def __len__(self) -> int:
        return len(self.steps)

    def prefixes(self) -> list[PauliWord]:
        """eta_1, ..., eta_T (the identity start is not included)."""
        out = []
        acc = PauliWord.identity(self.target.n)
        for s in self.steps:
            acc = acc ^ s
            out.append(acc)
        return out

    @property
    def single_visit(self) -> bool:
        sites = [s.support for s in self.steps]
        return len(set(sites)) == len(sites)

    def __str__(self) -> str:
        return " ".join(format_pauli(s) for s in self.steps) or "(empty)"


class _CostTable:
    """Integer node costs for a model: ``table[s & ~t]`` is the scaled cost."""

    def __init__(self, model: StabilizerModel) -> None:
        weights = [2 * abs(j) for j in model.couplings]
        denom = math.lcm(*(w.denominator for w in weights)) if weights else 1
        self.denom = denom
        self.int_weights = [int(w * denom) for w in weights]
        m = model.m
        self.full = (1 << m) - 1
        if m <= 22:
            masks = np.arange(1 << m, dtype=np.int64)
            table = np.zeros(1 << m, dtype=np.int64)
            for k, w in enumerate(self.int_weights):
                table += ((masks >> k) & 1) * w
            self.table = table
        else:
            self.table = None

    def cost(self, s: np.ndarray | int, t: int) -> np.ndarray | int:
        masked = np.asarray(s, dtype=np.int64) & np.int64(self.full & ~t)
        if self.table is not None:
            return self.table[masked]
        out = np.zeros(masked.shape, dtype=np.int64)
        for k, w in enumerate(self.int_weights):
            out += ((masked >> k) & 1) * w
        return out

    def frac(self, value: int) -> Fraction:
        return Fraction(int(value), self.denom)


def path_cost(target: PauliWord, path: PauliPath, model: StabilizerModel) -> Fraction:
    """Max over prefixes of the violation energy of generators the target commutes with."""
    if path.target != target:
        raise ValueError("path target does not match")
    if target.n != model.n:
        raise ValueError("path and model sizes differ")
    table = _CostTable(model)
    t = model.syndrome(target)
    if not path.steps:
        return Fraction(0)
    syn = [model.syndrome(p) for p in path.prefixes()]
    return table.frac(int(np.max(table.cost(np.array(syn), t))))


def violation_cost(word: PauliWord, target: PauliWord, model: StabilizerModel) -> Fraction:
    """Node cost c(word) relative to ``target``."""
    table = _CostTable(model)
    return table.frac(int(table.cost(model.syndrome(word), model.syndrome(target))))


def reduced_generator_set(target: PauliWord, model: StabilizerModel) -> GeneratorSet:
    """Generators commuting with ``target`` (with their couplings)."""
    t = model.syndrome(target)
    keep = [k for k in range(model.m) if not (t >> k) & 1]
    return GeneratorSet(tuple(model.generators[k] for k in keep), tuple(model.couplings[k] for k in keep))


# -- exhaustive search -------------------------------------------------------


class _Graph:
    """The full Cayley graph of Z_2^{2N} with weight-one steps, as label arrays."""

    def __init__(self, model: StabilizerModel) -> None:
        self.model = model
        self.nodes = np.arange(4**model.n, dtype=np.int64)
        self.syndromes = model.syndromes_of_labels(self.nodes)
        self.steps = [w.label for w in model.weight_one]
        self.table = _CostTable(model)

    def node_costs(self, t: int) -> np.ndarray:
        return self.table.cost(self.syndromes, t)

    def minimax(self, costs: np.ndarray) -> np.ndarray:
        """Min over paths from the identity of the max node cost, for every node."""
        inf = np.iinfo(np.int64).max
        dist = np.full(costs.shape, inf, dtype=np.int64)
        dist[0] = costs[0]
        while True:
            new = dist.copy()
            for s in self.steps:
                np.minimum(new, np.maximum(dist[self.nodes ^ s], costs), out=new)
            if np.array_equal(new, dist):
                return dist
            dist = new

    def witness(self, target: int, bound: int, costs: np.ndarray) -> list[int]:
        """Shortest path to ``target`` through nodes of cost <= bound, smallest step index first."""
        allowed = costs <= bound
        depth = np.full(costs.shape, -1, dtype=np.int64)
        depth[target] = 0
        frontier = np.array([target], dtype=np.int64)
        d = 0
        while depth[0] < 0:
            d += 1
            nxt = np.unique(np.concatenate([frontier ^ s for s in self.steps]))
            nxt = nxt[allowed[nxt] & (depth[nxt] < 0)]
            if nxt.size == 0:
                raise RuntimeError("target unreachable under its own bottleneck value")
            depth[nxt] = d
            frontier = nxt
        path, node = [], 0
        while node != target:
            for idx, s in enumerate(self.steps):
                nb = node ^ s
                if depth[nb] == depth[node] - 1 and (allowed[nb] or nb == target):
                    path.append(idx)
                    node = nb
                    break
        return path


def _path_from_indices(model: StabilizerModel, target: PauliWord, indices: list[int]) -> PauliPath:
    return PauliPath(target, tuple(model.weight_one[i] for i in indices))


def exact_energy_cost(
    target: PauliWord, model: StabilizerModel, limit: int = EXACT_TARGET_LIMIT
) -> tuple[Fraction, PauliPath]:
    """Exact bottleneck cost of ``target`` and a shortest witness path attaining it."""
    check_limit("exact energy cost", model.n, limit)
    if limit > EXACT_TARGET_LIMIT and model.n > EXACT_TARGET_LIMIT:
        warnings.warn(f"exhaustive search over 4^{model.n} words", RuntimeWarning, stacklevel=2)
    graph = _Graph(model)
    costs = graph.node_costs(model.syndrome(target))
    value = int(graph.minimax(costs)[target.label])
    steps = graph.witness(target.label, value, costs)
    return graph.table.frac(value), _path_from_indices(model, target, steps)


def _lex_keys(labels: np.ndarray, n: int) -> np.ndarray:
    """Integer keys ordering labels like their letter strings (I < X < Y < Z, site 0 first)."""
    labels = np.asarray(labels, dtype=np.int64)
    key = np.zeros(labels.shape, dtype=np.int64)
    for i in range(n):
        x = (labels >> i) & 1
        z = (labels >> (n + i)) & 1
        key = key * 4 + x + z + z * (1 - x)
    return key


def _lex_min(labels: np.ndarray, n: int) -> int:
    labels = np.asarray(labels, dtype=np.int64)
    return int(labels[np.argmin(_lex_keys(labels, n))])


@dataclass
class BarrierReport:
    barrier: Fraction
    witness_target: PauliWord
    witness_prefix: PauliWord
    exact: bool
    witness_path: PauliPath | None = None
    eta_star: int | None = None
    single_visit: bool | None = None
    exhaustive: bool = True
    family: str | None = None
    n_targets: int = 0
    per_target: dict[int, tuple[Fraction, int]] | None = field(default=None, repr=False)

    @property
    def label(self) -> str:
        return "epsilon_bar" if self.exact else "epsilon_bar_upper"

    def to_text(self) -> str:
        lines = [
            f"{self.label} = {self.barrier} ({float(self.barrier):.12g})",
            f"exact = {str(self.exact).lower()}",
            f"targets = {self.n_targets} ({'all' if self.exhaustive else 'sampled'})",
        ]
        if self.family:
            lines.append(f"family = {self.family}")
        if self.eta_star is not None:
            lines.append(f"eta_star = {self.eta_star}")
        if self.single_visit is not None:
            lines.append(f"single_visit = {str(self.single_visit).lower()}")
        lines.append(f"witness_target = {format_pauli(self.witness_target)}")
        lines.append(f"witness_prefix = {format_pauli(self.witness_prefix)}")
        if self.witness_path is not None:
            lines.append(f"witness_path = {self.witness_path}")
        return "\n".join(lines)

    def csv_rows(self) -> list[tuple[str, str, str]]:
        """(target, cost, bottleneck prefix) rows in label order."""
        if self.per_target is None:
            rows = {self.witness_target.label: (self.barrier, self.witness_prefix.label)}
        else:
            rows = self.per_target
        n = self.witness_target.n
        return [
            (format_pauli(PauliWord.from_label(n, t)), str(cost), format_pauli(PauliWord.from_label(n, p)))
            for t, (cost, p) in sorted(rows.items())
        ]


def generalized_barrier_exact(
    model: StabilizerModel,
    limit: int = EXACT_BARRIER_LIMIT,
    per_target: bool = False,
    workers: int | None = None,
    with_eta: bool = False,
) -> BarrierReport:
    """Exact barrier: max over all 4^N targets of the bottleneck cost.

    With ``with_eta`` the report also carries eta*, the longest of the shortest
    optimal witnesses, i.e. the path length of the family made of exact witnesses.
    """
    check_limit("exact generalized barrier", model.n, limit)
    if model.n > EXACT_BARRIER_LIMIT:
        warnings.warn(f"exhaustive barrier over 4^{model.n} targets", RuntimeWarning, stacklevel=2)
    graph = _Graph(model)
    classes = [int(t) for t in model.valid_syndromes]

    def solve(t: int) -> np.ndarray:
        return graph.minimax(graph.node_costs(t))

    dists = ordered_map(solve, classes, workers)
    values = np.empty(graph.nodes.shape, dtype=np.int64)
    for t, dist in zip(classes, dists):
        sel = graph.syndromes == t
        values[sel] = dist[sel]
    best = int(values.max())
    target_label = _lex_min(graph.nodes[values == best], model.n)
    target = PauliWord.from_label(model.n, target_label)
    t = int(graph.syndromes[target_label])
    costs = graph.node_costs(t)
    steps = graph.witness(target_label, best, costs)
    path = _path_from_indices(model, target, steps)
    prefix = _bottleneck_prefix(path, costs, best)
    table = None
    if per_target:
        table = {}
        for lab in range(graph.nodes.size):
            table[lab] = (graph.table.frac(int(values[lab])), 0)
    return BarrierReport(
        barrier=graph.table.frac(best),
        witness_target=target,
        witness_prefix=prefix,
        exact=True,
        witness_path=path,
        eta_star=int(exact_witness_lengths(model, limit).max()) if with_eta else None,
        family="exact_witness" if with_eta else None,
        n_targets=int(graph.nodes.size),
        per_target=table,
    )


def _bottleneck_prefix(path: PauliPath, costs: np.ndarray, value: int) -> PauliWord:
    for p in path.prefixes():
        if costs[p.label] == value:
            return p
    return PauliWord.identity(path.target.n)


# -- structured families -----------------------------------------------------


@dataclass(frozen=True)
class PathFamily:
    """A rule assigning one Pauli path to every target.

    ``fixed_order`` visits sites in a given order and applies the target's
    letter there in one step.  ``css_string`` (lattice models) applies the Z
    part as strings along lattice lines and then the X part, splitting a Y into
    an X step and a Z step.  ``explicit`` looks paths up in a mapping.
    """

    kind: str
    ordering: tuple[int, ...] | None = None
    paths: Mapping[int, PauliPath] | None = field(default=None, hash=False, compare=False)

    @classmethod
    def fixed_order(cls, ordering: Sequence[int] | None = None) -> PathFamily:
        return cls("fixed_order", tuple(ordering) if ordering is not None else None)

    @classmethod
    def css_string(cls) -> PathFamily:
        return cls("css_string")

    @classmethod
    def explicit(cls, paths: Iterable[PauliPath]) -> PathFamily:
        return cls("explicit", paths={p.target.label: p for p in paths})

    @property
    def description(self) -> str:
        if self.kind == "fixed_order" and self.ordering is not None:
            return f"fixed_order({','.join(map(str, self.ordering))})"
        return self.kind

    def slot_masks(self, model: StabilizerModel) -> list[int]:
        """Ordered label masks; a target's path is its nonempty restrictions to each slot."""
        n = model.n
        if self.kind == "fixed_order":
            order = self.ordering if self.ordering is not None else tuple(range(n))
            if sorted(order) != list(range(n)):
                raise ModelError(f"ordering {order} is not a permutation of {n} sites")
            return [(1 << i) | (1 << (n + i)) for i in order]
        if self.kind == "css_string":
            if model.lattice is None:
                raise ModelError("css_string needs a lattice model (toric_code)")
            lx, ly = model.lattice
            if n != 2 * lx * ly:
                raise ModelError("lattice shape does not match the number of qubits")
            h = lambda i, j: j * lx + i  # noqa: E731
            v = lambda i, j: lx * ly + j * lx + i  # noqa: E731
            # Lines are interleaved (column k of one edge type, then row k of the
            # other) so that the applied region grows as a connected sweep.
            z_sites: list[int] = []
            x_sites: list[int] = []
            for k in range(max(lx, ly)):
                if k < lx:
                    z_sites += [h(k, j) for j in range(ly)]
                if k < ly:
                    z_sites += [v(i, k) for i in range(lx)]
                if k < ly:
                    x_sites += [h(i, k) for i in range(lx)]
                if k < lx:
                    x_sites += [v(k, j) for j in range(ly)]
            return [1 << (n + s) for s in z_sites] + [1 << s for s in x_sites]
        raise ModelError(f"{self.kind} family has no slot structure")

    def path(self, target: PauliWord, model: StabilizerModel) -> PauliPath:
        if self.kind == "explicit":
            assert self.paths is not None
            try:
                return self.paths[target.label]
            except KeyError:
                raise ModelError(f"no explicit path for {format_pauli(target)}") from None
        steps = []
        for mask in self.slot_masks(model):
            part = target.label & mask
            if part:
                steps.append(PauliWord.from_label(model.n, part))
        return PauliPath(target, tuple(steps))

    def covers(self, labels: np.ndarray) -> bool:
        if self.kind != "explicit":
            return True
        assert self.paths is not None
        return all(int(t) in self.paths for t in labels)


def _target_labels(model: StabilizerModel, targets: str | int | Sequence[PauliWord], seed: int | None) -> tuple[np.ndarray, bool]:
    total = 4**model.n
    if isinstance(targets, str):
        if targets != "all":
            raise ValueError(f"unknown target selection {targets!r}")
        return np.arange(total, dtype=np.int64), True
    if isinstance(targets, int):
        rng = np.random.default_rng(seed)
        return rng.integers(0, total, size=targets, dtype=np.int64), False
    return np.array([w.label for w in targets], dtype=np.int64), False


def heuristic_barrier(
    model: StabilizerModel,
    family: PathFamily,
    targets: str | int | Sequence[PauliWord] = "all",
    seed: int | None = 0,
    per_target: bool = False,
    limit: int = 12,
) -> BarrierReport:
    """Upper bound on the barrier from the family's paths (plus eta* and single-visit)."""
    if isinstance(targets, str):
        check_limit("barrier over all targets", model.n, limit)
    labels, exhaustive = _target_labels(model, targets, seed)
    if labels.size == 0:
        raise ValueError("no targets requested")
    table = _CostTable(model)
    t_syn = model.syndromes_of_labels(labels)

    if family.kind == "explicit":
        costs = np.zeros(labels.shape, dtype=np.int64)
        where = np.zeros(labels.shape, dtype=np.int64)
        lengths = np.zeros(labels.shape, dtype=np.int64)
        single = True
        for idx, lab in enumerate(labels):
            target = PauliWord.from_label(model.n, int(lab))
            p = family.path(target, model)
            lengths[idx] = len(p)
            single &= p.single_visit
            if p.steps:
                pre = np.array([q.label for q in p.prefixes()], dtype=np.int64)
                c = table.cost(model.syndromes_of_labels(pre), int(t_syn[idx]))
                k = int(np.argmax(c))
                costs[idx], where[idx] = c[k], pre[k]
    else:
        masks = family.slot_masks(model)
        costs = np.zeros(labels.shape, dtype=np.int64)
        where = np.zeros(labels.shape, dtype=np.int64)
        lengths = np.zeros(labels.shape, dtype=np.int64)
        site_steps = np.zeros((labels.size, model.n), dtype=np.int64)
        cum = 0
        for mask in masks:
            cum |= mask
            part = labels & mask
            nonempty = part != 0
            lengths += nonempty
            prefix = labels & cum
            c = table.cost(model.syndromes_of_labels(prefix), t_syn)
            c = np.where(nonempty, c, -1)
            better = c > costs
            costs = np.where(better, c, costs)
            where = np.where(better, prefix, where)
            sites = (mask | (mask >> model.n)) & ((1 << model.n) - 1)
            for i in range(model.n):
                if (sites >> i) & 1:
                    site_steps[:, i] += nonempty
        single = bool(np.all(site_steps <= 1))

    best = int(costs.max())
    target_label = _lex_min(labels[costs == best], model.n)
    target = PauliWord.from_label(model.n, target_label)
    wpath = family.path(target, model)
    t = model.syndrome(target)
    prefix = PauliWord.identity(model.n)
    for p in wpath.prefixes():
        if int(table.cost(model.syndrome(p), t)) == best:
            prefix = p
            break
    table_out = None
    if per_target:
        table_out = {int(lab): (table.frac(int(c)), int(w)) for lab, c, w in zip(labels, costs, where)}
    return BarrierReport(
        barrier=table.frac(best),
        witness_target=target,
        witness_prefix=prefix,
        exact=False,
        witness_path=wpath,
        eta_star=int(lengths.max()),
        single_visit=bool(single),
        exhaustive=exhaustive,
        family=family.description,
        n_targets=int(labels.size),
        per_target=table_out,
    )


def width(model: StabilizerModel, ordering: Sequence[int] | None = None, periodic: bool = False) -> int:
    """Max number of generators straddling one bond of a 1-D site ordering."""
    n = model.n
    order = list(ordering) if ordering is not None else list(range(n))
    if sorted(order) != list(range(n)):
        raise ModelError("ordering is not a permutation of the sites")
    pos = {site: p for p, site in enumerate(order)}
    bonds = [(p, p + 1) for p in range(n - 1)] + ([(n - 1, 0)] if periodic else [])
    counts = [0] * len(bonds)
    for k, g in enumerate(model.generators):
        ps = sorted(pos[s] for s in g.sites())
        covered = _interval_bonds(ps, n, periodic)
        if covered is None:
            raise ModelError(f"generator {k} ({format_pauli(g)}) is not an interval in this ordering; model is not 1-D")
        for b, bond in enumerate(bonds):
            if bond in covered:
                counts[b] += 1
    return max(counts) if counts else 0


def _interval_bonds(ps: list[int], n: int, periodic: bool) -> set[tuple[int, int]] | None:
    if len(ps) == 1:
        return set()
    if ps[-1] - ps[0] == len(ps) - 1:
        return {(p, p + 1) for p in ps[:-1]}
    if periodic:
        # wrapped interval: a gap of missing positions in the middle
        present = set(ps)
        for start in ps:
            run = [(start + i) % n for i in range(len(ps))]
            if set(run) == present:
                return {(q, (q + 1) % n) if q != n - 1 else (n - 1, 0) for q in run[:-1]}
    return None


def family_paths(model: StabilizerModel, family: PathFamily, limit: int = 4) -> dict[int, PauliPath]:
    """Every target's path under ``family``, keyed by target label."""
    check_limit("path enumeration", model.n, limit)
    return {lab: family.path(PauliWord.from_label(model.n, lab), model) for lab in range(4**model.n)}


def edge_index(paths: Mapping[int, PauliPath]) -> dict[tuple[int, int], list[int]]:
    """Map each Pauli-path edge ``(prefix, step)`` to the targets whose path uses it."""
    index: dict[tuple[int, int], list[int]] = {}
    for lab, p in sorted(paths.items()):
        acc = 0
        for s in p.steps:
            index.setdefault((acc, s.label), []).append(lab)
            acc ^= s.label
    return index


def exact_witness_lengths(model: StabilizerModel, limit: int = EXACT_BARRIER_LIMIT) -> np.ndarray:
    """For every target, the length of its shortest path attaining the exact energy cost."""
    check_limit("exact witness lengths", model.n, limit)
    graph = _Graph(model)
    lengths = np.zeros(graph.nodes.shape, dtype=np.int64)
    for t in (int(x) for x in model.valid_syndromes):
        costs = graph.node_costs(t)
        dist = graph.minimax(costs)
        members = graph.syndromes == t
        for value in np.unique(dist[members]):
            sel = members & (dist == value)
            depth = _bfs_depth(graph, costs <= value)
            lengths[sel] = depth[sel]
    return lengths


def _bfs_depth(graph: _Graph, allowed: np.ndarray) -> np.ndarray:
    depth = np.full(allowed.shape, -1, dtype=np.int64)
    depth[0] = 0
    frontier = np.array([0], dtype=np.int64)
    d = 0
    while frontier.size:
        d += 1
        nxt = np.unique(np.concatenate([frontier ^ s for s in graph.steps]))
        nxt = nxt[allowed[nxt] & (depth[nxt] < 0)]
        depth[nxt] = d
        frontier = nxt
    return depth
