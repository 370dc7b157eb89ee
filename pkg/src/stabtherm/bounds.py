"""Lower bounds on the Davies gap and the mixing-time estimate built from them."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from ._parallel import ordered_map
from .barrier import (
    BarrierReport,
    PathFamily,
    edge_index,
    family_paths,
    generalized_barrier_exact,
    heuristic_barrier,
    width,
)
from .davies import BathModel, realized_frequencies, spectral_gap
from .model import ModelError, StabilizerModel, check_limit
from .pauli import PauliWord

VERIFY_TOL = 1e-9
C_BETA_LIMIT = 3


class BoundError(ValueError):
    pass


def h_star(model: StabilizerModel, bath: BathModel) -> float:
    """Smallest rate over the Bohr frequencies realized by weight-one jumps."""
    return min(bath.rate(w) for w in realized_frequencies(model))


def _check_report(report: BarrierReport) -> int:
    if report.eta_star is None or report.eta_star < 1:
        raise BoundError("barrier report carries no path length eta*")
    return report.eta_star


def gen_bound(model: StabilizerModel, bath: BathModel, report: BarrierReport) -> float:
    eta = _check_report(report)
    return h_star(model, bath) / (4 * eta) * math.exp(-2 * bath.beta * float(report.barrier))


def special_bound(model: StabilizerModel, bath: BathModel, report: BarrierReport) -> float:
    """N-independent bound; only for families visiting each qubit once."""
    _check_report(report)
    if not report.single_visit:
        raise BoundError(f"family {report.family or '?'} addresses some qubit twice; the single-visit bound does not apply")
    return h_star(model, bath) / 4 * math.exp(-2 * bath.beta * float(report.barrier))


@dataclass
class CBeta:
    value: float
    barrier: Fraction
    derived_bound: float


def c_beta(model: StabilizerModel, bath: BathModel, family: PathFamily, limit: int = C_BETA_LIMIT) -> CBeta:
    """C(beta) of the family, and the bound h*/(4 C) e^{-2 beta eps'} with eps' from the same family."""
    check_limit("C(beta)", model.n, limit)
    rho = model.gibbs(bath.beta).weights
    n = model.n
    paths = family_paths(model, family, limit=limit)
    edges = edge_index(paths)
    syn = {lab: model.syndrome(PauliWord.from_label(n, lab)) for lab in paths}
    best = 0.0
    for a in (int(x) for x in model.valid_syndromes):
        for path in paths.values():
            total = 0.0
            xi = 0
            for step in path.steps:
                through = sum(rho[model.index(a ^ syn[eta] ^ syn[xi])] for eta in edges[(xi, step.label)])
                total += through / 2**n
                xi ^= step.label
            best = max(best, total)
    eps = heuristic_barrier(model, family).barrier
    if best <= 0:
        raise ArithmeticError("C(beta) vanished")
    return CBeta(best, eps, h_star(model, bath) / (4 * best) * math.exp(-2 * bath.beta * float(eps)))


def beta_zero_floor(bath: BathModel) -> float:
    return 0.75 * bath.with_beta(0.0).rate(0)


def log_inverse_gibbs_norm(model: StabilizerModel, beta: float) -> float:
    """ln ||rho^{-1}|| = ln Z + beta * eps_max."""
    return model.gibbs(beta).log_partition + beta * float(model.max_energy())


def mixing_time_bound(model: StabilizerModel, beta: float, lam: float, epsilon: float) -> float:
    if not lam > 0:
        raise ValueError(f"gap must be positive, got {lam}")
    if not 0 < epsilon < 1:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    return (0.5 * log_inverse_gibbs_norm(model, beta) + math.log(1 / epsilon)) / lam


def one_d_bounds(model: StabilizerModel, bath: BathModel) -> tuple[float | None, float | None]:
    """(h*/4) e^{-4 beta J* wd} for open chains and (h*/4) e^{-8 beta J* wd} for rings."""
    jstar = float(max(abs(j) for j in model.couplings))
    hs = h_star(model, bath)
    try:
        wd = width(model)
        obc = hs / 4 * math.exp(-4 * bath.beta * jstar * wd)
    except ModelError:
        obc = None
    try:
        wd = width(model, periodic=True)
        pbc = hs / 4 * math.exp(-8 * bath.beta * jstar * wd)
    except ModelError:
        pbc = None
    return obc, pbc


def default_family(model: StabilizerModel) -> PathFamily:
    return PathFamily.css_string() if model.lattice is not None else PathFamily.fixed_order()


@dataclass
class BoundReport:
    beta: float
    epsilon_bar: Fraction
    exact: bool
    eta_star: int
    h_star: float
    delta_max: Fraction
    gen_bound: float
    beta_zero_floor: float
    special_bound: float | None = None
    c_beta: float | None = None
    c_beta_bound: float | None = None
    one_d_bounds: tuple[float | None, float | None] | None = None
    lambda_exact: float | None = None
    mixing_time: float | None = None
    family: str = ""
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def check(self, tol: float = VERIFY_TOL) -> None:
        self.failures = []
        if self.lambda_exact is None:
            return
        named = [("gen_bound", self.gen_bound), ("special_bound", self.special_bound)]
        for name, value in named:
            if value is not None and self.lambda_exact < value - tol:
                self.failures.append(f"{name}={value:.12g} exceeds lambda={self.lambda_exact:.12g}")

    def to_text(self) -> str:
        def fmt(v: object) -> str:
            if v is None:
                return "-"
            if isinstance(v, Fraction):
                return f"{v} ({float(v):.12g})"
            if isinstance(v, float):
                return f"{v:.12g}"
            return str(v)

        tag = "exact" if self.exact else "upper bound (bounds valid, possibly loose)"
        lines = [
            f"beta = {fmt(self.beta)}",
            f"epsilon_bar = {fmt(self.epsilon_bar)} [{tag}]",
            f"family = {self.family}",
            f"eta_star = {self.eta_star}",
            f"h_star = {fmt(self.h_star)}",
            f"delta_max = {fmt(self.delta_max)}",
            f"gen_bound = {fmt(self.gen_bound)}",
            f"special_bound = {fmt(self.special_bound)}",
            f"c_beta = {fmt(self.c_beta)}",
            f"c_beta_bound = {fmt(self.c_beta_bound)}",
            f"beta_zero_floor = {fmt(self.beta_zero_floor)}",
        ]
        if self.one_d_bounds is not None:
            lines.append(f"one_d_bounds = OBC {fmt(self.one_d_bounds[0])}, PBC {fmt(self.one_d_bounds[1])}")
        lines.append(f"lambda_exact = {fmt(self.lambda_exact)}")
        lines.append(f"t_mix_bound = {fmt(self.mixing_time)}")
        if self.lambda_exact is not None:
            lines.append("status = " + ("PASS" if self.passed else "FAIL: " + "; ".join(self.failures)))
        return "\n".join(lines)


def bound_report(
    model: StabilizerModel,
    bath: BathModel,
    barrier: BarrierReport,
    lambda_exact: float | None = None,
    family: PathFamily | None = None,
    with_c: bool | None = None,
    mixing_epsilon: float = math.exp(-0.5),
) -> BoundReport:
    """Assemble every bound at ``bath.beta`` from one barrier report."""
    hs = h_star(model, bath)
    special = special_bound(model, bath, barrier) if barrier.single_visit else None
    c_val = c_bound = None
    if with_c is None:
        with_c = model.n <= C_BETA_LIMIT and family is not None
    if with_c and family is not None:
        cb = c_beta(model, bath, family)
        c_val, c_bound = cb.value, cb.derived_bound
    obc, pbc = one_d_bounds(model, bath)
    rep = BoundReport(
        beta=bath.beta,
        epsilon_bar=barrier.barrier,
        exact=barrier.exact,
        eta_star=_check_report(barrier),
        h_star=hs,
        delta_max=model.max_bohr(),
        gen_bound=gen_bound(model, bath, barrier),
        beta_zero_floor=beta_zero_floor(bath),
        special_bound=special,
        c_beta=c_val,
        c_beta_bound=c_bound,
        one_d_bounds=(obc, pbc) if (obc is not None or pbc is not None) else None,
        lambda_exact=lambda_exact,
        mixing_time=mixing_time_bound(model, bath.beta, lambda_exact, mixing_epsilon) if lambda_exact else None,
        family=barrier.family or "",
    )
    rep.check()
    return rep


def barrier_for(model: StabilizerModel, family: PathFamily | None, exact: bool) -> BarrierReport:
    if exact:
        return generalized_barrier_exact(model, with_eta=True)
    return heuristic_barrier(model, family or default_family(model))


def verify(
    model: StabilizerModel,
    bath_kind: str,
    betas: Sequence[float],
    family: PathFamily | None = None,
    exact: bool = False,
    with_c: bool | None = None,
    workers: int | None = None,
) -> list[BoundReport]:
    """Exact gap against every bound, one report per beta (rows ordered as given)."""
    family = family or default_family(model)
    barrier = barrier_for(model, family, exact)

    def row(beta: float) -> BoundReport:
        bath = BathModel.named(bath_kind, beta)
        lam = spectral_gap(model, bath, workers=1).gap
        return bound_report(model, bath, barrier, lam, None if exact else family, with_c)

    return ordered_map(row, list(betas), workers)
