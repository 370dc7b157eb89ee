"""The eight primary acceptance criteria, one pass/fail line each."""

from __future__ import annotations

import io
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from stabtherm.barrier import PathFamily, generalized_barrier_exact, heuristic_barrier, width
from stabtherm.bounds import beta_zero_floor, c_beta, gen_bound, h_star, verify
from stabtherm.cli import main
from stabtherm.davies import (
    BathModel,
    CosetAssembler,
    all_block_eigenvalues,
    coset_representatives,
    detailed_balance_check,
    full_generator,
    random_hermitian,
    realized_frequencies,
    spectral_gap,
    support_bound_canonical,
)
from stabtherm.model import cluster_chain, ising_chain, random_commuting, toric_code
from stabtherm.pauli import PauliWord

MARGIN = 1e-9
FIXED = PathFamily.fixed_order()


def random_models() -> list:
    out = []
    for k in range(10):
        n = 2 + k % 2
        out.append(random_commuting(n, 1 + (k // 2) % n, seed=k))
    return out


def named_models(max_n: int) -> list:
    out = [ising_chain(n) for n in range(2, max_n + 1)]
    out += [ising_chain(n, periodic=True) for n in range(3, max_n + 1)]
    out += [cluster_chain(n) for n in range(3, max_n + 1)]
    return out


def _label(model) -> str:
    return model.name or " ".join(str(g) for g in model.generators)


def report(record, number: int, title: str, failures: list[str], detail: str) -> None:
    status = "PASS" if not failures else "FAIL"
    record(f"criterion {number} [{status}] {title}: {detail}")
    for f in failures[:5]:
        record(f"criterion {number}   failure: {f}")


def test_criterion_1_bound_validity(record_acceptance):
    start = time.perf_counter()
    models = [ising_chain(2), ising_chain(3), ising_chain(4), cluster_chain(3), cluster_chain(4), toric_code(2, 2)]
    models += random_models()
    failures, rows, worst = [], 0, math.inf
    for model in models:
        for kind in ("metropolis", "glauber"):
            for r in verify(model, kind, [0.0, 0.3, 1.0, 2.0], workers=4):
                rows += 1
                margins = [r.lambda_exact - r.gen_bound]
                if r.special_bound is not None:
                    margins.append(r.lambda_exact - r.special_bound)
                worst = min(worst, *margins)
                if min(margins) < -MARGIN:
                    failures.append(f"{_label(model)} {kind} beta={r.beta}: margin {min(margins):.3g}")
    elapsed = time.perf_counter() - start
    if elapsed > 300:
        failures.append(f"runtime {elapsed:.0f}s exceeds 300s")
    report(record_acceptance, 1, "bound validity sweep", failures, f"{rows} rows, worst margin {worst:.3g}, {elapsed:.1f}s")
    assert not failures


def test_criterion_2_infinite_temperature(record_acceptance):
    failures, count = [], 0
    for model in named_models(4) + random_models():
        for kind, expect in (("metropolis", 4.0), ("glauber", 2.0)):
            bath = BathModel.named(kind, 0.0)
            lam = spectral_gap(model, bath).gap
            count += 1
            if abs(lam - 4 * bath.rate(0)) > 1e-9 or abs(lam - expect) > 1e-9:
                failures.append(f"{_label(model)} {kind}: lambda={lam!r}")
            if lam < beta_zero_floor(bath) - MARGIN or lam < 0.75 * h_star(model, bath) - MARGIN:
                failures.append(f"{_label(model)} {kind}: below 3/4 h*")
    report(record_acceptance, 2, "infinite-temperature gap", failures, f"{count} model/bath pairs at 4 h(0)")
    assert not failures


def _coset_coefficients(full, reps):
    bases = []
    for rep in reps:
        mats = full.coset_basis(rep)
        bases.append(np.stack([m.reshape(-1) for m in mats], axis=1))
    return bases


def test_criterion_3_block_oracle(record_acceptance):
    models = [ising_chain(2), ising_chain(3), ising_chain(3, periodic=True), cluster_chain(3)] + random_models()[:4]
    failures, worst_form, worst_spec = [], 0.0, 0.0
    rng = np.random.default_rng(2024)
    for model in models:
        for bath in (BathModel.metropolis(0.7), BathModel.glauber(1.3)):
            full = full_generator(model, bath)
            asm = CosetAssembler(model, bath)
            reps = coset_representatives(model).representatives
            bases = _coset_coefficients(full, reps)
            blocks = [(asm.dirichlet(r).matrix, asm.variance(r).matrix) for r in reps]
            dim = 2**model.n
            for _ in range(20):
                f = random_hermitian(dim, rng)
                e_sum = v_sum = 0.0
                for basis, (dmat, vmat) in zip(bases, blocks):
                    c = np.linalg.lstsq(basis, f.reshape(-1), rcond=None)[0]
                    e_sum += np.real(c.conj() @ dmat @ c)
                    v_sum += np.real(c.conj() @ vmat @ c)
                err = max(abs(e_sum - full.dirichlet_form(f)), abs(v_sum - full.variance(f)))
                worst_form = max(worst_form, err)
                if err > 1e-10:
                    failures.append(f"{_label(model)} {bath.kind}: form mismatch {err:.3g}")
            spec_full = full.spectrum()
            spec_blocks = all_block_eigenvalues(model, bath)
            if spec_full.shape != spec_blocks.shape:
                failures.append(f"{_label(model)} {bath.kind}: spectrum sizes {spec_full.shape} vs {spec_blocks.shape}")
                continue
            err = float(np.max(np.abs(spec_full - spec_blocks)))
            worst_spec = max(worst_spec, err)
            if err > 1e-8:
                failures.append(f"{_label(model)} {bath.kind}: spectrum mismatch {err:.3g}")
    report(record_acceptance, 3, "block-decomposition oracle", failures, f"forms within {worst_form:.2g}, spectra within {worst_spec:.2g}")
    assert not failures


def test_criterion_4_exact_barriers(record_acceptance):
    failures, seen = [], []
    for n in (2, 3, 4, 5):
        for j in ((1, Fraction(1, 2)) if n < 5 else (1,)):
            value = generalized_barrier_exact(ising_chain(n, j)).barrier
            seen.append(f"I{n}:{value}")
            if value != 2 * Fraction(j):
                failures.append(f"ising N={n} J={j}: exact {value}")
    for n in (2, 3, 4, 5):
        model = ising_chain(n)
        wd = width(model)
        value = heuristic_barrier(model, FIXED).barrier
        if wd != 1 or value != 2 * wd:
            failures.append(f"ising N={n}: fixed-order {value}, wd={wd}")
    for n in (3, 4, 5):
        model = cluster_chain(n)
        wd = width(model)
        value = heuristic_barrier(model, FIXED).barrier
        seen.append(f"C{n}:{value}")
        # N = 3 has the single term ZXZ, so no bond is shared by two terms
        if wd != (1 if n == 3 else 2) or value > 4:
            failures.append(f"cluster N={n}: fixed-order {value}, wd={wd}")
    report(record_acceptance, 4, "exact barrier values", failures, " ".join(seen))
    assert not failures


def test_criterion_5_toric_reproduction(record_acceptance):
    start = time.perf_counter()
    model = toric_code(2, 2)
    rep = heuristic_barrier(model, PathFamily.css_string())
    failures = []
    if rep.n_targets != 4**8:
        failures.append(f"only {rep.n_targets} targets")
    if rep.barrier != 2:
        failures.append(f"css epsilon' = {rep.barrier}, expected 2J (witness {rep.witness_target})")
    if rep.eta_star is None or rep.eta_star > 16:
        failures.append(f"eta* = {rep.eta_star}")
    worst = 0.0
    for beta in (0.0, 0.5, 1.0, 2.0):
        bath = BathModel.metropolis(beta)
        target = h_star(model, bath) / (8 * model.n) * math.exp(-4 * beta)
        value = gen_bound(model, bath, rep)
        rel = abs(value - target) / target
        worst = max(worst, rel)
        if rel > 1e-12:
            failures.append(f"beta={beta}: gen_bound {value:.6g} vs transcription {target:.6g}")
    elapsed = time.perf_counter() - start
    if elapsed > 60:
        failures.append(f"runtime {elapsed:.0f}s")
    detail = f"epsilon'={rep.barrier} eta*={rep.eta_star}, worst relative deviation {worst:.3g}, {elapsed:.1f}s"
    report(record_acceptance, 5, "toric reproduction", failures, detail)
    assert not failures


def test_criterion_6_generator_battery(record_acceptance):
    models = [ising_chain(2), ising_chain(3), cluster_chain(3), ising_chain(3, periodic=True)] + random_models()
    failures, worst_db, worst_fp, worst_kms = [], 0.0, 0.0, 0.0
    for model in models:
        for kind in ("metropolis", "glauber"):
            for beta in (0.0, 1.0):
                bath = BathModel.named(kind, beta)
                db = detailed_balance_check(model, bath, trials=10, seed=11)
                fp = full_generator(model, bath).fixed_point_residual()
                kms = bath.kms_residual(realized_frequencies(model))
                worst_db, worst_fp, worst_kms = max(worst_db, db), max(worst_fp, fp), max(worst_kms, kms)
                if db > 1e-10 or fp > 1e-10:
                    failures.append(f"{_label(model)} {kind} beta={beta}: db={db:.3g} fp={fp:.3g}")
                if kms > 1e-14:
                    failures.append(f"{_label(model)} {kind} beta={beta}: KMS {kms:.3g}")
    n_blocks = 0
    for model in models + [cluster_chain(4), toric_code(2, 2)]:
        bath = BathModel.glauber(1.0)
        asm = CosetAssembler(model, bath)
        stab = [g.label for g in model.generators]
        for i, rep in enumerate(coset_representatives(model).representatives):
            d, v = asm.dirichlet(rep), asm.variance(rep)
            n_blocks += 1
            scale = max(1.0, float(np.abs(d.matrix).max()), float(np.abs(v.matrix).max()))
            if d.asymmetry > 1e-12 * scale or not np.allclose(v.matrix, v.matrix.T, atol=1e-12 * scale, rtol=0):
                failures.append(f"{_label(model)} {rep}: not symmetric")
            if min(np.linalg.eigvalsh(d.matrix).min(), np.linalg.eigvalsh(v.matrix).min()) < -1e-10 * scale:
                failures.append(f"{_label(model)} {rep}: not PSD")
            if i % 7 == 0:
                other = PauliWord.from_label(model.n, rep.label ^ stab[i % len(stab)])
                if not (
                    np.array_equal(d.in_basis_of(other, model), asm.dirichlet(other).matrix)
                    and np.array_equal(v.in_basis_of(other, model), asm.variance(other).matrix)
                ):
                    failures.append(f"{_label(model)} {rep}: representative dependence")
    detail = f"db<={worst_db:.2g} fp<={worst_fp:.2g} kms<={worst_kms:.2g}, {n_blocks} blocks checked"
    report(record_acceptance, 6, "generator correctness battery", failures, detail)
    assert not failures


def test_criterion_7_canonical_paths(record_acceptance):
    failures, notes = [], []
    model = ising_chain(2)
    for beta in (0.0, 1.0):
        bath = BathModel.metropolis(beta)
        tau = support_bound_canonical(model, bath, FIXED)
        lam = spectral_gap(model, bath).gap
        notes.append(f"tau({beta})={tau:.4g}>=1/lambda={1 / lam:.4g}")
        if tau < 1 / lam - MARGIN:
            failures.append(f"beta={beta}: tau {tau} < 1/lambda {1 / lam}")
    small = [ising_chain(2), ising_chain(3), cluster_chain(3), ising_chain(3, periodic=True)] + random_models()
    c0_max = 0.0
    for m in small:
        eta = heuristic_barrier(m, FIXED).eta_star
        for kind in ("metropolis", "glauber"):
            for beta in (0.0, 0.5, 2.0):
                c = c_beta(m, BathModel.named(kind, beta), FIXED).value
                if beta == 0:
                    c0_max = max(c0_max, c)
                    if c > 1 / 3 + 1e-12:
                        failures.append(f"{_label(m)}: C(0)={c}")
                if not 0 < c <= eta + 1e-12:
                    failures.append(f"{_label(m)} {kind} beta={beta}: C={c} outside (0, {eta}]")
    notes.append(f"max C(0)={c0_max:.4g}")
    report(record_acceptance, 7, "canonical-paths machinery", failures, ", ".join(notes))
    assert not failures


def test_criterion_8_determinism(record_acceptance, tmp_path):
    failures = []
    bodies = {}
    for spec in ("toric:2:2", "ising:4"):
        for threads in ("1", "3"):
            out = tmp_path / f"{spec.replace(':', '_')}_{threads}.csv"
            code = main(["sweep", spec, "--beta", "0:1:0.25", "--threads", threads, "--seed", "3", "--out", str(out)], io.StringIO())
            if code != 0:
                failures.append(f"{spec} threads={threads}: exit {code}")
                continue
            bodies[(spec, threads)] = out.read_bytes()
        if bodies.get((spec, "1")) != bodies.get((spec, "3")):
            failures.append(f"{spec}: CSV differs between 1 and 3 threads")
    rows = sum(len([l for l in b.splitlines() if not l.startswith(b"#")]) - 1 for b in bodies.values())
    report(record_acceptance, 8, "sweep determinism", failures, f"{len(bodies)} runs, {rows} data rows, byte-identical across threads")
    assert not failures
