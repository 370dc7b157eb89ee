"""Command-line front end: check, barrier, gap, bound, verify, sweep, mixing."""

from __future__ import annotations

import argparse
import io
import math
import sys
from fractions import Fraction
from typing import Sequence

from . import __version__
from .barrier import (
    EXACT_BARRIER_LIMIT,
    PathFamily,
    exact_energy_cost,
    generalized_barrier_exact,
    heuristic_barrier,
)
from .bounds import BoundError, bound_report, default_family, mixing_time_bound, verify
from .davies import BathError, BathModel, CosetAssembler, coset_representatives, spectral_gap
from .model import ModelError, SizeLimitError, StabilizerModel
from .modelfile import load_model
from .pauli import format_pauli, parse_pauli

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_LIMIT = 0, 1, 2, 3

CSV_COLUMNS = (
    "beta",
    "lambda_exact",
    "gen_bound",
    "special_bound",
    "epsilon_bar",
    "exact_flag",
    "eta_star",
    "h_star",
    "delta_max",
    "c_beta",
    "t_mix_bound",
)


def fmt(value: object) -> str:
    """12 significant digits for numbers; empty for absent values."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    return f"{float(value):.12g}"


def parse_grid(text: str) -> list[float]:
    """``start:stop:step`` (inclusive) or a comma-separated list."""
    try:
        if ":" in text:
            start, stop, step = (Fraction(p) for p in text.split(":"))
            if step <= 0 or stop < start:
                raise ValueError("need step > 0 and stop >= start")
            out, k = [], 0
            while start + k * step <= stop:
                out.append(float(start + k * step))
                k += 1
        else:
            out = [float(Fraction(p)) for p in text.split(",") if p.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"invalid beta grid {text!r}: {exc}") from None
    if not out:
        raise ValueError(f"empty beta grid {text!r}")
    if any(b < 0 for b in out):
        raise ValueError("beta must be non-negative")
    return out


def _family(args: argparse.Namespace, model: StabilizerModel) -> PathFamily:
    kind = getattr(args, "family", None)
    if kind in (None, "auto"):
        return default_family(model)
    if kind == "css":
        return PathFamily.css_string()
    order = getattr(args, "order", None)
    return PathFamily.fixed_order([int(s) for s in order.split(",")] if order else None)


def _bath(args: argparse.Namespace, beta: float) -> BathModel:
    return BathModel.named(args.bath, beta)


def cmd_check(args: argparse.Namespace, out: io.TextIOBase) -> int:
    model = load_model(args.model)
    eg = model.check_eg_zero()
    print(f"model {model.describe()}", file=out)
    print(f"N={model.n} M={model.m} r={model.rank} EG=0:{'yes' if eg else 'NO'}", file=out)
    print(f"valid_syndromes={model.syndrome_space.size} multiplicity={model.syndrome_space.multiplicity}", file=out)
    print(f"M={model.m} r={model.rank} Δ={model.max_bohr()}", file=out)
    return EXIT_OK if eg else EXIT_FAIL


def cmd_barrier(args: argparse.Namespace, out: io.TextIOBase) -> int:
    model = load_model(args.model)
    if args.target:
        target = parse_pauli(args.target)
        value, path = exact_energy_cost(target, model, limit=args.limit or 6)
        print(f"target = {format_pauli(target)}", file=out)
        print(f"epsilon = {value} ({float(value):.12g})", file=out)
        print(f"witness_path = {path}", file=out)
        return EXIT_OK
    if args.exact:
        report = generalized_barrier_exact(
            model, limit=args.limit or EXACT_BARRIER_LIMIT, per_target=bool(args.csv), with_eta=True, workers=args.threads
        )
    else:
        targets: str | int = args.sample if args.sample else "all"
        report = heuristic_barrier(model, _family(args, model), targets=targets, seed=args.seed, per_target=bool(args.csv))
    print(report.to_text(), file=out)
    if args.csv:
        with open(args.csv, "w", newline="\n", encoding="utf-8") as fh:
            fh.write(f"# model = {model.describe()}\n# seed = {args.seed}\n")
            fh.write("target,cost,bottleneck_prefix\n")
            for row in report.csv_rows():
                fh.write(",".join(row) + "\n")
    return EXIT_OK


def _dump_blocks(model: StabilizerModel, bath: BathModel, path: str) -> None:
    asm = CosetAssembler(model, bath)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# syndromes {' '.join(str(int(a)) for a in model.valid_syndromes)}\n")
        for rep in coset_representatives(model).representatives:
            fh.write("# dirichlet\n" + asm.dirichlet(rep).to_text() + "\n")
            fh.write("# variance\n" + asm.variance(rep).to_text() + "\n")


def cmd_gap(args: argparse.Namespace, out: io.TextIOBase) -> int:
    model = load_model(args.model)
    bath = _bath(args, args.beta)
    res = spectral_gap(model, bath, method=args.method, workers=args.threads)
    print(f"lambda = {fmt(res.gap)}", file=out)
    print(f"achieving_coset = {format_pauli(res.achieving_rep)}", file=out)
    print(f"method = {res.method} blocks = {res.n_blocks} residual = {res.residual:.3g} cutoff = {res.cutoff:g}", file=out)
    if args.dump_blocks:
        _dump_blocks(model, bath, args.dump_blocks)
    return EXIT_OK


def _barrier(args: argparse.Namespace, model: StabilizerModel):
    if args.exact:
        return generalized_barrier_exact(model, with_eta=True, workers=args.threads), None
    fam = _family(args, model)
    return heuristic_barrier(model, fam), fam


def cmd_bound(args: argparse.Namespace, out: io.TextIOBase) -> int:
    model = load_model(args.model)
    bath = _bath(args, args.beta)
    barrier, fam = _barrier(args, model)
    lam = spectral_gap(model, bath, workers=args.threads).gap if args.with_gap else None
    rep = bound_report(model, bath, barrier, lam, fam)
    print(rep.to_text(), file=out)
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_verify(args: argparse.Namespace, out: io.TextIOBase) -> int:
    model = load_model(args.model)
    betas = parse_grid(args.beta)
    fam = None if args.exact else _family(args, model)
    reports = verify(model, args.bath, betas, fam, exact=args.exact, workers=args.threads)
    ok = True
    for r in reports:
        status = "PASS" if r.passed else "FAIL"
        ok &= r.passed
        extra = f" special={fmt(r.special_bound)}" if r.special_bound is not None else ""
        print(f"{status} beta={fmt(r.beta)} lambda={fmt(r.lambda_exact)} gen={fmt(r.gen_bound)}{extra}", file=out)
        for f in r.failures:
            print(f"  {f}", file=out)
    print("overall: " + ("PASS" if ok else "FAIL"), file=out)
    return EXIT_OK if ok else EXIT_FAIL


def sweep_csv(model: StabilizerModel, args: argparse.Namespace) -> str:
    betas = parse_grid(args.beta)
    fam = None if args.exact else _family(args, model)
    reports = verify(model, args.bath, betas, fam, exact=args.exact, workers=args.threads)
    buf = io.StringIO()
    buf.write(f"# stabtherm {__version__} sweep\n")
    buf.write(f"# model = {model.describe()}\n")
    buf.write(f"# generators = {' '.join(model.gens.strings())}\n")
    buf.write(f"# couplings = {' '.join(str(j) for j in model.couplings)}\n")
    buf.write(f"# bath = {args.bath}\n# beta = {args.beta}\n")
    buf.write(f"# barrier = {'exact' if args.exact else 'family ' + (fam.description if fam else '')}\n")
    buf.write(f"# seed = {args.seed}\n")
    buf.write(",".join(CSV_COLUMNS) + "\n")
    for r in reports:
        row = [
            fmt(r.beta),
            fmt(r.lambda_exact),
            fmt(r.gen_bound),
            fmt(r.special_bound),
            fmt(r.epsilon_bar),
            fmt(r.exact),
            fmt(r.eta_star),
            fmt(r.h_star),
            fmt(r.delta_max),
            fmt(r.c_beta),
            fmt(r.mixing_time),
        ]
        buf.write(",".join(row) + "\n")
    return buf.getvalue()


def cmd_sweep(args: argparse.Namespace, out: io.TextIOBase) -> int:
    model = load_model(args.model)
    text = sweep_csv(model, args)
    if args.out:
        try:
            with open(args.out, "w", newline="\n", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            raise ValueError(f"cannot write {args.out}: {exc}") from None
    else:
        out.write(text)
    return EXIT_OK


def cmd_mixing(args: argparse.Namespace, out: io.TextIOBase) -> int:
    model = load_model(args.model)
    lam = args.gap
    source = "given"
    if lam is None:
        lam = spectral_gap(model, _bath(args, args.beta), workers=args.threads).gap
        source = "exact"
    t = mixing_time_bound(model, args.beta, lam, args.epsilon)
    print(f"lambda = {fmt(lam)} ({source})", file=out)
    print(f"t_mix({fmt(args.epsilon)}) <= {fmt(t)}", file=out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="stabtherm", description=__doc__)
    p.add_argument("--version", action="version", version=f"stabtherm {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp: argparse.ArgumentParser) -> None:
        sp.add_argument("model", help="TOML model file or builtin spec (ising:3, cluster:4, toric:2:2, random:3:2:7)")
        sp.add_argument("--threads", type=int, default=None, help="worker threads (default: $STABTHERM_WORKERS or 1)")
        sp.add_argument("--seed", type=int, default=0)

    def bathopt(sp: argparse.ArgumentParser) -> None:
        sp.add_argument("--bath", choices=("metropolis", "glauber"), default="metropolis")

    def familyopt(sp: argparse.ArgumentParser) -> None:
        sp.add_argument("--family", choices=("auto", "fixed", "css"), default="auto")
        sp.add_argument("--order", help="site ordering for the fixed family, e.g. 2,0,1")
        sp.add_argument("--exact", action="store_true", help="use the exact barrier and its witness paths")

    sp = sub.add_parser("check", help="validate a model and print its structure")
    common(sp)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("barrier", help="exact or family barrier")
    common(sp)
    familyopt(sp)
    sp.add_argument("--all", action="store_true", help="evaluate every target (default)")
    sp.add_argument("--sample", type=int, default=0, help="evaluate this many random targets instead")
    sp.add_argument("--target", help="exact cost of one target word")
    sp.add_argument("--limit", type=int, default=None, help="override the exhaustive size limit")
    sp.add_argument("--csv", help="write per-target rows here")
    sp.set_defaults(func=cmd_barrier)

    sp = sub.add_parser("gap", help="exact spectral gap")
    common(sp)
    bathopt(sp)
    sp.add_argument("--beta", type=float, required=True)
    sp.add_argument("--method", choices=("coset", "full"), default="coset")
    sp.add_argument("--dump-blocks", help="write every coset block to this file")
    sp.set_defaults(func=cmd_gap)

    sp = sub.add_parser("bound", help="all lower bounds at one beta")
    common(sp)
    bathopt(sp)
    familyopt(sp)
    sp.add_argument("--beta", type=float, required=True)
    sp.add_argument("--with-gap", action="store_true", help="also compute the exact gap and compare")
    sp.set_defaults(func=cmd_bound)

    for name, func, hlp in (("verify", cmd_verify, "exact gap >= bounds on a beta grid"), ("sweep", cmd_sweep, "CSV of bounds over a beta grid")):
        sp = sub.add_parser(name, help=hlp)
        common(sp)
        bathopt(sp)
        familyopt(sp)
        sp.add_argument("--beta", required=True, help="start:stop:step or a,b,c")
        if name == "sweep":
            sp.add_argument("--out", help="CSV path (default stdout)")
        sp.set_defaults(func=func)

    sp = sub.add_parser("mixing", help="mixing-time bound")
    common(sp)
    bathopt(sp)
    sp.add_argument("--beta", type=float, required=True)
    sp.add_argument("--epsilon", type=float, default=math.exp(-0.5))
    sp.add_argument("--gap", type=float, default=None, help="use this gap instead of the exact one")
    sp.set_defaults(func=cmd_mixing)
    return p


def main(argv: Sequence[str] | None = None, out: io.TextIOBase | None = None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args, out)
    except SizeLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except (ModelError, BathError, BoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
