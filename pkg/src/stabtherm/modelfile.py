"""Model files (TOML) and short builtin specs such as ``ising:3`` or ``toric:2:2``."""

from __future__ import annotations

import os
import sys
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .model import (
    ModelError,
    StabilizerModel,
    cluster_chain,
    ising_chain,
    random_commuting,
    to_fraction,
    toric_code,
)


def _line_of(text: str, key: str) -> int | None:
    for no, line in enumerate(text.splitlines(), start=1):
        if line.strip().startswith(key):
            return no
    return None


def _where(text: str, key: str) -> str:
    no = _line_of(text, key)
    return f"line {no}: " if no else ""


def build_builtin(kind: str, params: dict[str, Any]) -> StabilizerModel:
    kind = kind.lower()
    j = params.get("coupling", params.get("j", 1))
    if kind == "ising":
        return ising_chain(int(params["n"]), to_fraction(j), bool(params.get("periodic", False)))
    if kind == "cluster":
        return cluster_chain(int(params["n"]), to_fraction(j))
    if kind == "toric":
        return toric_code(int(params["lx"]), int(params["ly"]), to_fraction(j))
    if kind == "random":
        return random_commuting(int(params["n"]), int(params["m"]), int(params.get("seed", 0)))
    raise ModelError(f"unknown builtin kind {kind!r} (ising, cluster, toric, random)")


def parse_spec(spec: str) -> StabilizerModel:
    """``ising:N[:J[:pbc]]``, ``cluster:N[:J]``, ``toric:Lx:Ly[:J]``, ``random:N:M[:seed]``."""
    parts = spec.split(":")
    kind, args = parts[0].lower(), parts[1:]
    try:
        if kind == "ising":
            params: dict[str, Any] = {"n": args[0]}
            if len(args) > 1:
                params["coupling"] = args[1]
            if len(args) > 2:
                if args[2] not in ("pbc", "obc"):
                    raise ModelError(f"boundary must be pbc or obc, got {args[2]!r}")
                params["periodic"] = args[2] == "pbc"
        elif kind == "cluster":
            params = {"n": args[0]}
            if len(args) > 1:
                params["coupling"] = args[1]
        elif kind == "toric":
            params = {"lx": args[0], "ly": args[1]}
            if len(args) > 2:
                params["coupling"] = args[2]
        elif kind == "random":
            params = {"n": args[0], "m": args[1]}
            if len(args) > 2:
                params["seed"] = args[2]
        else:
            raise ModelError(f"unknown builtin {kind!r}")
        return build_builtin(kind, params)
    except (IndexError, ValueError) as exc:
        if isinstance(exc, ModelError):
            raise
        raise ModelError(f"bad builtin spec {spec!r}: {exc}") from None


def parse_model_text(text: str, default_name: str | None = None) -> StabilizerModel:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ModelError(f"model file syntax error: {exc}") from None
    name = data.get("name", default_name)
    has_builtin = "builtin" in data
    has_explicit = "generators" in data
    if has_builtin == has_explicit:
        raise ModelError("model file needs exactly one of 'generators' or a [builtin] table")
    if has_builtin:
        b = dict(data["builtin"])
        kind = b.pop("kind", None)
        if kind is None:
            raise ModelError(f"{_where(text, '[builtin]')}[builtin] table lacks 'kind'")
        try:
            model = build_builtin(str(kind), b)
        except KeyError as exc:
            raise ModelError(f"{_where(text, '[builtin]')}builtin {kind} needs parameter {exc.args[0]!r}") from None
        if name:
            model.name = str(name)
        return model
    gens = data["generators"]
    if not isinstance(gens, list) or not gens:
        raise ModelError(f"{_where(text, 'generators')}empty or malformed generator list")
    couplings = data.get("couplings")
    if couplings is None:
        raise ModelError("model file lacks 'couplings'")
    if not isinstance(couplings, list):
        raise ModelError(f"{_where(text, 'couplings')}couplings must be a list")
    if any(isinstance(c, float) for c in couplings):
        raise ModelError(f"{_where(text, 'couplings')}write couplings as strings or integers so they stay exact")
    if "n_qubits" in data:
        n = int(data["n_qubits"])
        for k, g in enumerate(gens):
            if len(str(g)) != n:
                raise ModelError(f"{_where(text, 'generators')}generator {k} has length {len(str(g))}, n_qubits = {n}")
    try:
        return StabilizerModel([str(g) for g in gens], couplings, name=str(name) if name else None)
    except ModelError as exc:
        raise ModelError(f"{_where(text, 'generators')}{exc}") from None


def load_model(source: str) -> StabilizerModel:
    """A path to a TOML model file, or a builtin spec string."""
    if os.path.exists(source):
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
        return parse_model_text(text, default_name=os.path.splitext(os.path.basename(source))[0])
    if ":" in source:
        return parse_spec(source)
    raise ModelError(f"no such model file: {source}")


def model_to_toml(model: StabilizerModel) -> str:
    gens = ", ".join(f'"{g}"' for g in model.gens.strings())
    coups = ", ".join(f'"{j}"' for j in model.couplings)
    lines = []
    if model.name:
        lines.append(f'name = "{model.name}"')
    lines += [f"n_qubits = {model.n}", f"generators = [{gens}]", f"couplings = [{coups}]"]
    return "\n".join(lines) + "\n"
