from __future__ import annotations

import io
from pathlib import Path

import pytest

from stabtherm.cli import CSV_COLUMNS, main, parse_grid

ISING3 = """\
name = "ising3"
n_qubits = 3
generators = ["ZZI", "IZZ"]
couplings = ["1", "1"]
"""
ISING2 = """\
name = "ising2"
generators = ["ZZ"]
couplings = [1]
"""
TORIC = """\
name = "toric22"
[builtin]
kind = "toric"
lx = 2
ly = 2
coupling = "1"
"""


def run(*argv: str) -> tuple[int, str]:
    buf = io.StringIO()
    code = main(list(argv), buf)
    return code, buf.getvalue()


@pytest.fixture
def files(tmp_path: Path) -> dict[str, str]:
    out = {}
    for name, text in (("ising3", ISING3), ("ising2", ISING2), ("toric22", TORIC)):
        p = tmp_path / f"{name}.toml"
        p.write_text(text)
        out[name] = str(p)
    return out


def test_check(files):
    code, text = run("check", files["ising3"])
    assert code == 0
    assert "M=2 r=2 Δ=4" in text


def test_check_anticommuting_pair(tmp_path, capsys):
    p = tmp_path / "bad.toml"
    p.write_text('generators = ["XX", "ZI"]\ncouplings = [1, 1]\n')
    assert run("check", str(p))[0] == 2
    err = capsys.readouterr().err
    assert "0" in err and "1" in err and "anticommut" in err


def test_check_xx_zz_pair_commutes(tmp_path):
    # XX and ZZ commute; the pair is a valid (Bell-pair) model
    p = tmp_path / "bell.toml"
    p.write_text('generators = ["XX", "ZZ"]\ncouplings = [1, 1]\n')
    assert run("check", str(p))[0] == 0


def test_check_empty_list(tmp_path, capsys):
    p = tmp_path / "empty.toml"
    p.write_text("generators = []\ncouplings = []\n")
    assert run("check", str(p))[0] == 2
    assert "error" in capsys.readouterr().err


def test_syntax_error_has_line_number(tmp_path, capsys):
    p = tmp_path / "broken.toml"
    p.write_text('name = "x"\ngenerators = ["ZZ"\ncouplings = [1]\n')
    assert run("check", str(p))[0] == 2
    assert "line" in capsys.readouterr().err


def test_builtin_spec_argument():
    code, text = run("check", "cluster:4")
    assert code == 0 and "N=4" in text


def test_barrier_exact(files):
    code, text = run("barrier", files["ising3"], "--exact")
    assert code == 0
    assert "epsilon_bar = 2 " in text and "exact = true" in text
    assert "witness_path = " in text


def test_barrier_target(files):
    code, text = run("barrier", files["ising3"], "--target", "XXX")
    assert code == 0 and "epsilon = 2 " in text


def test_barrier_css_toric(files, tmp_path):
    csv = tmp_path / "targets.csv"
    code, text = run("barrier", files["toric22"], "--family", "css", "--all", "--csv", str(csv))
    assert code == 0
    assert "epsilon_bar_upper = 4 " in text and "eta_star = 16" in text
    rows = [r for r in csv.read_text().splitlines() if not r.startswith("#")]
    assert rows[0] == "target,cost,bottleneck_prefix" and len(rows) == 4**8 + 1


def test_barrier_size_refusal(capsys):
    assert run("barrier", "ising:10", "--exact")[0] == 3
    assert "limit" in capsys.readouterr().err


def test_gap(files, tmp_path):
    code, text = run("gap", files["ising2"], "--beta", "0", "--bath", "metropolis")
    assert code == 0 and "lambda = 4\n" in text
    dump = tmp_path / "blocks.txt"
    code, _ = run("gap", files["ising2"], "--beta", "1", "--dump-blocks", str(dump))
    assert code == 0 and dump.read_text().count("# dirichlet") == 8


def test_gap_methods_agree(files):
    _, a = run("gap", files["ising3"], "--beta", "1", "--bath", "glauber")
    _, b = run("gap", files["ising3"], "--beta", "1", "--bath", "glauber", "--method", "full")
    assert float(a.split()[2]) == pytest.approx(float(b.split()[2]), abs=1e-10)


def test_bound_and_verify(files):
    code, text = run("bound", files["ising3"], "--beta", "1", "--with-gap")
    assert code == 0 and "status = PASS" in text
    code, text = run("verify", files["ising3"], "--beta", "0,0.5,1,2")
    assert code == 0 and text.count("PASS beta=") == 4


def test_mixing(files):
    code, text = run("mixing", files["ising2"], "--beta", "0", "--gap", "4")
    assert code == 0 and "t_mix(0.606530659713) <= 0.298286795" in text
    assert run("mixing", files["ising2"], "--beta", "0", "--gap", "0")[0] == 2


def test_sweep(files, tmp_path):
    out = tmp_path / "run.csv"
    code, _ = run("sweep", files["toric22"], "--beta", "0:1:0.25", "--out", str(out), "--seed", "7")
    assert code == 0
    text = out.read_text()
    header = [l for l in text.splitlines() if l.startswith("#")]
    body = [l for l in text.splitlines() if not l.startswith("#")]
    assert any("seed = 7" in h for h in header) and any("bath = metropolis" in h for h in header)
    assert body[0] == ",".join(CSV_COLUMNS)
    assert len(body) == 6
    first = body[1].split(",")
    assert len(first) == len(CSV_COLUMNS)
    assert first[CSV_COLUMNS.index("special_bound")] == ""  # css paths revisit sites
    assert first[CSV_COLUMNS.index("c_beta")] == ""
    assert first[CSV_COLUMNS.index("exact_flag")] == "false"
    assert "\r" not in text


def test_sweep_thread_determinism(files, tmp_path):
    bodies = []
    for threads in ("1", "3"):
        out = tmp_path / f"t{threads}.csv"
        assert run("sweep", files["ising3"], "--beta", "0:2:0.5", "--threads", threads, "--out", str(out))[0] == 0
        bodies.append(out.read_bytes())
    assert bodies[0] == bodies[1]


def test_bad_inputs(files, tmp_path):
    assert run("sweep", files["ising3"], "--beta", "1:0:0.5")[0] == 2
    assert run("sweep", files["ising3"], "--beta", "0,1", "--out", str(tmp_path / "no" / "x.csv"))[0] == 2
    assert run("check", str(tmp_path / "missing.toml"))[0] == 2
    assert run("nonsense")[0] == 2


def test_parse_grid():
    assert parse_grid("0:1:0.25") == [0, 0.25, 0.5, 0.75, 1.0]
    assert parse_grid("0:0.3:0.1") == pytest.approx([0, 0.1, 0.2, 0.3])
    assert parse_grid("2,0.5") == [2.0, 0.5]
    for bad in ("", "0:1:0", "-1,2", "a:b:c"):
        with pytest.raises(ValueError):
            parse_grid(bad)
