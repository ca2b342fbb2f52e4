import subprocess
import sys

import pytest

from almost_stable import formats
from almost_stable.cli import main
from almost_stable.stable import gale_shapley
from helpers import instance_from_seed, sample_instance

PATH_INSTANCE = "instance 2 2\na 1 : 1\na 2 : 1 2\nb 1 : 2 1\nb 2 : 2\n"
MCQ = "mcq 2\npart 1 : a b c\npart 2 : x y z\nedge a x\nedge b y\n"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    cap = capsys.readouterr()
    return code, dict(line.split("=", 1) for line in cap.out.splitlines() if "=" in line), cap


@pytest.fixture
def path_files(tmp_path):
    inst = tmp_path / "p.asm"
    inst.write_text(PATH_INSTANCE)
    mu = tmp_path / "mu.matching"
    mu.write_text("2 1\n")
    return inst, mu


def test_solve_stable(tmp_path, capsys):
    f = tmp_path / "s.asm"
    formats.write_instance(f, sample_instance())
    code, rep, _ = run(capsys, "solve-stable", "--instance", f)
    assert code == 0 and rep["size"] == "2" and rep["matching"] == "1:2,2:1"
    code, rep, _ = run(capsys, "solve-stable", "--instance", f, "--out", tmp_path / "m", "--proposing", "B")
    assert code == 0 and rep["certificate"] == str(tmp_path / "m")
    assert formats.read_matching(tmp_path / "m", sample_instance()).edges == {(1, 2), (2, 1)}


@pytest.mark.parametrize("mode", ["oracle", "random", "derand"])
def test_solve_lsasm_yes(path_files, tmp_path, capsys, mode):
    inst, mu = path_files
    cert = tmp_path / "eta.matching"
    code, rep, _ = run(
        capsys, "solve-lsasm", "--instance", inst, "--matching", mu, "-k", 1, "-q", 3, "-t", 1, "--mode", mode,
        "--out", cert,
    )
    assert code == 0 and rep["answer"] == "yes" and rep["size"] == "2"
    code, rep, _ = run(capsys, "verify-matching", "--instance", inst, "--matching", cert, "--mu", mu, "-k", 1, "-q", 3, "-t", 1)
    assert code == 0 and rep["valid"] == "yes" and rep["blocking"] == "1" and rep["sym_diff"] == "3"


@pytest.mark.parametrize("mode", ["oracle", "random", "derand"])
def test_solve_lsasm_no(path_files, capsys, mode):
    inst, mu = path_files
    code, rep, _ = run(
        capsys, "solve-lsasm", "--instance", inst, "--matching", mu, "-k", 0, "-q", 3, "-t", 1, "--mode", mode,
        "--reps", 100,
    )
    assert code == 1 and rep["answer"] == "no" and "certificate" not in rep


def test_reports_are_reproducible(tmp_path, capsys):
    inst = instance_from_seed(21, 6, 6, 3)
    formats.write_instance(tmp_path / "i.asm", inst)
    formats.write_matching(tmp_path / "mu", gale_shapley(inst))
    outs = []
    for _ in range(2):
        code, rep, _ = run(
            capsys, "solve-lsasm", "--instance", tmp_path / "i.asm", "--matching", tmp_path / "mu",
            "-k", 2, "-q", 4, "-t", 1, "--mode", "random", "--seed", 5, "--reps", 500,
        )
        rep.pop("wall_time")
        outs.append((code, rep))
    assert outs[0] == outs[1]


def test_input_errors(tmp_path, capsys):
    bad = tmp_path / "bad.asm"
    bad.write_text("instance 1 1\na 1 : 1\nb 1 :\n")
    code, _, cap = run(capsys, "solve-stable", "--instance", bad)
    assert code == 2 and len(cap.err.strip().splitlines()) == 1
    code, _, cap = run(capsys, "solve-stable", "--instance", tmp_path / "missing.asm")
    assert code == 2
    code, _, cap = run(capsys, "solve-lsasm", "--instance", bad)
    assert code == 2 and len(cap.err.strip().splitlines()) == 1
    code, _, cap = run(capsys, "frobnicate")
    assert code == 2 and cap.err.startswith("usage error")


def test_unstable_reference_is_input_error(path_files, tmp_path, capsys):
    inst, _ = path_files
    empty = tmp_path / "empty.matching"
    empty.write_text("")
    code, _, cap = run(capsys, "solve-lsasm", "--instance", inst, "--matching", empty, "-k", 1, "-q", 3, "-t", 1)
    assert code == 2 and "blocking" in cap.err


def test_asm_oracle(path_files, capsys):
    inst, _ = path_files
    code, rep, _ = run(capsys, "solve-asm-oracle", "--instance", inst, "-k", 1, "-t", 1)
    assert code == 0 and rep["stable_size"] == "1"
    code, rep, _ = run(capsys, "solve-asm-oracle", "--instance", inst, "-k", 0, "-t", 1)
    assert code == 1


def test_usfam(tmp_path, capsys):
    code, rep, _ = run(capsys, "usfam", "--n", 6, "--p", 2, "--q", 2, "--verify", "--out", tmp_path / "f")
    assert code == 0 and rep["verified"] == "yes"
    lines = (tmp_path / "f").read_text().splitlines()
    assert len(lines) == int(rep["sets"])
    code, _, cap = run(capsys, "usfam", "--n", 3, "--p", 1, "--q", 1, "--mode", "exhaustive")
    assert code == 0 and len(cap.out.splitlines()) == 8 and "sets=8" in cap.err
    code, _, _ = run(capsys, "usfam", "--n", 3, "--p", 2, "--q", 2)
    assert code == 2


@pytest.mark.parametrize(
    "kind,clique,counts", [("lsasm-from-mcq", "a,x", ("34", "14", "13")), ("asm-from-mcq", "b,y", ("86", "40", "29"))]
)
def test_gen_and_verify(tmp_path, capsys, kind, clique, counts):
    src = tmp_path / "g.mcq"
    src.write_text(MCQ)
    out = tmp_path / kind
    extra = ["--r", 2] if kind.startswith("asm") else []
    code, rep, _ = run(capsys, "gen", kind, "--mcq", src, "--out-dir", out, *extra)
    assert code == 0
    assert (rep["vertices"], rep["mu_size"], rep["q"]) == counts
    for name in ("instance.asm", "mu.matching", "params.txt", "maps.tsv", "source.mcq"):
        assert (out / name).exists()
    header, *rows = (out / "maps.tsv").read_text().splitlines()
    assert header.split("\t") == ["name", "side", "index", "role", "source"]
    assert len(rows) == int(rep["vertices"])
    code, rep, _ = run(capsys, "verify-reduction", "--dir", out, "--clique", clique)
    assert code == 0 and rep["checks_failed"] == "0"
    code, _, _ = run(capsys, "verify-reduction", "--dir", out, "--clique", "a,y")
    assert code == 2
    (out / "mu.matching").write_text("")
    code, rep, _ = run(capsys, "verify-reduction", "--dir", out)
    assert code == 1 and rep["checks_failed"] == "1"


def test_hidden_knapsack(capsys):
    code, rep, _ = run(capsys, "knapsack", "--items", "1,3,2", "2,1,2", "3,2,4", "--c1", 3, "--c2", 3, "--p", 4)
    assert code == 0 and rep["selection"] == "3"
    code, rep, _ = run(capsys, "knapsack", "--items", "2,1,3", "1,2,3", "--c1", 2, "--c2", 2, "--p", 6)
    assert code == 1
    code, _, _ = run(capsys, "knapsack", "--items", "1,2", "--c1", 1, "--c2", 1, "--p", 1)
    assert code == 2


def test_module_entry_point(tmp_path):
    f = tmp_path / "s.asm"
    formats.write_instance(f, sample_instance())
    res = subprocess.run(
        [sys.executable, "-m", "almost_stable", "solve-stable", "--instance", str(f)], capture_output=True, text=True
    )
    assert res.returncode == 0 and "size=2" in res.stdout
