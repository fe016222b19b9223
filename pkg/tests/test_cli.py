import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from cutrecon.cli import main
from conftest import BELL, GHZ_CASCADE


@pytest.fixture
def files(tmp_path):
    (tmp_path / "bell.txt").write_text(BELL)
    (tmp_path / "ghz.txt").write_text(GHZ_CASCADE)
    (tmp_path / "broken.txt").write_text("qubits 2\nh 5\n")
    (tmp_path / "uncut.txt").write_text("qubits 2\nh 0\ncx 0 1\n")
    return tmp_path


def test_parse(files, capsys):
    assert main(["parse", str(files / "bell.txt")]) == 0
    assert json.loads(capsys.readouterr().out) == {"width": 2, "gates": 2, "cuts": [[0, 0]]}


def test_parse_error_exit_code(files, capsys):
    assert main(["parse", str(files / "broken.txt")]) == 2
    assert "line 2" in capsys.readouterr().err


def test_missing_file_exit_code(files):
    assert main(["parse", str(files / "nope.txt")]) == 2


def test_usage_exit_code(files):
    with pytest.raises(SystemExit) as info:
        main(["reconstruct", "--method", "bogus", "x", "-o", "y"])
    assert info.value.code == 1
    with pytest.raises(SystemExit) as info:
        main([])
    assert info.value.code == 1


def test_cut(files):
    out = files / "part.json"
    assert main(["cut", str(files / "ghz.txt"), "-o", str(out)]) == 0
    assert len(json.loads(out.read_text())["subcircuits"]) == 3
    assert main(["cut", str(files / "uncut.txt")]) == 2


@pytest.mark.parametrize("fmt", ["json", "bin"])
def test_simulate_reconstruct_compare(files, capsys, fmt):
    tdir = files / "t"
    assert main(["simulate", str(files / "ghz.txt"), "-o", str(tdir), "--format", fmt]) == 0
    paths = capsys.readouterr().out.split()
    assert len(paths) == 3
    exact = files / "exact.csv"
    assert main(["reconstruct", *paths, "--method", "exact", "-o", str(exact)]) == 0
    rows = list(csv.reader(open(exact)))
    assert rows[0] == ["bitstring", "weight"] and len(rows) == 9
    weights = {b: float(w) for b, w in rows[1:]}
    assert weights["000"] == pytest.approx(0.5) and weights["111"] == pytest.approx(0.5)
    diag = json.loads((files / "exact.csv.diagnostics.json").read_text())
    assert diag["negativity"]["raw_sum"] == pytest.approx(1)

    for method in ("mcmc", "mcmc-rand"):
        out = files / f"{method}.json"
        args = ["reconstruct", *paths, "--method", method, "-o", str(out),
                "--samples", "2000", "--chains", "2", "--seed", "3", "--burn-in", "0.1"]
        assert main(args) == 0
        doc = json.loads(out.read_text())
        assert doc["normalized"] and sum(doc["weights"].values()) == pytest.approx(1)
        assert set(doc["weights"]) <= {"000", "111"}
        diag = json.loads((files / f"{method}.json.diagnostics.json").read_text())
        assert len(diag["slice_counts"]) == 6 and len(diag["final"]["acceptance_rate"]) == 2

    capsys.readouterr()
    assert main(["compare", str(exact), str(files / "mcmc.json")]) == 0
    report = json.loads(capsys.readouterr().out)
    assert set(report) == {"avd_abs", "avd_literal", "tv"}


def test_simulate_shots(files, capsys):
    tdir = files / "s"
    assert main(["simulate", str(files / "bell.txt"), "-o", str(tdir), "--shots", "50", "--seed", "1"]) == 0
    header = json.loads((tdir / "tensor_0.json").read_text())["header"]
    assert header["mode"] == "shots" and header["shots"] == 50


def test_one_cut_rejects_randomized(files, capsys):
    tdir = files / "t"
    main(["simulate", str(files / "bell.txt"), "-o", str(tdir)])
    paths = capsys.readouterr().out.split()
    assert main(["reconstruct", *paths, "--method", "mcmc-rand", "-o", str(files / "o.csv")]) == 2


def test_numeric_failure_exit_code(files, capsys):
    # a tensor pair with no positive mass anywhere
    up = {"header": {"shape": [1, 2, 3], "output_wires": [], "terminals": [["a", 0]]}, "values": [0.0] * 6}
    down = {"header": {"shape": [2, 2, 3], "output_wires": [0], "terminals": [["e", 0]]}, "values": [0.0] * 12}
    (files / "u.json").write_text(json.dumps(up))
    (files / "d.json").write_text(json.dumps(down))
    args = ["reconstruct", str(files / "u.json"), str(files / "d.json"), "-o", str(files / "o.csv")]
    assert main(args + ["--method", "mcmc", "--samples", "50"]) == 3
    assert main(args + ["--method", "exact", "--normalize"]) == 3


def test_compare_unnormalized(files):
    (files / "p.csv").write_text("bitstring,weight\n0,0.7\n1,0.7\n")
    (files / "q.csv").write_text("bitstring,weight\n0,0.5\n1,0.5\n")
    assert main(["compare", str(files / "p.csv"), str(files / "q.csv")]) == 2


def test_sweep(files):
    out = files / "sweep.csv"
    args = ["sweep", "--cuts", "2", "--widths", "2-3", "--trials", "2", "--samples", "300", "-o", str(out)]
    assert main(args) == 0
    rows = list(csv.DictReader(open(out)))
    assert len(rows) == 2 * 2 * 3
    summary = list(csv.DictReader(open(files / "sweep.summary.csv")))
    assert len(summary) == 2 * 3


def test_module_entry_point(files):
    proc = subprocess.run([sys.executable, "-m", "cutrecon", "parse", str(files / "bell.txt")],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["width"] == 2
