import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from xycorr import analysis as A
from xycorr import cli
from xycorr.errors import QuadratureError
from xycorr.xy import XYParams


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_sweep_writes_header_and_rows(tmp_path):
    out = tmp_path / "min.csv"
    code = cli.main(["sweep", "--measure", "MIN", "--gamma", "1", "--kT", "0", "--r", "1",
                     "--lambda", "0:2:401", "--out", str(out)])
    assert code == 0
    rows = _rows(out)
    assert rows[0] == ["lambda", "gamma", "kT", "r", "measure", "value"]
    assert len(rows) == 402
    lam = [float(r[0]) for r in rows[1:]]
    assert lam == sorted(lam) and lam[0] == 0.0 and lam[-1] == 2.0
    vals = np.array([float(r[5]) for r in rows[1:]])
    # zero at the trivial end, single hump peaking in the ordered phase
    assert vals[0] == 0 and vals.argmax() > 200


def test_round_trip_matches_series(tmp_path):
    out = tmp_path / "s.csv"
    cli.main(["sweep", "--measure", "WYSIM,concurrence", "--gamma", "0.5", "--kT", "0.1",
              "--lambda", "0.5:1.5:11", "--out", str(out)])
    series = A.sweep_many(["WYSIM", "concurrence"], XYParams.from_kT(1.0, 0.5, 0.1),
                          A.parse_grid("0.5:1.5:11"))
    rows = _rows(out)[1:]
    assert [r[4] for r in rows] == ["WYSIM"] * 11 + ["concurrence"] * 11
    for r in rows:
        s = series[r[4]]
        i = int(np.argmin(np.abs(s.grid - float(r[0]))))
        assert float(r[5]) == float(f"{s.values[i]:.12g}")


def test_byte_identical_reruns(tmp_path):
    args = ["derivative", "--measure", "OMQC", "--measure", "MIN", "--gamma", "1", "--kT", "0.05",
            "--lambda", "0.8:1.2:21", "--order", "2"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli.main(args + ["--out", str(a)]) == 0
    assert cli.main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    rows = _rows(a)
    assert rows[0][-1] == "derivative_order"
    assert {r[-1] for r in rows[1:]} == {"2"}


def test_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"gamma": 0.5, "kT": 0.2, "lambda": "1:2:3", "measure": ["MIN"]}))
    out = tmp_path / "o.csv"
    assert cli.main(["sweep", "--config", str(cfg), "--gamma", "0.25", "--out", str(out)]) == 0
    rows = _rows(out)[1:]
    assert [r[1] for r in rows] == ["0.25"] * 3
    assert [r[2] for r in rows] == ["0.2"] * 3


def test_config_unknown_key(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"gama": 0.5}))
    assert cli.main(["sweep", "--config", str(cfg), "--measure", "MIN"]) == 1


def test_plot_script_references_csv(tmp_path):
    out = tmp_path / "p.csv"
    assert cli.main(["sweep", "--measure", "MIN,OMQC", "--lambda", "0:2:5", "--out", str(out),
                     "--format", "csv+plotscript"]) == 0
    gp = (tmp_path / "p.csv.gp").read_text()
    assert str(out) in gp and "'MIN'" in gp and "'OMQC'" in gp
    assert "0.5," not in gp


def test_plot_script_needs_file_output():
    assert cli.main(["sweep", "--measure", "MIN", "--lambda", "0:1:5", "--format", "csv+plotscript"]) == 1


@pytest.mark.parametrize("argv", [
    ["sweep", "--lambda", "0:1:5"],
    ["sweep", "--measure", "bogus"],
    ["sweep", "--measure", "MIN", "--lambda", "1:0:5"],
    ["sweep", "--measure", "MIN", "--gamma", "2"],
    ["frobnicate"],
    ["sweep", "--unknown-flag"],
])
def test_usage_errors_exit_one(argv, capsys):
    assert cli.main(argv) == 1
    err = capsys.readouterr().err
    assert "error" in err


def test_unknown_measure_lists_valid_names(capsys):
    cli.main(["sweep", "--measure", "bogus"])
    assert "MIN, WYSIM" in capsys.readouterr().err


def test_numerical_failure_exits_two(monkeypatch, capsys):
    def boom(p, *a, **k):
        raise QuadratureError("no convergence", estimate=None, error=None)

    monkeypatch.setattr(A, "GTable", boom)
    assert cli.main(["sweep", "--measure", "MIN", "--lambda", "0.7:1:3"]) == 2
    assert "lam=0.7" in capsys.readouterr().err


def test_estimate_cp_row(capsys):
    assert cli.main(["estimate-cp", "--measure", "WYSIM", "--gamma", "0.5", "--kT", "0.05", "--r", "1"]) == 0
    rows = list(csv.reader(capsys.readouterr().out.splitlines()))
    assert rows[0] == cli.FEATURE_HEADER
    assert len(rows) == 2 and rows[1][:2] == ["WYSIM", "extremum"]
    assert 0.8 <= float(rows[1][2]) <= 1.3


def test_long_range_rows(capsys):
    assert cli.main(["long-range", "--measure", "MIN", "--gamma", "1", "--kT", "0.1",
                     "--lambda", "1.5", "--r-max", "5"]) == 0
    rows = list(csv.reader(capsys.readouterr().out.splitlines()))
    assert [r[3] for r in rows[1:]] == ["1", "2", "3", "4", "5"]
    assert {r[0] for r in rows[1:]} == {"1.5"}


def test_detect_factorization_and_lqu_track(capsys):
    assert cli.main(["detect-factorization", "--gamma", "0.5", "--lambda", "1:1.3:151"]) == 0
    rows = list(csv.reader(capsys.readouterr().out.splitlines()))
    conc = [r for r in rows[1:] if r[0] == "concurrence"]
    assert len(conc) == 1 and abs(float(conc[0][2]) - 2 / 3 ** 0.5) < 1e-6
    assert cli.main(["lqu-track", "--gamma", "0.5", "--lambda", "0.9:1.2:151"]) == 0
    rows = list(csv.reader(capsys.readouterr().out.splitlines()))
    assert "optimizer-switch" in {r[1] for r in rows[1:]}


def test_ed_validate_table(capsys):
    code = cli.main(["ed-validate", "--n-spins", "6"])
    lines = capsys.readouterr().out.splitlines()
    results = [l.split()[-1] for l in lines[2:]]
    assert len(results) == 12 and set(results) <= {"PASS", "FAIL"}
    assert code == (0 if all(r == "PASS" for r in results) else 2)


def test_selftest_small(capsys):
    assert cli.main(["selftest", "--n-states", "20"]) == 0
    assert all(l.startswith("PASS") for l in capsys.readouterr().out.splitlines())


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "xycorr", "sweep", "--measure", "MI", "--lambda", "0:1:3"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == "lambda,gamma,kT,r,measure,value"
