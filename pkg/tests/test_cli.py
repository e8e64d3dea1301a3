import csv
import io
import json
import subprocess
import sys

import pytest

from kcmtest.cli import EXIT_DATA, EXIT_OK, EXIT_USAGE, TEST_COLUMNS, main
from kcmtest.dgp import DgpSpec, generate
from kcmtest.harness import TABLE_COLUMNS


@pytest.fixture
def data_csv(tmp_path):
    d = generate(DgpSpec(4, 3, 60), 1)
    p = tmp_path / "data.csv"
    with open(p, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["y", "x1", "x2", "x3"])
        for yi, xi in zip(d.y, d.X):
            w.writerow([yi, *xi])
    return p


def test_simulate_csv(capsys):
    rc = main(["simulate", "--dgp", "dgp4", "--q", "3", "--n", "60", "--reps", "2", "--boot", "19",
               "--stat", "basic,gp:trc"])
    assert rc == EXIT_OK
    rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
    assert rows[0] == list(TABLE_COLUMNS)
    assert [r[0] for r in rows[1:]] == ["basic", "gp:trc"]


def test_test_json(data_csv, capsys):
    assert main(["test", str(data_csv), "--boot", "19", "--stat", "basic,divergent:equal"]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert (doc["n"], doc["q"]) == (60, 3)
    assert [r["statistic"] for r in doc["results"]] == ["basic", "divergent:equal"]
    assert all(0 < r["p_value"] <= 1 for r in doc["results"])


def test_test_csv_to_file(data_csv, tmp_path, capsys):
    out = tmp_path / "res.csv"
    assert main(["test", str(data_csv), "--boot", "19", "--format", "csv", "--out", str(out)]) == EXIT_OK
    assert capsys.readouterr().out == ""
    rows = list(csv.reader(out.open()))
    assert rows[0] == list(TEST_COLUMNS) and len(rows) == 2


def test_sweep(capsys):
    rc = main(["sweep", "--dgp", "4", "--q", "3", "--n", "60", "--reps", "2", "--boot", "19",
               "--J", "1,3,999", "--format", "json"])
    assert rc == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert [r["J"] for r in doc["rows"]] == [1, 3]
    assert [s["J"] for s in doc["skipped"]] == [999]


@pytest.mark.parametrize("argv", [
    [],
    ["frobnicate"],
    ["simulate", "--reps", "many"],
    ["simulate", "--stat", "nonsense"],
    ["simulate", "--alpha", "2"],
    ["sweep", "--dgp", "1"],
])
def test_usage_errors(argv, capsys):
    try:
        rc = main(argv)
    except SystemExit as exc:
        rc = exc.code
    assert rc == EXIT_USAGE


@pytest.mark.parametrize("argv", [
    ["simulate", "--dgp", "dgp9"],
    ["simulate", "--dgp", "6", "--q", "5"],
    ["test", "/nonexistent/file.csv"],
])
def test_data_errors(argv, capsys):
    assert main(argv) == EXIT_DATA
    assert "data error" in capsys.readouterr().err


def test_bad_cell(tmp_path, capsys):
    p = tmp_path / "bad.csv"
    p.write_text("y,x\n1,2\n3,abc\n")
    assert main(["test", str(p)]) == EXIT_DATA
    assert "row 2, column 'x'" in capsys.readouterr().err


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "kcmtest", "simulate", "--q", "2", "--n", "40",
                        "--reps", "1", "--boot", "9"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.startswith("statistic,")
