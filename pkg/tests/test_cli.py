import json
from fractions import Fraction

import pytest

from windingseries.cli import EXIT_FAIL, EXIT_OK, EXIT_PRECISION, EXIT_USAGE, main, parse_tau


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_tau():
    assert parse_tau("i") == 1j
    assert parse_tau("0.5+1.2i") == 0.5 + 1.2j
    assert parse_tau("-1+2j") == -1 + 2j


def test_classes_json_layout(capsys):
    code, out, _ = run(capsys, "classes", "--dmax", "4", "--threads", "1")
    assert code == EXIT_OK
    rep = json.loads(out)
    assert rep["schema"] == 1 and rep["N"] == 1 and rep["Delta"] == -3
    rows = {r["d"]: r for r in rep["rows"]}
    assert sorted(rows) == [1, 2, 3, 4]
    assert rows[2]["classes"] == []
    assert rows[3]["D"] == 9 and set(rows[3]["chi"]) <= {-1, 0, 1} and rows[3]["classes"]


def test_classes_deterministic_across_threads(capsys):
    _, a, _ = run(capsys, "classes", "--dmax", "12", "--threads", "1")
    _, b, _ = run(capsys, "classes", "--dmax", "12", "--threads", "3")
    assert a == b


def test_classes_csv(capsys):
    code, out, _ = run(capsys, "classes", "--dmax", "3", "--format", "csv", "--threads", "1")
    lines = out.splitlines()
    assert code == EXIT_OK and lines[0] == "d,D,A,B,C,chi"
    assert all(line.startswith("3,9,") for line in lines[1:])


def test_series_constant_and_exponents(capsys):
    code, out, _ = run(capsys, "series", "--threads", "1")
    assert code == EXIT_OK
    rep = json.loads(out)
    assert rep["constant"] == "1/3"
    ds = [row["d"] for row in rep["G"]]
    assert ds[0] == 0 and all(d % 4 in (0, 3) for d in ds[1:])
    assert rep["G"][0]["coefficient"] == "1/3"
    first = rep["G"][1]
    assert first["d"] == 3 and abs(first["coefficient"] - 10 / 3) < 1e-6


def test_series_extension_keeps_shared_rows(capsys):
    _, a, _ = run(capsys, "series", "--dmax", "12", "--threads", "1")
    _, b, _ = run(capsys, "series", "--dmax", "16", "--threads", "1")
    ga, gb = json.loads(a)["G"], json.loads(b)["G"]
    assert gb[:len(ga)] == ga and len(gb) > len(ga)


def test_series_samples_and_file_output(tmp_path, capsys):
    path = tmp_path / "s.json"
    code, out, _ = run(capsys, "series", "--delta", "-4", "--r", "0", "--tau", "i", "--tau", "0.3+0.9i",
                       "--out", str(path), "--threads", "1")
    assert code == EXIT_OK and out == ""
    rep = json.loads(path.read_text())
    assert Fraction(rep["constant"]) == Fraction(1, 2)
    assert [s["tau"] for s in rep["samples"]] == [[0.0, 1.0], [0.3, 0.9]]


def test_usage_errors(capsys):
    assert run(capsys, "series", "--tol", "1")[0] == EXIT_USAGE
    assert run(capsys, "series", "--delta", "-12")[0] == EXIT_USAGE
    assert run(capsys, "series", "--delta", "-3", "--r", "0")[0] == EXIT_USAGE
    assert run(capsys, "nonsense")[0] == EXIT_USAGE
    assert run(capsys, "verify", "--only", "42")[0] == EXIT_USAGE


def test_precision_error(capsys):
    code, _, err = run(capsys, "series", "--tau", "0.1+0.01i")
    assert code == EXIT_PRECISION and "precision" in err


def test_io_error_names_path(tmp_path, capsys):
    bad = str(tmp_path / "missing" / "x.json")
    code, _, err = run(capsys, "classes", "--dmax", "3", "--out", bad, "--threads", "1")
    assert code == EXIT_FAIL and bad in err


def test_verify_reports_residuals(capsys):
    code, out, err = run(capsys, "verify", "--only", "1", "--only", "7")
    rep = json.loads(out)
    assert code == EXIT_OK and rep["passed"]
    assert [r["criterion"] for r in rep["results"]] == [1, 7]
    assert all("residual" in r for r in rep["results"])
    assert "criterion  7 PASS" in err


def test_verify_forced_failure_names_criterion(capsys):
    code, out, err = run(capsys, "verify", "--only", "7", "--inject-failure", "7")
    rep = json.loads(out)
    assert code == EXIT_FAIL
    assert rep["failed"] == [7]
    assert "criterion  7 FAIL" in err


def test_verify_csv(capsys):
    code, out, _ = run(capsys, "verify", "--only", "9", "--format", "csv")
    assert code == EXIT_OK
    assert out.splitlines()[0] == "criterion,name,passed,residual,threshold"
