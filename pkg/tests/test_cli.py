import json
import subprocess
import sys

import pytest

from painlevekit.cli import main

GOLDEN = [
    (["analyze", "--system", "steady", "--n", "9"], 0),
    (["analyze", "--system", "steady", "--n", "16", "--format", "md"], 0),
    (["analyze", "--system", "steady", "--n", "2"], 3),
    (["analyze", "--system", "expanding", "--n", "1", "--lambda", "1"], 3),
    (["analyze", "--file", "missing.ode"], 2),
    (["analyze", "--system", "steady"], 2),
    (["analyze", "--system", "expanding", "--n", "3", "--lambda", "0.5"], 2),
    (["scan", "--system", "steady", "--n-min", "5", "--n-max", "2"], 2),
    (["series", "--system", "steady", "--n", "4", "--branch", "minus", "--order", "6",
      "--param", "s=1"], 0),
    (["series", "--system", "steady", "--n", "4", "--branch", "nope"], 2),
    (["validate", "--system", "steady", "--n", "4", "--branch", "minus", "--order", "40"], 0),
    (["validate", "--system", "steady", "--n", "4", "--order", "3"], 3),
]


@pytest.mark.parametrize("argv, code", GOLDEN, ids=[" ".join(a) for a, _ in GOLDEN])
def test_exit_codes(argv, code, tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    assert main(argv) == code


def _json(capsys, argv):
    assert main(argv) in (0, 3)
    return json.loads(capsys.readouterr().out)


def test_analyze_steady_nine(capsys):
    rep = _json(capsys, ["analyze", "--system", "steady", "--n", "9"])
    assert rep["verdict"] == "strong"
    minus = next(b for b in rep["branches"] if b["label"] == "minus")
    top = [r for r in minus["resonances"] if r["class"] == "Integer"]
    assert top[0]["step"] == 3 and top[0]["nu"] == {"a": "3", "b": "0", "d": 9}
    assert minus["leading_coeffs_str"] == ["1/2", "3/2"]


def test_analyze_expanding_one_notes_partial_family(capsys):
    rep = _json(capsys, ["analyze", "--system", "expanding", "--n", "1", "--lambda", "1"])
    assert rep["verdict"] == "fail"
    eq = next(b for b in rep["branches"] if b["label"] == "equal+")
    assert eq["status"] == "PartialFamily"
    assert "2 free parameters of 3" in " ".join(eq["notes"])


def test_analyze_custom_file(tmp_path, capsys):
    path = tmp_path / "duffing.ode"
    path.write_text("vars: x, y\nx' = y\ny' = 2*x^3\n", encoding="utf-8")
    # exponents below -1 are outside the default search box, so nothing is found
    rep = _json(capsys, ["analyze", "--file", str(path)])
    assert rep["verdict"] == "fail" and rep["branches"] == []
    rep = _json(capsys, ["analyze", "--file", str(path), "--exp-min", "-2"])
    assert rep["verdict"] == "strong"
    assert [b["exponents"] for b in rep["branches"]] == [["-1", "-2"], ["-1", "-2"]]


def test_analyze_bad_file_reports_position(tmp_path, capsys):
    path = tmp_path / "bad.ode"
    path.write_text("vars: x\nx' = 1/x\n", encoding="utf-8")
    assert main(["analyze", "--file", str(path)]) == 2
    assert "line 2, col 8" in capsys.readouterr().err


def test_markdown_report_has_factored_determinant(capsys):
    main(["analyze", "--system", "expanding", "--n", "4", "--format", "md"])
    out = capsys.readouterr().out
    assert "det X(nu) = (nu + 1)*nu*(nu - 4)" in out
    assert "det X(nu) = (nu + 1)*nu*(nu - 4/3)" in out


def test_reports_are_byte_deterministic(tmp_path):
    outs = []
    for k in range(2):
        p = tmp_path / f"r{k}.json"
        main(["analyze", "--system", "expanding", "--n", "9", "--lambda", "1/2", "--out", str(p)])
        outs.append(p.read_bytes())
    assert outs[0] == outs[1]


def test_series_csv_rows(capsys):
    main(["series", "--system", "steady", "--n", "4", "--branch", "minus", "--order", "6",
          "--param", "s=1"])
    rows = [r.split(",") for r in capsys.readouterr().out.splitlines()]
    assert ["y", "2", "1", "3.0", "3"] in rows


def test_series_order_zero_is_leading_row(capsys):
    main(["series", "--system", "steady", "--n", "4", "--branch", "minus", "--order", "0"])
    lines = capsys.readouterr().out.splitlines()
    assert lines[1:] == ["x,0,-1,1.0,1", "y,0,-1,2.0,2"]


def test_series_in_fifths(capsys):
    main(["series", "--system", "steady", "--n", "16", "--branch", "plus", "--order", "20"])
    exps = [r.split(",")[2] for r in capsys.readouterr().out.splitlines()[1:]]
    assert exps[:3] == ["-1", "-4/5", "-3/5"]


def test_unknown_branch_lists_labels(capsys):
    assert main(["series", "--system", "steady", "--n", "4", "--branch", "nope"]) == 2
    assert "minus, plus" in capsys.readouterr().err


def test_unknown_parameter_is_usage_error(capsys):
    assert main(["series", "--system", "steady", "--n", "4", "--branch", "minus",
                 "--param", "q=1"]) == 2


def test_validate_with_conservation(capsys):
    assert main(["validate", "--system", "steady", "--n", "1", "--window", "0.1,1.0"]) == 0
    out = capsys.readouterr().out
    assert "conservation" in out and "pass" in out


def test_validate_short_order_prints_deviation(capsys):
    assert main(["validate", "--system", "steady", "--n", "4", "--order", "3"]) == 3
    assert "FAIL" in capsys.readouterr().out


def test_validate_writes_report(tmp_path):
    p = tmp_path / "v.json"
    main(["validate", "--system", "steady", "--n", "9", "--out", str(p)])
    rep = json.loads(p.read_text(encoding="utf-8"))
    assert {v["branch"] for v in rep["validation"]} == {"minus", "plus"}
    assert all(v["deviation"] < 1e-8 for v in rep["validation"])


def test_scan_markdown_table(capsys, monkeypatch):
    monkeypatch.setenv("PAINLEVE_THREADS", "2")
    assert main(["scan", "--system", "steady", "--n-min", "1", "--n-max", "10"]) == 0
    out = capsys.readouterr().out
    assert "| 4 | -1/3 | 2/3 | 4/3 | 1 | 2 | 4 |" in out


def test_scan_csv_and_json(capsys):
    main(["scan", "--system", "expanding", "--n-min", "1", "--n-max", "4", "--lambda", "1/2",
          "--format", "json"])
    rows = json.loads(capsys.readouterr().out)
    assert [r["n"] for r in rows] == [1, 2, 3, 4]
    assert {r["verdict"] for r in rows} == {"fail"}
    main(["scan", "--system", "steady", "--n-min", "1", "--n-max", "3", "--format", "csv"])
    assert capsys.readouterr().out.startswith("n,lambda,verdict,branch,status,nu\n")


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "painlevekit", "analyze", "--system", "steady",
                           "--n", "2"], capture_output=True, text=True)
    assert proc.returncode == 3
