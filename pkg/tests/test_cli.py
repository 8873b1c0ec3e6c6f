import csv
import io
import json
import math
import subprocess
import sys

import pytest

from wpstat import __version__
from wpstat.cli import COLUMNS, OUTPUT_DIR_ENV, UsageError, main, parse_args


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def csv_body(text):
    rows = list(csv.reader(line for line in io.StringIO(text) if not line.startswith("#")))
    return rows[0], rows[1:]


def test_parse_examples():
    cfg = parse_args("variance --family fejer --L 10 --tau 0 --k-budget 400".split())
    assert (cfg.command, cfg.family, cfg.L, cfg.tau, cfg.k_budget) == ("variance", "fejer", 10.0, 0.0, 400)
    cfg = parse_args("goe-mc --dim 1000 --samples 400 --seed 42".split())
    assert (cfg.command, cfg.dim, cfg.samples, cfg.seed) == ("goe-mc", 1000, 400, 42)
    cfg = parse_args(["decay-study", "--L", "6", "--taus", "16,32,64"])
    assert cfg.taus == (16.0, 32.0, 64.0)


@pytest.mark.parametrize("argv,flag", [
    (["variance", "--L", "-3"], "--L"),
    (["variance", "--L", "10", "--tau", "-1"], "--tau"),
    (["variance", "--L", "10", "--k-budget", "1"], "--k-budget"),
    (["expectation", "--L", "5", "--genus", "2"], "--genus"),
    (["decay-study", "--L", "6", "--taus", "0.5,16"], "--taus"),
    (["goe-mc", "--beta", "2"], "--beta"),
    (["convergence-study", "--Ls", "10,-2"], "--Ls"),
])
def test_usage_errors_name_the_flag(argv, flag):
    with pytest.raises(UsageError) as info:
        parse_args(argv)
    assert info.value.flag == flag


def test_usage_exit_code_and_message(capsys):
    code, out, err = run_cli(capsys, "variance", "--L", "-3")
    assert code == 2 and out == ""
    assert err.strip() == "wpstat: error: --L: L must be positive"
    assert len(err.strip().splitlines()) == 1
    code, _, err = run_cli(capsys, "variance", "--L", "3", "--bogus")
    assert code == 2 and "--bogus" in err
    code, _, _ = run_cli(capsys, "frobnicate")
    assert code == 2


def test_numerical_failure_exit_code(capsys):
    code, out, err = run_cli(capsys, "expectation", "--L", "10", "--tau", "1e9")
    assert code == 1 and out == ""
    assert "numerical failure" in err and "panel" in err


def test_missing_input_file_exit_code(capsys, tmp_path):
    code, _, err = run_cli(capsys, "trace-eval", "--L", "5", "--spectrum", str(tmp_path / "none.txt"))
    assert code == 2 and "none.txt" in err


def test_goe_closed(capsys):
    code, out, _ = run_cli(capsys, "goe-closed", "--family", "fejer")
    assert code == 0
    header, rows = csv_body(out)
    assert tuple(header) == COLUMNS["goe-closed"]
    assert abs(float(rows[0][2]) - 1 / 3) < 1e-12
    assert f"# version: {__version__}" in out
    assert "# fixtures: " in out and "# timestamp: " in out


def test_json_layout(capsys):
    code, out, _ = run_cli(capsys, "variance", "--L", "10", "--tau", "1", "--k-budget", "20", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert set(doc) == {"metadata", "rows"}
    assert doc["metadata"]["tool"] == "wpstat"
    assert doc["metadata"]["config"]["k_budget"] == 20
    row = doc["rows"][0]
    assert tuple(row) == COLUMNS["variance"]
    assert row["total"] == pytest.approx(row["goe_term"] + row["diag_correction"] + row["offdiag_term"], rel=1e-15)


def strip_timestamp(text):
    return "\n".join(line for line in text.splitlines() if "timestamp" not in line)


@pytest.mark.parametrize("fmt", ["csv", "json"])
def test_output_is_deterministic(tmp_path, fmt):
    a, b = tmp_path / f"a.{fmt}", tmp_path / f"b.{fmt}"
    argv = ["goe-mc", "--dim", "100", "--samples", "20", "--seed", "5", "--format", fmt]
    assert main(argv + ["-o", str(a)]) == 0
    assert main(argv + ["-o", str(b)]) == 0
    assert strip_timestamp(a.read_text()) == strip_timestamp(b.read_text())
    assert b"\r" not in a.read_bytes()


def test_output_dir_from_environment(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv(OUTPUT_DIR_ENV, str(tmp_path / "results"))
    assert main(["goe-closed", "--format", "json"]) == 0
    assert capsys.readouterr().out == ""
    doc = json.loads((tmp_path / "results" / "goe-closed.json").read_text())
    assert doc["rows"][0]["family"] == "fejer"


def test_decay_study_reports_slope(capsys):
    code, out, _ = run_cli(capsys, "decay-study", "--family", "cinf_bump", "--L", "6",
                           "--taus", "16,32,64,128,256,512,1024", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert len(doc["rows"]) == 7
    assert doc["metadata"]["fitted_slope"] <= -1


def test_convergence_study_rows(capsys):
    code, out, _ = run_cli(capsys, "convergence-study", "--Ls", "10,20", "--k-budget", "50")
    assert code == 0
    header, rows = csv_body(out)
    assert tuple(header) == COLUMNS["convergence-study"]
    col = {name: i for i, name in enumerate(header)}
    for r in rows:
        L = float(r[col["L"]])
        assert r[col["normalization"]] == "tau0"
        assert float(r[col["abs_error"]]) == pytest.approx(abs(float(r[col["variance"]]) - 1 / 3), abs=1e-15)
        assert float(r[col["log_L_over_L2"]]) == pytest.approx(math.log(L) / L**2)


def test_trace_eval(tmp_path, capsys):
    spec = tmp_path / "spec.txt"
    spec.write_text("genus 2\n3.0 4 sns\n3.6 2 nonsimple\n")
    ev = tmp_path / "ev.txt"
    ev.write_text("genus 2\n0\n0.3\n2.0\n")
    code, out, _ = run_cli(capsys, "trace-eval", "--family", "hann", "--Ls", "2,2.5,5",
                           "--spectrum", str(spec), "--eigenvalues", str(ev), "--format", "json")
    assert code == 0
    rows = json.loads(out)["rows"]
    assert [r["n_osc"] for r in rows[:2]] == [0.0, 0.0]
    assert rows[2]["n_osc"] != 0.0
    assert rows[2]["n_osc"] == pytest.approx(rows[2]["n_osc_sns"] + rows[2]["n_osc_nonsimple"], rel=1e-15)
    assert all(r["nbar"] > 0 and r["statistic"] is not None for r in rows)


def test_trace_eval_fejer_has_no_nbar(tmp_path, capsys):
    spec = tmp_path / "spec.txt"
    spec.write_text("genus 2\n3.0 4 sns\n")
    code, out, _ = run_cli(capsys, "trace-eval", "--L", "2", "--spectrum", str(spec), "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["rows"][0]["nbar"] is None and "diverges" in doc["metadata"]["nbar"]
    assert doc["rows"][0]["n_osc"] == 0.0


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "wpstat", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "goe-closed" in res.stdout
