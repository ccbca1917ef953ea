import csv
import io
import json
import shutil
import subprocess

import pytest

from solitonkit.cli import main
from solitonkit.report import CSV_HEADER, SCHEMA

BAD_FACTOR = """
id: bad_factor
kind: conformal-soliton
coords: [x, y]
box: [[-1, -1], [1, 1]]
params: {lam: 0}
metric: flat
fields: {tau: x, f: y}
checks:
  conf_soliton: {tol: 1e-9}
"""

LOG_OF_NEGATIVE = """
id: log_negative
kind: soliton
coords: [x, y]
box: [[-1, -1], [1, 1]]
params: {lam: 0, a: 0}
metric: flat
fields: {f: log(x + 1/2)}
checks:
  soliton: {tol: 1e-9, expect: fail}
"""


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_gaussian_passes(capsys):
    code, out, _ = run(["verify", "--scenario", "gaussian", "--checker", "soliton"], capsys)
    assert code == 0
    assert "[ok] gaussian soliton" in out and "exit 0" in out


def test_negative_control_suite_vs_standalone(capsys):
    assert run(["verify", "--scenario", "cigar_2d_lam1"], capsys)[0] == 0
    code, out, _ = run(["verify", "--scenario", "cigar_2d_lam1", "--standalone"], capsys)
    assert code == 1 and "[XX]" in out


@pytest.mark.parametrize("argv", [
    ["verify", "--scenario", "nope"],
    ["verify", "--scenario", "gaussian", "--checker", "nope"],
    ["verify", "--scenario", "gaussian", "--checker", "killing"],
    ["verify", "--scenario", "gaussian", "--set", "lam"],
    ["sweep", "--scenario", "gaussian", "--param", "lam", "--values", "1:2"],
])
def test_usage_errors(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 2 and "error" in err


def test_argparse_rejects_bad_counts():
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--points", "0"])
    assert exc.value.code == 2


def test_domain_violation_at_build_is_inconclusive(tmp_path, capsys):
    cfg = tmp_path / "bad.yaml"
    cfg.write_text(BAD_FACTOR)
    code, _, err = run(["verify", "--config", str(cfg)], capsys)
    assert code == 3 and "inconclusive" in err


def test_domain_violation_per_point_is_inconclusive(tmp_path, capsys):
    cfg = tmp_path / "log.yaml"
    cfg.write_text(LOG_OF_NEGATIVE)
    code, out, _ = run(["verify", "--config", str(cfg), "--points", "16"], capsys)
    assert code == 3
    assert "[??] log_negative soliton" in out and "point " in out


def test_csv_and_json_formats(capsys):
    argv = ["verify", "--scenario", "gaussian", "--points", "4", "--seed", "3"]
    code, text, _ = run(argv + ["--format", "csv"], capsys)
    assert code == 0 and "\r\n" in text
    rows = list(csv.reader(io.StringIO(text)))
    assert tuple(rows[0]) == CSV_HEADER and len(rows) == 1 + 3 * 4
    code, text, _ = run(argv + ["--format", "json"], capsys)
    doc = json.loads(text)
    assert doc["schema"] == SCHEMA and doc["seed"] == 3 and doc["summary"]["exit_code"] == 0
    fitted = [r for r in doc["results"] if r["checker"] == "soliton_scalar_fitted"][0]
    assert fitted["fitted"]["a"] == pytest.approx(3.0)


def test_json_reports_nan_as_null(tmp_path, capsys):
    cfg = tmp_path / "log.yaml"
    cfg.write_text(LOG_OF_NEGATIVE)
    code, text, _ = run(["verify", "--config", str(cfg), "--points", "16", "--format", "json"], capsys)
    doc = json.loads(text)
    bad = [p for p in doc["results"][0]["points"] if p["value"] is None]
    assert bad and all("error" in p for p in bad)


def test_verify_is_byte_deterministic(tmp_path, capsys):
    argv = ["verify", "--scenario", "cigar_2d", "--scenario", "fubini_study_m2", "--seed", "7", "--format", "json"]
    assert main(argv + ["--out", str(tmp_path / "a.json")]) == 0
    assert main(argv + ["--out", str(tmp_path / "b.json")]) == 0
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_report_writes_three_files(tmp_path, capsys):
    code, out, _ = run(["report", "--scenario", "span_orthogonal", "--out", str(tmp_path)], capsys)
    assert code == 0
    assert {p.name for p in tmp_path.iterdir()} == {"report.txt", "report.csv", "report.json"}


def test_identities(capsys):
    code, out, _ = run(["identities"], capsys)
    assert code == 0 and out.count("[ok]") == 6


def test_list(capsys):
    code, out, _ = run(["list"], capsys)
    assert code == 0 and "product_surface_killing" in out and "families:" in out
    code, out, _ = run(["list", "--checkers"], capsys)
    assert "killing\tclassifier" in out
    code, out, _ = run(["list", "--yaml", "gaussian(2, 1)"], capsys)
    assert "lam: 1" in out


def test_sweep(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    argv = ["sweep", "--scenario", "cigar_2d", "--checker", "soliton", "--param", "lam",
            "--values", "0:1:3", "--out", str(out)]
    assert main(argv) == 0
    with open(out, newline="") as fh:
        rows = list(csv.reader(fh))
    assert [r[1] for r in rows[1:]] == ["0.0", "0.5", "1.0"]
    assert [r[-1] for r in rows[1:]] == ["pass", "fail", "fail"]


def test_family_and_set_override(capsys):
    # f scales with lam, so only the scalar constant a can break the soliton
    argv = ["verify", "--scenario", "gaussian(2, 3)", "--checker", "soliton_scalar"]
    assert run(argv + ["--set", "lam=5", "--set", "a=10"], capsys)[0] == 0
    code, out, _ = run(argv + ["--set", "a=0"], capsys)
    assert code == 1 and "gaussian(2, 3) soliton_scalar" in out


@pytest.mark.skipif(shutil.which("solitonkit") is None, reason="console script not installed")
def test_console_script():
    proc = subprocess.run(["solitonkit", "verify", "--scenario", "gaussian", "--points", "4"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "summary:" in proc.stdout
