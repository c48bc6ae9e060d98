import json
import subprocess
import sys

import pytest

from meanking.cli import main
from meanking.designs import oa_from_text
from meanking.mub import mub_from_json, mub_verify


def run(*argv):
    return main([str(a) for a in argv])


def test_mub_gen_and_verify(tmp_path):
    out = tmp_path / "m.json"
    assert run("mub", "gen", "--d", 5, "--out", out) == 0
    doc = json.loads(out.read_text())
    assert doc["d"] == 5 and doc["k"] == 6
    assert mub_verify(mub_from_json(doc)).passed
    assert run("mub", "verify", "--in", out) == 0


def test_mub_verify_corrupted(tmp_path):
    out = tmp_path / "m.json"
    run("mub", "gen", "--d", 3, "--out", out)
    doc = json.loads(out.read_text())
    doc["bases"][1][0][0][0] += 0.05
    out.write_text(json.dumps(doc))
    assert run("mub", "verify", "--in", out) == 1


def test_mub_gen_even_prime_power_is_usage_error(capsys):
    assert run("mub", "gen", "--d", 4) == 2
    assert "import-only" in capsys.readouterr().err


def test_mub_verify_malformed_json(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run("mub", "verify", "--in", bad) == 2


def test_mub_import_rejects_too_many_bases(tmp_path):
    path = tmp_path / "m.json"
    run("mub", "gen", "--d", 2, "--out", path)
    doc = json.loads(path.read_text())
    doc["bases"].append(doc["bases"][0])
    doc["k"] = 4
    path.write_text(json.dumps(doc))
    assert run("mub", "verify", "--in", path) == 2


def test_oa_gen_mols_then_verify(tmp_path, fig1_path):
    out = tmp_path / "oa.txt"
    assert run("oa", "gen", "--method", "mols", "--d", 3, "--out", out) == 0
    assert run("oa", "verify", "--in", out) == 0
    assert sorted(map(tuple, oa_from_text(out.read_text()).rows.tolist())) == \
        sorted(map(tuple, oa_from_text(fig1_path.read_text()).rows.tolist()))


def test_oa_verify_row_deleted(tmp_path, capsys):
    out = tmp_path / "oa.txt"
    run("oa", "gen", "--method", "mols", "--d", 3, "--out", out)
    lines = out.read_text().split("\n")
    del lines[3]
    out.write_text("\n".join(lines))
    assert run("oa", "verify", "--in", out) == 1
    assert "A'=" in capsys.readouterr().out


def test_oa_verify_garbage_is_input_error(tmp_path):
    out = tmp_path / "oa.txt"
    out.write_text("OA 1 3 2\n0 0 x\n")
    assert run("oa", "verify", "--in", out) == 2


def test_oa_gen_row_cap():
    assert run("oa", "gen", "--method", "trivial", "--k", 7, "--d", 6) == 2


def test_oa_gen_row_cap_override(monkeypatch, tmp_path):
    monkeypatch.setenv("MEANKING_ROW_CAP", "10")
    assert run("oa", "gen", "--method", "trivial", "--k", 3, "--d", 3, "--out", tmp_path / "x") == 2


@pytest.mark.parametrize("argv", [
    ["--d", 3, "--k", 4, "--oa", "mols", "--mode", "exact"],
    ["--d", 6, "--k", 2, "--oa", "trivial", "--mode", "exact"],
    ["--d", 3, "--k", 4, "--oa", "trivial", "--mode", "sample", "--rounds", 5000, "--seed", 7],
])
def test_run_passes(tmp_path, argv):
    out = tmp_path / "report.json"
    assert run("run", *argv, "--out", out) == 0
    rep = json.loads(out.read_text())
    assert rep["passed"]
    assert rep["worst_case_success"] == pytest.approx(1.0, abs=1e-9)
    assert all(c["passed"] for c in rep["checks"])
    assert all("residual" in c for c in rep["checks"])
    if "sampled" in rep:
        assert rep["sampled"]["successes"] == 5000


def test_run_report_deterministic_modulo_timing(tmp_path):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        run("run", "--d", 2, "--k", 3, "--oa", "mols", "--mode", "sample", "--rounds", 2000, "--seed", 5, "--out", p)
    docs = [json.loads(p.read_text()) for p in paths]
    for doc in docs:
        doc.pop("timing")
    assert json.dumps(docs[0]) == json.dumps(docs[1])


def test_run_from_files(tmp_path):
    mub_path, oa_path = tmp_path / "m.json", tmp_path / "oa.txt"
    run("mub", "gen", "--d", 6, "--out", mub_path)
    run("oa", "gen", "--method", "trivial", "--k", 2, "--d", 6, "--out", oa_path)
    assert run("run", "--mub", "file", "--mub-in", mub_path, "--oa", "file", "--in", oa_path) == 0


def test_run_incompatible_inputs(tmp_path):
    oa_path = tmp_path / "oa.txt"
    run("oa", "gen", "--method", "mols", "--d", 3, "--out", oa_path)
    assert run("run", "--d", 5, "--oa", "file", "--in", oa_path) == 2
    assert run("run", "--d", 3, "--k", 4, "--n", 2, "--oa", "mols") == 2


def test_run_with_bad_imported_oa_fails_verification(tmp_path):
    oa_path = tmp_path / "oa.txt"
    text = "OA 1 4 3\n0 0 0 0\n0 1 1 1\n0 2 2 2\n1 0 1 2\n1 1 2 0\n1 2 0 1\n2 0 2 1\n2 1 0 2\n2 2 1 1\n"
    oa_path.write_text(text)
    report = tmp_path / "r.json"
    assert run("run", "--d", 3, "--k", 4, "--oa", "file", "--in", oa_path, "--out", report) == 1
    assert not json.loads(report.read_text())["passed"]


def test_run_zero_rounds_is_usage_error():
    assert run("run", "--d", 2, "--k", 2, "--oa", "trivial", "--mode", "sample", "--rounds", 0) == 2


def test_verify_without_input_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        run("oa", "verify")
    assert exc.value.code == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "meanking", "run", "--d", "2", "--k", "2", "--oa", "trivial"],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert "worst-case success" in proc.stdout
