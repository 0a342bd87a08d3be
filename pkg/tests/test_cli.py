import json
import subprocess
import sys

import pytest

from specon.cli import main


def run_json(capsys, argv):
    code = main(argv)
    return code, json.loads(capsys.readouterr().out)


def test_eval_gaps(capsys):
    code, out = run_json(capsys, ["eval", "--gaps", "1,2,1"])
    assert code == 0
    h = out["h"]
    assert h["h_value"] > 0
    assert abs(h["form_a"] - h["form_b"]) < 1e-7 and abs(h["form_c"] - h["form_b"]) < 1e-7
    assert out["concentration"]["value"] < out["concentration_rearranged"]["value"]


def test_eval_zero_hole(capsys):
    code, out = run_json(capsys, ["eval", "--gaps", "1,0,1"])
    assert code == 0
    assert abs(out["h"]["h_value"]) < 1e-14


def test_eval_bandwidth_equals_dilation(capsys):
    _, a = run_json(capsys, ["eval", "--gaps", "1,2,1", "--bandwidth", "2"])
    _, b = run_json(capsys, ["eval", "--gaps", "2,4,2"])
    assert a["h"] == b["h"]
    assert a["certificate"] == b["certificate"]
    assert a["concentration"]["unit_value"] == pytest.approx(b["concentration"]["value"])


def test_eval_endpoints(capsys):
    code, out = run_json(capsys, ["eval", "--endpoints", "0,1,3,4"])
    assert code == 0 and out["input"]["gaps"] == [1.0, 2.0, 1.0]


@pytest.mark.parametrize("argv", [
    ["eval", "--gaps", "1,x"],
    ["eval", "--gaps", "1,2"],
    ["eval", "--gaps", "1,2,1", "--bandwidth", "0"],
    ["eval"],
    ["verify", "--suite", "l2", "--samples", "0"],
    ["verify", "--suite", "nope"],
    ["search", "--mode", "scan"],
    ["search", "--mode", "remark1"],
    ["search", "--n", "1", "--mode", "scan"],
])
def test_bad_arguments_exit_2(argv, capsys):
    assert main(argv) == 2


def test_verify_identities_writes_reports(tmp_path, capsys):
    code = main(["verify", "--suite", "identities", "--samples", "50", "--seed", "7",
                 "--out", str(tmp_path)])
    assert code == 0
    report = json.loads((tmp_path / "verify-identities-seed7.json").read_text())
    assert report["passed"] and report["manifest"]["seed"] == 7
    csv_text = (tmp_path / "verify-identities-seed7.csv").read_text().splitlines()
    assert csv_text[0] == "suite,name,samples,worst_slack,tolerance,passed"
    assert (tmp_path / "verify-identities-seed7.csv.manifest.json").exists()


def test_output_dir_from_environment(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("SPECON_OUT", str(tmp_path / "env"))
    assert main(["verify", "--suite", "special", "--samples", "1"]) == 0
    assert (tmp_path / "env" / "verify-special-seed0.json").exists()


def test_search_modes(tmp_path, capsys):
    assert main(["search", "--n", "2", "--mode", "scan", "--samples", "256",
                 "--out", str(tmp_path)]) == 0
    scan = json.loads((tmp_path / "search-scan-n2-seed0.json").read_text())
    assert scan["violations"] == [] and set(scan) >= {
        "min_h", "argmin_gaps", "violations", "certificate", "config_echo", "manifest"}
    capsys.readouterr()
    assert main(["search", "--n", "2", "--restarts", "3", "--seed", "1",
                 "--out", str(tmp_path)]) == 0
    mini = json.loads((tmp_path / "search-minimize-n2-seed1.json").read_text())
    assert len(mini["restarts"]) == 3
    assert (tmp_path / "search-minimize-n2-seed1.csv.manifest.json").exists()
    capsys.readouterr()
    code, out = run_json(capsys, ["search", "--mode", "remark1", "--t", "1.2",
                                  "--out", str(tmp_path)])
    assert code == 0 and out["margin"] > 0 and out["oracle_margin"] > 0


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "specon", "eval", "--gaps", "2,2,2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["h"]["h_value"] > 0
