import json
import subprocess
import sys

from mframes.cli import main
from mframes.harness import dumps, paper_example


def test_paper_example_json(capsys):
    assert main(["paper-example"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["ok"] and out["frame"]["class"].startswith("tight_k_frame")


def test_paper_example_text(capsys):
    assert main(["paper-example", "--format", "text"]) == 0
    assert capsys.readouterr().out.strip().endswith("PASS")


def test_gen_then_verify(tmp_path, capsys):
    path = tmp_path / "s.json"
    assert main(["gen", "--seed", "4", "--profile", "guaranteed_k_frame", "--out", str(path)]) == 0
    assert main(["verify", "--scenario", str(path), "--tol-psd", "1e-9", "--tol-bound", "1e-8"]) == 0
    assert json.loads(capsys.readouterr().out)["tolerances"]["psd"] == 1e-9


def test_verify_failure_exit(tmp_path):
    sc = paper_example(extras=False)
    sc.claimed = (0.3334, 0.3334)
    path = tmp_path / "bad_claim.json"
    path.write_text(dumps(sc))
    assert main(["verify", "--scenario", str(path), "--format", "text"]) == 1


def test_parse_errors_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"measure": {"type": "discrete", "atoms": [{"w": -1}]}}')
    assert main(["verify", "--scenario", str(bad)]) == 2
    assert "/measure/atoms/0/w" in capsys.readouterr().err
    assert main(["verify", "--scenario", str(tmp_path / "missing.json")]) == 2
    assert main(["suite", "nope"]) == 2
    assert main(["frobnicate"]) == 2
    assert main(["verify", "--scenario", str(bad), "--tol-psd", "-1"]) == 2


def test_suite_is_deterministic(capsys, monkeypatch):
    monkeypatch.setenv("MFRAMES_THREADS", "1")
    assert main(["suite", "compose-right", "--trials", "5", "--seed", "2"]) == 0
    first = capsys.readouterr().out
    monkeypatch.setenv("MFRAMES_THREADS", "3")
    assert main(["suite", "compose-right", "--trials", "5", "--seed", "2"]) == 0
    assert capsys.readouterr().out == first


def test_console_module_entry():
    proc = subprocess.run([sys.executable, "-m", "mframes.cli", "suite", "surjectivity", "--trials", "3",
                           "--seed", "1", "--format", "text"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "3 passed" in proc.stdout
