import json
import subprocess
import sys

import pytest

from qutrit_ghz.cli import main


def test_cli_tomography_exact(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"exact": True}))
    code = main(["tomography", "--config", str(cfg), "--out", str(tmp_path / "o")])
    assert code == 0
    out = json.loads(capsys.readouterr().out)
    assert out["fidelity"] == pytest.approx(1, abs=1e-9)
    assert (tmp_path / "o" / "manifest.json").exists()


def test_cli_overrides_reach_manifest(tmp_path):
    code = main(["witness", "--seed", "7", "--shots", "128", "--noise", "on", "--out", str(tmp_path)])
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["config"]["seed"] == 7 and manifest["config"]["shots"] == 128
    assert manifest["config"]["noise"] is True
    assert code == manifest["exit_code"]


def test_cli_config_error_returns_one(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"shots": -1}))
    assert main(["prepare", "--config", str(cfg), "--out", str(tmp_path)]) == 1
    assert "shots" in capsys.readouterr().err


def test_cli_rejects_bad_flag_values():
    with pytest.raises(SystemExit):
        main(["prepare", "--noise", "maybe"])


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "qutrit_ghz", "clock", "--format", "svg", "--out", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "clock_initial.svg").exists()
