import json

import numpy as np
import pytest

from qutrit_ghz.circuit import Circuit, GateInstruction
from qutrit_ghz.pipeline import (EXIT_ERROR, EXIT_NOT_CERTIFIED, EXIT_NOT_RESOLVED, EXIT_OK, ConfigError,
                                 ExperimentConfig, run_pipeline)


def test_exact_tomography_on_ideal_ghz(tmp_path):
    res = run_pipeline("tomography", ExperimentConfig(exact=True), tmp_path)
    assert res.exit_code == EXIT_OK
    assert res.summary["fidelity"] == pytest.approx(1, abs=1e-9)
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["config"]["seed"] == 0 and "report.json" in manifest["files"]


def test_witness_on_two_level_mixture_is_not_certified(tmp_path):
    res = run_pipeline("witness", ExperimentConfig(witness={"mixture": "two_dim_ghz"}), tmp_path)
    assert res.exit_code == EXIT_NOT_CERTIFIED
    assert res.summary["fidelity"] == pytest.approx(2 / 3, abs=1e-12)


def test_witness_from_fidelity_value(tmp_path):
    assert run_pipeline("witness", ExperimentConfig(witness={"fidelity": 0.76}), tmp_path).exit_code == EXIT_OK
    bad = run_pipeline("witness", ExperimentConfig(witness={"fidelity": 3.0}), tmp_path)
    assert bad.exit_code == EXIT_ERROR and "error" in bad.summary


def test_noisy_pipeline_mitigation_gap(tmp_path):
    res = run_pipeline("tomography", ExperimentConfig(noise=True, seed=4), tmp_path)
    assert res.summary["fidelity"] > res.summary["raw_fidelity"]


def test_reports_are_reproducible_from_manifest(tmp_path):
    cfg = ExperimentConfig(shots=256, seed=9, dephase=True)
    run_pipeline("tomography", cfg, tmp_path / "a")
    manifest = json.loads((tmp_path / "a" / "manifest.json").read_text())
    cfg2 = ExperimentConfig.from_dict(manifest["config"])
    run_pipeline("tomography", cfg2, tmp_path / "b")
    assert (tmp_path / "a" / "report.json").read_bytes() == (tmp_path / "b" / "report.json").read_bytes()
    assert (tmp_path / "a" / "scan.csv").exists()


def test_unresolved_scan_exit_code(tmp_path):
    path = tmp_path / "product.json"
    Circuit(3, (GateInstruction("Ry01", (np.pi / 2,), (0,)),)).save(path)
    res = run_pipeline("phase-scan", ExperimentConfig(circuit=str(path), exact=True), tmp_path / "o")
    assert res.exit_code == EXIT_NOT_RESOLVED


def test_dephased_phase_scan_and_delay_scan(tmp_path):
    res = run_pipeline("phase-scan", ExperimentConfig(exact=True, dephase=True), tmp_path)
    assert res.exit_code == EXIT_OK
    assert res.summary["best_phi"] == pytest.approx(1.8, abs=1e-6)
    res = run_pipeline("delay-scan", ExperimentConfig(exact=True, delays=(0.0, 1.0, 2.0)), tmp_path)
    assert res.exit_code == EXIT_OK and (tmp_path / "delay_scan.csv").exists()


def test_clock_svg_and_prepare(tmp_path):
    res = run_pipeline("clock", ExperimentConfig(format="svg"), tmp_path)
    assert res.summary["frames"] == [1, 2, 2, 2, 3]
    assert (tmp_path / "clock_d.svg").exists()
    res = run_pipeline("prepare", ExperimentConfig(format="csv"), tmp_path / "p")
    assert res.summary["schmidt_rank_vector"] == [3, 3, 3]
    assert (tmp_path / "p" / "summary.csv").exists()


def test_clock_error_for_three_level_state(tmp_path):
    path = tmp_path / "c.json"
    Circuit(3, (GateInstruction("Ry01", (np.pi,), (1,)), GateInstruction("Ry12", (np.pi,), (2,)),
                GateInstruction("Ry01", (np.pi,), (2,)), GateInstruction("Ry12", (np.pi,), (2,)))).save(path)
    res = run_pipeline("clock", ExperimentConfig(circuit=str(path)), tmp_path / "o")
    assert res.exit_code == EXIT_ERROR


def test_search_pipeline(tmp_path):
    cfg = ExperimentConfig.from_dict({"search": {"trials": 200, "seed": 1}})
    res = run_pipeline("search", cfg, tmp_path)
    assert res.exit_code == EXIT_OK and (tmp_path / "search_log.jsonl").exists()


@pytest.mark.parametrize("data,field", [
    ({"shots": 0}, "shots"),
    ({"shots": 1.5}, "shots"),
    ({"noise": "yes"}, "noise"),
    ({"circuit": "/nonexistent.json"}, "circuit"),
    ({"bogus": 1}, "bogus"),
    ({"readout": ["Q9"]}, "readout"),
    ({"format": "pdf"}, "format"),
    ({"scan": {"grid": [1.0, 0.0]}}, "scan"),
])
def test_config_errors_name_the_field(data, field):
    with pytest.raises(ConfigError, match=field):
        ExperimentConfig.from_dict(data)


def test_config_load_errors(tmp_path):
    with pytest.raises(ConfigError, match="config"):
        ExperimentConfig.load(tmp_path / "missing.json")
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(ConfigError, match="config"):
        ExperimentConfig.load(p)


def test_unknown_command(tmp_path):
    with pytest.raises(ConfigError, match="command"):
        run_pipeline("plot", ExperimentConfig(), tmp_path)
