"""Experiment configuration and the command pipelines behind the CLI.

Every command writes its artifacts under the output directory together with
``manifest.json``, which records the command, the fully resolved
configuration (including seeds) and the list of files written.  Re-running
with that configuration reproduces the artifacts bit for bit.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any

import numpy as np

from .circuit import EXPERIMENT_SITES, Circuit, ghz_circuit, run, validate
from .clock import ghz_clock_frames, render_clock, to_svg
from .dephasing import FramePhase, ScanConfig
from .exceptions import NotClockRepresentableError
from .gates import CnotModelParams
from .measurement import CHIP_READOUT, ReadoutErrorParams, build_confusion
from .scans import delay_scan, phase_scan
from .search import SearchConfig, run_search
from .states import DensityMatrix, PureState, bipartite_entropy, build_embedded_mixture, \
    ghz_family_fidelity, schmidt_rank_vector
from .tomography import ELEMENTS, PartialDensityMatrix, TomographySettings, fidelity_with_error, \
    run_full_tomography, witness_verdict

COMMANDS = ("prepare", "tomography", "witness", "phase-scan", "delay-scan", "search", "clock")
FORMATS = ("json", "csv", "svg")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_CERTIFIED = 2
EXIT_NOT_RESOLVED = 3

#: Frame phases used when dephasing is switched on without explicit values.
DEFAULT_FRAME = FramePhase(a=0.2, b=0.1)


class ConfigError(ValueError):
    """A configuration value is missing, malformed or points at a missing file."""


@dataclass
class ExperimentConfig:
    """Everything needed to run one pipeline deterministically."""

    circuit: str = "ideal_ghz"
    cnot: CnotModelParams = CnotModelParams()
    shots: int = 1024
    seed: int = 0
    exact: bool = False
    noise: bool = False
    readout: tuple[ReadoutErrorParams, ...] = tuple(CHIP_READOUT[s] for s in EXPERIMENT_SITES)
    mitigation: bool = True
    dephase: bool = False
    frame: FramePhase = DEFAULT_FRAME
    scan: ScanConfig = field(default_factory=ScanConfig)
    imaginary: bool = False
    delays: tuple[float, ...] = tuple(float(d) for d in np.linspace(0, 8 * np.pi, 33))
    phase_per_unit_delay: float = 1.0
    search: SearchConfig = SearchConfig()
    witness: dict = field(default_factory=dict)
    out: str = "results"
    format: str = "json"

    def __post_init__(self):
        if self.shots < 1:
            raise ConfigError("shots: must be at least 1")
        if self.format not in FORMATS:
            raise ConfigError(f"format: expected one of {FORMATS}, got {self.format!r}")
        if self.circuit not in ("ghz", "ideal_ghz") and not Path(self.circuit).is_file():
            raise ConfigError(f"circuit: file {self.circuit!r} does not exist")
        if len(self.readout) != 3:
            raise ConfigError("readout: need parameters for exactly three sites")

    # --- construction ---------------------------------------------------

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"{sorted(unknown)[0]}: unknown configuration field")
        kw: dict[str, Any] = {}
        try:
            for key, value in data.items():
                kw[key] = _parse_field(key, value)
        except ConfigError:
            raise
        except (TypeError, ValueError, KeyError) as exc:
            raise ConfigError(f"{key}: {exc}") from exc
        return cls(**kw)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        p = Path(path)
        if not p.is_file():
            raise ConfigError(f"config: file {str(p)!r} does not exist")
        try:
            data = json.loads(p.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config: invalid JSON ({exc})") from exc
        if not isinstance(data, dict):
            raise ConfigError("config: top level must be a JSON object")
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        sc = self.search
        return {
            "circuit": self.circuit,
            "cnot": {"alpha": self.cnot.alpha, "beta": self.cnot.beta, "phi": self.cnot.phi},
            "shots": self.shots, "seed": self.seed, "exact": self.exact,
            "noise": self.noise,
            "readout": [[r.p10, r.p01] for r in self.readout],
            "mitigation": self.mitigation, "dephase": self.dephase,
            "frame": self.frame.to_dict(), "scan": self.scan.to_dict(),
            "imaginary": self.imaginary, "delays": list(self.delays),
            "phase_per_unit_delay": self.phase_per_unit_delay,
            "search": {"max_cnots": sc.max_cnots, "max_local": sc.max_local, "trials": sc.trials,
                       "seed": sc.seed, "success_threshold": sc.success_threshold,
                       "connectivity": sorted(sorted(p) for p in sc.connectivity)},
            "witness": self.witness, "out": self.out, "format": self.format,
        }

    # --- derived objects ------------------------------------------------

    def build_circuit(self) -> Circuit:
        if self.circuit == "ghz":
            return ghz_circuit(cnot=self.cnot)
        if self.circuit == "ideal_ghz":
            return ghz_circuit(cnot=CnotModelParams(0.0, 0.0, 0.0))
        c = Circuit.load(self.circuit)
        problems = validate(c)
        if problems:
            raise ConfigError(f"circuit: {problems[0]}")
        return c

    def tomography_settings(self) -> TomographySettings:
        noise = build_confusion(self.readout, EXPERIMENT_SITES) if self.noise else None
        return TomographySettings(
            n_shots=self.shots, noise=noise, mitigation=self.mitigation and self.noise,
            exact=self.exact, seed=self.seed,
            frame=self.frame if self.dephase else FramePhase(),
            scan=self.scan if self.dephase else None, imaginary=self.imaginary)


def _parse_field(key: str, value):
    if key == "cnot":
        return CnotModelParams(**value)
    if key == "readout":
        if isinstance(value, dict):
            value = value.get("sites", list(EXPERIMENT_SITES))
        out = []
        for item in value:
            if isinstance(item, str):
                if item not in CHIP_READOUT:
                    raise ConfigError(f"readout: unknown site {item!r}")
                out.append(CHIP_READOUT[item])
            else:
                out.append(ReadoutErrorParams(float(item[0]), float(item[1])))
        return tuple(out)
    if key == "frame":
        return FramePhase.from_dict(value)
    if key == "scan":
        return ScanConfig.from_dict(value)
    if key == "delays":
        return tuple(float(d) for d in value)
    if key == "search":
        v = dict(value)
        if "connectivity" in v:
            v["connectivity"] = frozenset(frozenset(p) for p in v["connectivity"])
        return SearchConfig(**v)
    if key in ("shots", "seed"):
        if isinstance(value, bool) or int(value) != value:
            raise ConfigError(f"{key}: expected an integer, got {value!r}")
        return int(value)
    if key in ("exact", "noise", "mitigation", "dephase", "imaginary"):
        if not isinstance(value, bool):
            raise ConfigError(f"{key}: expected true or false, got {value!r}")
        return value
    return value


# --- commands ----------------------------------------------------------------

@dataclass
class PipelineResult:
    exit_code: int
    artifacts: list[Path]
    summary: dict


class _Writer:
    def __init__(self, out: Path):
        self.out = out
        self.files: list[Path] = []
        out.mkdir(parents=True, exist_ok=True)

    def text(self, name: str, content: str) -> None:
        p = self.out / name
        p.write_text(content)
        self.files.append(p)

    def json(self, name: str, obj) -> None:
        self.text(name, json.dumps(obj, indent=2, default=_json_default))


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, complex):
        return [o.real, o.imag]
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def _prepare(cfg: ExperimentConfig, w: _Writer) -> tuple[int, dict]:
    c = cfg.build_circuit()
    state = run(c)
    summary = {"ghz_family_fidelity": ghz_family_fidelity(state),
               "schmidt_rank_vector": list(schmidt_rank_vector(state)),
               "entropies": {cut: bipartite_entropy(state, cut) for cut in ("A|BC", "AB|C", "AC|B")},
               "cnot_count": c.cnot_count}
    w.json("circuit.json", c.to_dict())
    w.json("state.json", state.to_dict())
    w.json("report.json", summary)
    return EXIT_OK, summary


def _tomography(cfg: ExperimentConfig, w: _Writer) -> tuple[int, dict]:
    state = run(cfg.build_circuit())
    report = run_full_tomography(state, cfg.tomography_settings())
    w.json("report.json", report.to_dict())
    if report.scans:
        w.text("scan.csv", report.scan_csv())
    summary = {"fidelity": report.fidelity, "fidelity_std": report.fidelity_std,
               "raw_fidelity": report.raw_fidelity, "trace": report.trace,
               "raw_trace": report.raw_trace, "witness": report.witness.label,
               "experiments": report.experiment_count, "scan_resolved": report.scan_resolved}
    if not report.scan_resolved:
        return EXIT_NOT_RESOLVED, summary
    return (EXIT_OK if report.witness.certified else EXIT_NOT_CERTIFIED), summary


def _pdm_from_density(rho: DensityMatrix) -> PartialDensityMatrix:
    diag = tuple(rho.element(x, x).real for x in ("000", "111", "222"))
    off = tuple(rho.element(*ELEMENTS[s]) for s in ((0, 1), (0, 2), (1, 2)))
    return PartialDensityMatrix(diag, (0.0,) * 3, off, (0.0,) * 3, (0.0,) * 3, rho.trace)


def _witness(cfg: ExperimentConfig, w: _Writer) -> tuple[int, dict]:
    req = cfg.witness or {}
    if "fidelity" in req:
        f, sf = float(req["fidelity"]), req.get("fidelity_std")
        source = "fidelity"
    elif "pdm" in req:
        f, sf = fidelity_with_error(PartialDensityMatrix.from_dict(req["pdm"]))
        source = "pdm"
    elif "mixture" in req:
        f, sf = fidelity_with_error(_pdm_from_density(build_embedded_mixture(req["mixture"])))
        source = f"mixture:{req['mixture']}"
    else:
        report = run_full_tomography(run(cfg.build_circuit()), cfg.tomography_settings())
        f, sf = report.fidelity, report.fidelity_std
        source = "tomography"
    verdict = witness_verdict(f, sf)
    summary = {"source": source, **verdict.to_dict()}
    w.json("report.json", summary)
    return (EXIT_OK if verdict.certified else EXIT_NOT_CERTIFIED), summary


def _phase_scan(cfg: ExperimentConfig, w: _Writer) -> tuple[int, dict]:
    state = run(cfg.build_circuit())
    settings = replace(cfg.tomography_settings(), frame=cfg.frame if cfg.dephase else FramePhase())
    res = phase_scan(state, settings, cfg.scan)
    w.json("report.json", res.to_dict())
    w.text("phase_scan.csv", res.to_csv())
    summary = {"best_phi": res.best_phi, "resolved": res.resolved}
    return (EXIT_OK if res.resolved else EXIT_NOT_RESOLVED), summary


def _delay_scan(cfg: ExperimentConfig, w: _Writer) -> tuple[int, dict]:
    state = run(cfg.build_circuit())
    res = delay_scan(state, cfg.tomography_settings(), cfg.delays, cfg.phase_per_unit_delay)
    w.json("report.json", res.to_dict())
    w.text("delay_scan.csv", res.to_csv())
    return EXIT_OK, {"delays": len(cfg.delays)}


def _search(cfg: ExperimentConfig, w: _Writer) -> tuple[int, dict]:
    res = run_search(cfg.search)
    res.save(w.out / "best_circuit.json", w.out / "search_log.jsonl")
    w.files += [p for p in (w.out / "best_circuit.json", w.out / "search_log.jsonl") if p.exists()]
    summary = {"converged": res.converged, "trials_used": res.trials_used,
               "score": None if res.best is None else res.best.score,
               "cnots": None if res.best is None else res.best.cnot_count,
               "free_angle": None if res.best is None else res.best.free_angle,
               "toolbox_size": res.toolbox_size}
    w.json("report.json", summary)
    return EXIT_OK, summary


def _clock(cfg: ExperimentConfig, w: _Writer) -> tuple[int, dict]:
    c = cfg.build_circuit()
    if cfg.circuit in ("ghz", "ideal_ghz"):
        frames = ghz_clock_frames(c)
    else:
        frames = [render_clock(run(c), stage="final")]
    w.json("clock.json", [f.to_dict() for f in frames])
    if cfg.format == "svg":
        for f in frames:
            w.text(f"clock_{f.stage}.svg", to_svg(f))
    return EXIT_OK, {"frames": [len(f) for f in frames]}


def _summary_csv(summary: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["key", "value"])
    for k, v in summary.items():
        writer.writerow([k, json.dumps(v, default=_json_default) if isinstance(v, (list, dict)) else v])
    return buf.getvalue()


_HANDLERS = {"prepare": _prepare, "tomography": _tomography, "witness": _witness,
             "phase-scan": _phase_scan, "delay-scan": _delay_scan, "search": _search, "clock": _clock}


def run_pipeline(cmd: str, cfg: ExperimentConfig, out: str | Path | None = None) -> PipelineResult:
    """Run one command, write its artifacts and a manifest, return the exit code.

    Exit codes: 0 success, 2 witness not certified, 3 scan not resolved,
    1 error (reported in the manifest).
    """
    if cmd not in _HANDLERS:
        raise ConfigError(f"command: expected one of {COMMANDS}, got {cmd!r}")
    w = _Writer(Path(out if out is not None else cfg.out))
    try:
        code, summary = _HANDLERS[cmd](cfg, w)
    except (ConfigError, NotClockRepresentableError, ValueError, OSError) as exc:
        code, summary = EXIT_ERROR, {"error": f"{type(exc).__name__}: {exc}"}
    if cfg.format == "csv":
        w.text("summary.csv", _summary_csv(summary))
    manifest = {"command": cmd, "exit_code": code, "config": cfg.to_dict(),
                "files": [p.name for p in w.files], "summary": summary}
    (w.out / "manifest.json").write_text(json.dumps(manifest, indent=2, default=_json_default))
    return PipelineResult(code, w.files + [w.out / "manifest.json"], summary)


def state_from_file(path) -> PureState:
    return PureState.from_dict(json.loads(Path(path).read_text()))
