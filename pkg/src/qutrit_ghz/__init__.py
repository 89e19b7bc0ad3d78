"""Simulation, tomography and certification of three-qutrit GHZ states.

The package models qutrit gates and circuits, the 0-1 discriminated readout
with its lowering protocol and readout-error mitigation, Pauli-string
tomography of the GHZ block of the density matrix, the fidelity witness for
Schmidt rank vector (3,3,3), rotating-frame dephasing with its compensation
scan, a discrete circuit search and GHZ-clock diagrams.
"""

from .circuit import Circuit, GateInstruction, ghz_circuit, ghz_stages, ideal_ghz_circuit, run, validate
from .clock import ClockFrame, ghz_clock_frames, render_clock, to_svg
from .dephasing import FramePhase, ScanConfig, dephase_circuit, fit_oscillation, predicted_oscillation
from .exceptions import (ConditioningError, ConnectivityError, DataError, DimensionError,
                         NotClockRepresentableError, UndefinedPhaseError)
from .gates import CnotModelParams, Gate, cnot_model, dephased_r12, make_gate, rotation_gate, x_plus
from .measurement import (ConfusionMatrix, ReadoutErrorParams, ShotCounts, build_confusion, chip_readout,
                          measure_all_zero, mitigate)
from .pipeline import ExperimentConfig, run_pipeline
from .scans import delay_scan, phase_scan
from .search import SearchConfig, evaluate_candidate, run_search
from .states import (DensityMatrix, PureState, SchmidtRankVector, bipartite_entropy, build_embedded_mixture,
                     fidelity, ghz_family_fidelity, partial_trace, schmidt_rank_vector)
from .tomography import (PartialDensityMatrix, PauliString, TomographySettings, expectation_with_variance,
                         experiment_budget, fidelity_with_error, im_offdiagonal, max_fidelity_bound,
                         re_offdiagonal, relative_phases, run_full_tomography, witness_verdict)

__all__ = [
    "Circuit", "GateInstruction", "ghz_circuit", "ghz_stages", "ideal_ghz_circuit", "run", "validate",
    "ClockFrame", "ghz_clock_frames", "render_clock", "to_svg",
    "FramePhase", "ScanConfig", "dephase_circuit", "fit_oscillation", "predicted_oscillation",
    "ConditioningError", "ConnectivityError", "DataError", "DimensionError",
    "NotClockRepresentableError", "UndefinedPhaseError",
    "CnotModelParams", "Gate", "cnot_model", "dephased_r12", "make_gate", "rotation_gate", "x_plus",
    "ConfusionMatrix", "ReadoutErrorParams", "ShotCounts", "build_confusion", "chip_readout",
    "measure_all_zero", "mitigate",
    "ExperimentConfig", "run_pipeline",
    "delay_scan", "phase_scan",
    "SearchConfig", "evaluate_candidate", "run_search",
    "DensityMatrix", "PureState", "SchmidtRankVector", "bipartite_entropy", "build_embedded_mixture",
    "fidelity", "ghz_family_fidelity", "partial_trace", "schmidt_rank_vector",
    "PartialDensityMatrix", "PauliString", "TomographySettings", "expectation_with_variance",
    "experiment_budget", "fidelity_with_error", "im_offdiagonal", "max_fidelity_bound",
    "re_offdiagonal", "relative_phases", "run_full_tomography", "witness_verdict",
]
