import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import angles
from qutrit_ghz.circuit import Circuit, GateInstruction, apply_circuit, ghz_circuit, ideal_ghz_circuit, run
from qutrit_ghz.dephasing import (NO_DEPHASING, FramePhase, OscillationFit, ScanConfig, dephase_circuit,
                                  fit_oscillation, predicted_oscillation)
from qutrit_ghz.states import PureState, ghz_family_fidelity
from qutrit_ghz.tomography import PauliString, pauli_measurement_circuit

triples = st.lists(st.floats(min_value=-np.pi, max_value=np.pi), min_size=3, max_size=3)


def p111(a, b, phi):
    c = pauli_measurement_circuit(PauliString.parse("xxx", "12"), phi, FramePhase(a, b))
    return abs(apply_circuit(c, PureState.ghz()).amplitude("111")) ** 2


@given(triples, triples, st.floats(min_value=0, max_value=4 * np.pi))
@settings(max_examples=60)
def test_simulated_projection_matches_closed_form(a, b, phi):
    assert p111(a, b, phi) == pytest.approx(predicted_oscillation(a, b, phi), abs=1e-10)


def test_oscillation_range_is_zero_to_one_sixth():
    phis = np.linspace(0, 4 * np.pi, 401)
    vals = [predicted_oscillation((0.1,) * 3, (0.4,) * 3, p) for p in phis]
    assert min(vals) == pytest.approx(0, abs=1e-6)
    assert max(vals) == pytest.approx(1 / 6, abs=1e-6)


@given(triples, triples)
@settings(max_examples=30, deadline=None)
def test_dephasing_preserves_family_fidelity_of_ghz_circuit(a, b):
    fp = FramePhase(a, b, a)
    assert ghz_family_fidelity(run(dephase_circuit(ghz_circuit(), fp))) == pytest.approx(1, abs=1e-10)


def test_zero_frame_is_identity_transform():
    c = ideal_ghz_circuit()
    assert dephase_circuit(c, NO_DEPHASING) is c


def test_dephase_counts_occurrences_per_qutrit():
    c = Circuit(3, (GateInstruction("Rx12", (np.pi,), (0,)), GateInstruction("Ry12", (np.pi,), (1,)),
                    GateInstruction("Ry12", (np.pi,), (0,)), GateInstruction("Rx12", (np.pi,), (0,))))
    fp = FramePhase((0.1, 0.2, 0.3), (1.0, 2.0, 3.0), (5.0, 6.0, 7.0))
    d = dephase_circuit(c, fp)
    assert [i.label for i in d.instructions] == ["Rn12"] * 4
    offsets = [d.instructions[k].params[1] for k in range(4)]
    assert offsets == pytest.approx([np.pi + 0.1, np.pi / 2 + 0.2, np.pi / 2 + 1.0, np.pi + 5.0])


def test_frame_phase_validation_and_round_trip():
    fp = FramePhase.uniform(0.3, -0.2)
    assert fp.total_shift == pytest.approx(3 * (-0.2 - 0.6))
    assert FramePhase.from_dict(fp.to_dict()) == fp
    with pytest.raises(ValueError):
        FramePhase(np.nan)


@given(st.floats(min_value=0.01, max_value=1), angles, st.floats(min_value=-1, max_value=1))
def test_fit_recovers_exact_sinusoid(amp, delta, offset):
    grid = ScanConfig().grid
    y = amp * np.cos(np.asarray(grid) / 2 + delta) + offset
    fit = fit_oscillation(grid, y)
    assert fit.amplitude == pytest.approx(amp, abs=1e-9)
    assert fit.offset == pytest.approx(offset, abs=1e-9)
    assert fit.resolved
    np.testing.assert_allclose(fit(grid), y, atol=1e-9)


def test_flat_noisy_data_is_not_resolved():
    grid = np.asarray(ScanConfig().grid)
    rng = np.random.default_rng(0)
    fit = fit_oscillation(grid, 0.5 + 0.01 * rng.normal(size=grid.size), np.full(grid.size, 0.05))
    assert not fit.resolved


def test_peak_phi_wraps_into_period():
    assert OscillationFit(1, 0.0, 0, 0, True).peak_phi == 0.0
    assert OscillationFit(1, -1.0, 0, 0, True).peak_phi == pytest.approx(2.0)


def test_scan_config_parsing():
    assert len(ScanConfig().grid) == 24
    sc = ScanConfig.from_dict({"points": 48, "step": np.pi / 12, "qutrit": 2})
    assert len(sc.grid) == 48 and sc.qutrit == 2
    assert ScanConfig.from_dict(sc.to_dict()) == sc
    with pytest.raises(ValueError):
        ScanConfig(grid=(1.0, 0.5))
