import numpy as np
import pytest

from qutrit_ghz.circuit import ideal_ghz_circuit
from qutrit_ghz.clock import ClockFrame, ghz_clock_frames, render_clock, to_svg
from qutrit_ghz.exceptions import NotClockRepresentableError
from qutrit_ghz.states import PureState


def test_ground_state_points_at_twelve():
    f = render_clock(PureState.basis("000"))
    assert len(f) == 1
    assert f.arrows[0].angle == 0 and f.arrows[0].length == pytest.approx(1)


def test_two_arrow_state_uses_amplitude_moduli():
    amps = np.zeros(27, complex)
    amps[0], amps[3] = np.sqrt(2 / 3), np.sqrt(1 / 3)
    f = render_clock(PureState(3, amps))
    assert f.labels == ("000", "010")
    assert [a.length for a in f.arrows] == pytest.approx([np.sqrt(2 / 3), np.sqrt(1 / 3)])


def test_three_level_string_is_rejected():
    with pytest.raises(NotClockRepresentableError):
        render_clock(PureState.basis("012"))


def test_sectors():
    assert render_clock(PureState.basis("111")).arrows[0].sector == (0, 1)
    assert render_clock(PureState.basis("122")).arrows[0].sector == (1, 2)
    assert render_clock(PureState.basis("202")).arrows[0].sector == (0, 2)


def test_ghz_stage_frames():
    frames = ghz_clock_frames(ideal_ghz_circuit())
    assert [len(f) for f in frames] == [1, 2, 2, 2, 3]
    assert frames[2].labels == ("000", "111")
    assert set(frames[3].labels) == {"000", "222"}
    assert all(a.length == pytest.approx(1 / np.sqrt(3), abs=1e-10) for a in frames[4].arrows)


def test_svg_and_json_output():
    f = ghz_clock_frames()[4]
    svg = to_svg(f)
    assert svg.startswith("<svg") and svg.count("crimson") == 3
    assert '"stage": "d"' in f.to_json()


def test_lengths_are_bounded():
    with pytest.raises(ValueError):
        from qutrit_ghz.clock import Arrow
        ClockFrame((Arrow((0, 1), "000", 0.0, 1.5),))
