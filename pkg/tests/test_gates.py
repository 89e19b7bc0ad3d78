import numpy as np
import pytest
from hypothesis import given

from conftest import angles
from qutrit_ghz.gates import (IDEAL_CNOT, CnotModelParams, Gate, basis_change_signs, cnot_model,
                              dephased_r12, is_known_label, lowering_sequence, make_gate,
                              measurement_basis_gate, rotation_gate, subspace, subspace_pauli, x_plus)
from qutrit_ghz.states import basis_index


def ket(label):
    v = np.zeros(3 ** len(label), dtype=complex)
    v[basis_index(label)] = 1
    return v


@given(angles)
def test_rotations_are_unitary_and_leave_idle_level(theta):
    for axis in "xyz":
        for sub, idle in (((0, 1), 2), ((1, 2), 0), ((0, 2), 1)):
            m = rotation_gate(axis, sub, theta).matrix
            assert np.allclose(m.conj().T @ m, np.eye(3), atol=1e-12)
            assert m[idle, idle] == pytest.approx(1)


def test_pi_rotation_about_y_swaps_levels_with_sign():
    m = rotation_gate("y", "01", np.pi).matrix
    assert np.allclose(m @ ket("0"), ket("1"))
    assert np.allclose(m @ ket("1"), -ket("0"))


def test_subspace_parsing():
    assert subspace("12") == (1, 2)
    assert subspace([0, 2]) == (0, 2)
    with pytest.raises(ValueError):
        subspace((2, 0))
    with pytest.raises(ValueError):
        subspace("11")
    with pytest.raises(ValueError):
        subspace_pauli("w", "01")


@given(angles)
def test_dephased_rotation_reduces_to_nominal_axes(theta):
    assert np.allclose(dephased_r12(theta, np.pi).matrix, rotation_gate("x", "12", theta).matrix)
    assert np.allclose(dephased_r12(theta, np.pi / 2).matrix, rotation_gate("y", "12", theta).matrix)


@given(angles)
def test_x_plus_maps_two_to_zero_for_any_frame_phase(phase):
    for g in (x_plus(), x_plus(phase)):
        out = g.matrix @ ket("2")
        assert abs(out[0]) == pytest.approx(1, abs=1e-12)


def test_non_unitary_gate_rejected():
    with pytest.raises(ValueError):
        Gate(np.ones((3, 3)), "bad")
    with pytest.raises(ValueError):
        Gate(np.eye(4), "bad")


def test_cnot_truth_table_ideal_controls():
    u = cnot_model(IDEAL_CNOT).matrix
    assert np.allclose(u @ ket("00"), ket("00"))
    assert np.allclose(u @ ket("10"), ket("11"))
    assert np.allclose(u @ ket("11"), ket("10"))
    out = u @ ket("20")
    assert abs(out[basis_index("20")]) == pytest.approx(1 / np.sqrt(2))
    assert abs(out[basis_index("21")]) == pytest.approx(1 / np.sqrt(2))


@given(angles, angles, angles)
def test_cnot_model_unitary_for_all_parameters(a, b, p):
    u = cnot_model(CnotModelParams(a, b, p)).matrix
    assert np.allclose(u.conj().T @ u, np.eye(9), atol=1e-10)


@pytest.mark.parametrize("kind,axis", [("H", "x"), ("H_y", "y")])
@pytest.mark.parametrize("sub", [(0, 1), (1, 2), (0, 2)])
def test_basis_change_diagonalizes_the_subspace_pauli(kind, axis, sub):
    v = measurement_basis_gate(kind, sub).matrix
    d = v @ subspace_pauli(axis, sub) @ v.conj().T
    assert np.allclose(d, np.diag(np.diag(d)), atol=1e-12)
    signs = basis_change_signs(kind, sub)
    assert sorted(signs.values()) == [-1, 1]


@pytest.mark.parametrize("label", ["000", "012", "221", "222", "101"])
def test_lowering_sequence_maps_basis_string_to_zero(label):
    v = ket(label)
    for q, g in lowering_sequence(label):
        ops = [np.eye(3)] * 3
        ops[q] = g.matrix
        v = np.kron(np.kron(ops[0], ops[1]), ops[2]) @ v
    assert abs(v[0]) == pytest.approx(1, abs=1e-12)


def test_lowering_rejects_bad_digit():
    with pytest.raises(ValueError):
        lowering_sequence("013")


def test_make_gate_and_known_labels():
    assert np.allclose(make_gate("Ry12", (np.pi,)).matrix, rotation_gate("y", "12", np.pi).matrix)
    assert make_gate("CNOT").arity == 2
    assert is_known_label("Rn12") and is_known_label("Xplus") and not is_known_label("Foo")
    with pytest.raises(ValueError):
        make_gate("Rx01", ())
    with pytest.raises(KeyError):
        make_gate("Foo")
