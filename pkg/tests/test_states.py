import numpy as np
import pytest
from hypothesis import given, settings

from conftest import angles, pure_states, random_state
from qutrit_ghz.exceptions import DimensionError
from qutrit_ghz.states import (DensityMatrix, PureState, basis_index, basis_label, bipartite_entropy,
                               build_embedded_mixture, fidelity, ghz_family_fidelity, partial_trace,
                               schmidt_coefficients, schmidt_rank_vector)


def test_basis_indexing_is_base_three_leftmost_most_significant():
    assert basis_index("000") == 0
    assert basis_index("111") == 13
    assert basis_index("222") == 26
    assert basis_index("100") == 9
    assert basis_label(5, 3) == "012"


def test_wrong_length_raises_dimension_error():
    with pytest.raises(DimensionError):
        PureState(3, np.ones(26) / np.sqrt(26))


def test_unnormalized_state_is_rejected():
    with pytest.raises(ValueError):
        PureState(1, np.array([1.0, 1.0, 0.0]))


@given(pure_states())
def test_normalization_invariant(state):
    assert abs(np.vdot(state.amplitudes, state.amplitudes) - 1) < 1e-10


def test_ghz_schmidt_rank_and_entropies():
    g = PureState.ghz()
    assert schmidt_rank_vector(g) == (3, 3, 3)
    for cut in ("A|BC", "AB|C", "AC|B"):
        assert bipartite_entropy(g, cut) == pytest.approx(1.0, abs=1e-12)


def test_product_state_has_rank_one_everywhere():
    assert schmidt_rank_vector(PureState.basis("012")) == (1, 1, 1)


def test_unknown_cut_rejected():
    with pytest.raises(ValueError):
        bipartite_entropy(PureState.ghz(), "A|B")


@given(pure_states())
@settings(max_examples=30)
def test_schmidt_spectra_are_normalized_and_bounded(state):
    for cut in ("A|BC", "AB|C", "AC|B"):
        s = schmidt_coefficients(state, cut)
        assert np.sum(s**2) == pytest.approx(1.0, abs=1e-10)
        assert 0 <= bipartite_entropy(state, cut) <= 1 + 1e-12


@given(pure_states())
@settings(max_examples=30)
def test_single_party_cuts_match_reduced_spectra(state):
    rho = state.density_matrix()
    for keep, cut in (((0,), "A|BC"), ((2,), "AB|C"), ((1,), "AC|B")):
        ev = np.sort(np.linalg.eigvalsh(partial_trace(rho, keep).entries))[::-1]
        s = schmidt_coefficients(state, cut)
        np.testing.assert_allclose(ev, s**2, atol=1e-10)


@given(angles, angles)
def test_ghz_family_has_unit_family_fidelity(p1, p2):
    assert ghz_family_fidelity(PureState.ghz(p1, p2)) == pytest.approx(1.0, abs=1e-12)


@given(pure_states())
@settings(max_examples=50)
def test_family_fidelity_dominates_zero_phase_fidelity(state):
    f0 = fidelity(state.density_matrix(), PureState.ghz())
    assert ghz_family_fidelity(state) >= f0 - 1e-12


def test_family_fidelity_is_attained_by_matching_phases(rng):
    s = random_state(rng)
    a = s.amplitudes[[0, 13, 26]]
    p1 = np.angle(a[1]) - np.angle(a[0])
    p2 = np.angle(a[2]) - np.angle(a[0])
    f = fidelity(s.density_matrix(), PureState.ghz(p1, p2))
    assert f == pytest.approx(ghz_family_fidelity(s), abs=1e-12)


def test_embedded_mixture_fidelities():
    g = PureState.ghz()
    assert fidelity(build_embedded_mixture("two_dim_ghz"), g) == pytest.approx(2 / 3, abs=1e-12)
    assert fidelity(build_embedded_mixture("two_party_bell"), g) == pytest.approx(1 / 6, abs=1e-12)
    with pytest.raises(ValueError):
        build_embedded_mixture("three_dim")


def test_density_matrix_invariants():
    with pytest.raises(ValueError):
        DensityMatrix(1, np.array([[1, 1], [0, 0]]))
    with pytest.raises(ValueError):
        DensityMatrix(1, np.eye(3))
    DensityMatrix(1, np.eye(3), reconstructed=True)
    with pytest.raises(ValueError):
        DensityMatrix(1, np.array([[0.5, 1j, 0], [1j, 0.5, 0], [0, 0, 0]]))


def test_round_trips(rng):
    s = random_state(rng)
    assert np.allclose(PureState.from_dict(s.to_dict()).amplitudes, s.amplitudes)
    rho = s.density_matrix()
    assert np.allclose(DensityMatrix.from_dict(rho.to_dict()).entries, rho.entries)


def test_partial_trace_rejects_bad_subsets():
    rho = PureState.ghz().density_matrix()
    with pytest.raises(ValueError):
        partial_trace(rho, [])
    with pytest.raises(ValueError):
        partial_trace(rho, [3])
    assert partial_trace(rho, [0, 1, 2]).trace == pytest.approx(1.0)
