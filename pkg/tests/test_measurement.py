import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_state, seeds
from qutrit_ghz.circuit import EXPERIMENT_SITES
from qutrit_ghz.exceptions import ConditioningError
from qutrit_ghz.measurement import (BIT_PATTERNS, CHIP_READOUT, ConfusionMatrix, ReadoutErrorParams,
                                    ShotCounts, basis_experiment, build_confusion, chip_readout,
                                    discriminate, discriminated_probabilities, estimate_basis_probability,
                                    make_rng, mitigate, sample_shots)
from qutrit_ghz.states import PureState


def test_discriminator_maps_two_to_one():
    assert discriminate("012") == "011"
    assert discriminate("220") == "110"


def test_confusion_matrix_is_column_stochastic():
    cm = build_confusion(chip_readout(EXPERIMENT_SITES))
    assert np.allclose(cm.matrix.sum(axis=0), 1)
    assert cm.matrix.shape == (8, 8)
    single = CHIP_READOUT["Q2"].matrix()
    assert single[1, 0] == pytest.approx(0.035)


def test_readout_parameters_validated():
    with pytest.raises(ValueError):
        ReadoutErrorParams(-0.1, 0.0)
    with pytest.raises(ValueError):
        build_confusion(chip_readout(EXPERIMENT_SITES)[:2])


probability_vectors = st.lists(st.floats(min_value=0, max_value=1), min_size=8, max_size=8).filter(
    lambda v: sum(v) > 1e-3).map(lambda v: np.array(v) / sum(v))


@given(probability_vectors)
def test_mitigation_round_trip_on_analytic_probabilities(p):
    cm = build_confusion(chip_readout(EXPERIMENT_SITES))
    np.testing.assert_allclose(mitigate(cm.matrix @ p, cm), p, atol=1e-8)


def test_ill_conditioned_confusion_raises():
    cm = ConfusionMatrix(np.full((8, 8), 1 / 8))
    with pytest.raises(ConditioningError):
        mitigate(np.full(8, 1 / 8), cm)


@given(seeds)
@settings(max_examples=20)
def test_sampling_is_seed_deterministic(seed):
    p = np.abs(PureState.ghz().amplitudes) ** 2
    a = sample_shots(p, 256, seed=seed)
    b = sample_shots(p, 256, seed=seed)
    assert a.counts == b.counts
    assert sum(a.counts.values()) == 256


def test_streams_are_independent():
    assert make_rng(0, 1).integers(1 << 30) != make_rng(0, 2).integers(1 << 30)


def test_shot_counts_validation(tmp_path):
    with pytest.raises(ValueError):
        ShotCounts({"000": 3}, 4)
    with pytest.raises(ValueError):
        ShotCounts({"003": 4}, 4)
    c = ShotCounts({"000": 4}, 4, 7)
    c.save(tmp_path / "c.json")
    assert ShotCounts.from_dict(c.to_dict()) == c


def test_exact_lowering_recovers_populations(rng):
    s = random_state(rng)
    for label in ("000", "111", "222", "120"):
        p, var = estimate_basis_probability(s, label, exact=True)
        assert p == pytest.approx(abs(s.amplitude(label)) ** 2, abs=1e-12)
        assert var == 0


def test_sampled_estimate_variance_formula():
    est = basis_experiment(PureState.ghz(), "111", n=1024, seed=3)
    assert est.variance == pytest.approx(est.p_hat * (1 - est.p_hat) / 1024)


def test_noise_lowers_raw_all_zero_probability():
    cm = build_confusion(chip_readout(EXPERIMENT_SITES))
    probs = np.zeros(27)
    probs[0] = 1
    d = discriminated_probabilities(probs, cm)
    assert d[0] < 1
    assert d.sum() == pytest.approx(1)
    assert BIT_PATTERNS[0] == "000"
