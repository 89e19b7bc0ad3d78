import numpy as np
import pytest
from hypothesis import strategies as st

from qutrit_ghz.states import PureState

angles = st.floats(min_value=-2 * np.pi, max_value=2 * np.pi, allow_nan=False)
seeds = st.integers(min_value=0, max_value=2**31 - 1)


def random_state(rng: np.random.Generator, n: int = 3) -> PureState:
    v = rng.normal(size=3**n) + 1j * rng.normal(size=3**n)
    return PureState.from_amplitudes(v)


@st.composite
def pure_states(draw, n: int = 3):
    return random_state(np.random.default_rng(draw(seeds)), n)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
