"""Virtual readout: Born rule, 0-1 discriminator, shot sampling, mitigation.

The hardware discriminator only tells ``|0>`` from "not ``|0>``", so level 2
reads as 1.  Populations of other basis states are measured by lowering the
basis state of interest to ``|000>`` and counting all-zero outcomes.
Readout noise is a column-stochastic 8x8 confusion matrix over the three
discriminated bits, built as a tensor product of independent per-site
channels.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import reduce
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
from scipy.optimize import nnls

from .circuit import apply_gate
from .exceptions import ConditioningError
from .gates import lowering_sequence
from .states import PureState

BIT_PATTERNS = tuple(np.binary_repr(i, 3) for i in range(8))


@dataclass(frozen=True)
class ReadoutErrorParams:
    """Per-site readout error: ``p10`` = P(read 1 | prepared 0), ``p01`` = P(read 0 | prepared 1)."""

    p10: float
    p01: float

    def __post_init__(self):
        for name in ("p10", "p01"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} = {v} is not a probability")

    def matrix(self) -> np.ndarray:
        return np.array([[1 - self.p10, self.p01],
                         [self.p10, 1 - self.p01]])


#: Calibration data of the five-transmon device (probabilities, not percent).
CHIP_READOUT = {
    "Q0": ReadoutErrorParams(0.030, 0.019),
    "Q1": ReadoutErrorParams(0.052, 0.034),
    "Q2": ReadoutErrorParams(0.035, 0.017),
    "Q3": ReadoutErrorParams(0.035, 0.008),
    "Q4": ReadoutErrorParams(0.029, 0.010),
}


def chip_readout(sites: Sequence[str] = ("Q2", "Q3", "Q4")) -> tuple[ReadoutErrorParams, ...]:
    return tuple(CHIP_READOUT[s] for s in sites)


@dataclass(frozen=True)
class ConfusionMatrix:
    """Column-stochastic map from prepared to measured 3-bit patterns.

    Row/column ``k`` is the pattern ``format(k, '03b')``; the first bit
    belongs to ``site_order[0]``.
    """

    matrix: np.ndarray = field(repr=False)
    site_order: tuple[str, ...] = ("q0", "q1", "q2")

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.shape != (8, 8):
            raise ValueError("confusion matrix must be 8x8")
        if m.min() < -1e-12 or m.max() > 1 + 1e-12:
            raise ValueError("confusion entries must lie in [0, 1]")
        if np.abs(m.sum(axis=0) - 1).max() > 1e-10:
            raise ValueError("confusion matrix columns must sum to 1")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "site_order", tuple(self.site_order))

    def to_dict(self) -> dict:
        return {"site_order": list(self.site_order), "matrix": self.matrix.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "ConfusionMatrix":
        return cls(np.array(data["matrix"]), tuple(data.get("site_order", ("q0", "q1", "q2"))))


def build_confusion(params: Sequence[ReadoutErrorParams],
                    site_order: Sequence[str] | None = None) -> ConfusionMatrix:
    """Tensor product of the per-site 2x2 channels ``[[1-p10, p01], [p10, 1-p01]]``."""
    if len(params) != 3:
        raise ValueError("need readout parameters for exactly three sites")
    m = reduce(np.kron, [p.matrix() for p in params])
    return ConfusionMatrix(m, tuple(site_order or ("q0", "q1", "q2")))


@dataclass(frozen=True)
class ShotCounts:
    counts: Mapping[str, int]
    n_shots: int
    seed: int | None = None

    def __post_init__(self):
        counts = {k: int(self.counts.get(k, 0)) for k in BIT_PATTERNS}
        extra = set(self.counts) - set(BIT_PATTERNS)
        if extra:
            raise ValueError(f"unexpected outcome labels {sorted(extra)}")
        if sum(counts.values()) != self.n_shots:
            raise ValueError("counts do not sum to n_shots")
        object.__setattr__(self, "counts", counts)

    def frequencies(self) -> np.ndarray:
        return np.array([self.counts[k] for k in BIT_PATTERNS], dtype=float) / self.n_shots

    def to_dict(self) -> dict:
        return {"n_shots": self.n_shots, "counts": dict(self.counts), "seed": self.seed}

    @classmethod
    def from_dict(cls, data: dict) -> "ShotCounts":
        return cls(data["counts"], int(data["n_shots"]), data.get("seed"))

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2))


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """Counter-based Philox generator keyed by ``seed`` and a stream index."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(s) for s in stream))
    return np.random.Generator(np.random.Philox(ss))


def born_probabilities(state: PureState) -> np.ndarray:
    return np.abs(state.amplitudes) ** 2


def discriminate(trits: str) -> str:
    """0-1 discriminator: ``0 -> 0``, ``1 -> 1``, ``2 -> 1``."""
    if any(t not in "012" for t in trits):
        raise ValueError(f"invalid trit string {trits!r}")
    return trits.replace("2", "1")


def _discrimination_map() -> np.ndarray:
    """8x27 0/1 matrix sending each trit outcome to its discriminated bits."""
    m = np.zeros((8, 27))
    for i in range(27):
        trits = np.base_repr(i, 3).zfill(3)
        m[int(discriminate(trits), 2), i] = 1
    return m


DISCRIMINATION = _discrimination_map()


def discriminated_probabilities(probs: np.ndarray, noise: ConfusionMatrix | None = None) -> np.ndarray:
    """Analytic 8-outcome distribution, optionally passed through ``noise``."""
    p = DISCRIMINATION @ np.asarray(probs, dtype=float)
    return p if noise is None else noise.matrix @ p


def _check_probs(probs) -> np.ndarray:
    p = np.asarray(probs, dtype=float)
    if p.shape != (27,):
        raise ValueError("expected 27 probabilities")
    if p.min() < -1e-10:
        raise ValueError("negative probability")
    if abs(p.sum() - 1) > 1e-8:
        raise ValueError(f"probabilities sum to {p.sum()!r}")
    p = np.clip(p, 0, None)
    return p / p.sum()


def sample_shots(probs, n: int, noise: ConfusionMatrix | None = None,
                 seed: int = 0, rng: np.random.Generator | None = None) -> ShotCounts:
    """Draw ``n`` trit outcomes, discriminate them and apply readout noise.

    Noise is applied shot by shot: the shots landing on each true bit pattern
    are redistributed by a multinomial draw from that confusion column.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    p = _check_probs(probs)
    rng = rng or make_rng(seed)
    trit_counts = rng.multinomial(n, p)
    bits = DISCRIMINATION @ trit_counts
    if noise is not None:
        noisy = np.zeros(8, dtype=np.int64)
        for j in np.nonzero(bits)[0]:
            noisy += rng.multinomial(int(bits[j]), noise.matrix[:, j])
        bits = noisy
    return ShotCounts(dict(zip(BIT_PATTERNS, (int(b) for b in bits))), n, seed)


def lower(state: PureState, basis: str, xplus_phase: float | None = None) -> np.ndarray:
    """Amplitudes after the lowering gates for ``basis``."""
    amps = np.array(state.amplitudes)
    for q, gate in lowering_sequence(basis, xplus_phase):
        amps = apply_gate(amps, gate.matrix, (q,), state.n_qutrits)
    return amps


def mitigate(counts: ShotCounts | np.ndarray, cm: ConfusionMatrix, cond_limit: float = 1e8) -> np.ndarray:
    """Solve ``cm @ q = p_hat`` for ``q >= 0`` by non-negative least squares.

    The sum of ``q`` is left free.
    """
    p = counts.frequencies() if isinstance(counts, ShotCounts) else np.asarray(counts, dtype=float)
    cond = np.linalg.cond(cm.matrix)
    if not np.isfinite(cond) or cond > cond_limit:
        raise ConditioningError(f"confusion matrix condition number {cond:.3g}")
    q, _ = nnls(cm.matrix, p)
    return q


@dataclass(frozen=True)
class BasisEstimate:
    """One lowering experiment: raw and (optionally) mitigated P(000)."""

    basis: str
    p_hat: float
    variance: float
    p_raw: float
    variance_raw: float
    counts: ShotCounts | None = None
    seed: int | None = None


def _estimate(counts: ShotCounts, n: int, cm: ConfusionMatrix | None) -> tuple[float, float, float, float]:
    raw = counts.counts["000"] / n
    var_raw = raw * (1 - raw) / n
    if cm is None:
        return raw, var_raw, raw, var_raw
    q = float(mitigate(counts, cm)[0])
    qc = min(max(q, 0.0), 1.0)
    return q, qc * (1 - qc) / n, raw, var_raw


def estimate_basis_probability(state: PureState, basis: str, n: int = 1024,
                               noise: ConfusionMatrix | None = None, seed: int = 0,
                               mitigation: bool = False, exact: bool = False,
                               rng: np.random.Generator | None = None) -> tuple[float, float]:
    """Estimate ``|<basis|psi>|^2`` with the lowering protocol.

    Returns ``(p_hat, var)`` with ``var = p_hat (1 - p_hat) / n``.  In exact
    mode the analytic all-zero probability (through the noise channel if one
    is given) is returned with zero variance.
    """
    est = basis_experiment(state, basis, n, noise, seed, mitigation, exact, rng)
    return est.p_hat, est.variance


def basis_experiment(state: PureState, basis: str, n: int = 1024,
                     noise: ConfusionMatrix | None = None, seed: int = 0,
                     mitigation: bool = False, exact: bool = False,
                     rng: np.random.Generator | None = None) -> BasisEstimate:
    """Full record of one lowering experiment (see :func:`estimate_basis_probability`)."""
    amps = lower(state, basis)
    probs = np.abs(amps) ** 2
    return measure_all_zero(probs, n, noise, seed, mitigation, exact, rng, basis)


def measure_all_zero(probs: np.ndarray, n: int, noise: ConfusionMatrix | None, seed: int,
                     mitigation: bool, exact: bool, rng=None, basis: str = "000") -> BasisEstimate:
    """Estimate P(read 000) from a 27-outcome distribution."""
    if exact:
        dist = discriminated_probabilities(probs, noise)
        raw = float(dist[0])
        if noise is not None and mitigation:
            return BasisEstimate(basis, float(mitigate(dist, noise)[0]), 0.0, raw, 0.0, None, seed)
        return BasisEstimate(basis, raw, 0.0, raw, 0.0, None, seed)
    counts = sample_shots(probs / probs.sum(), n, noise, seed, rng)
    cm = noise if mitigation else None
    p, var, raw, var_raw = _estimate(counts, n, cm)
    return BasisEstimate(basis, p, var, raw, var_raw, counts, seed)
