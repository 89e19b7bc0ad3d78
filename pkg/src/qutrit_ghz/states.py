"""Pure and mixed states of qutrit registers.

Basis index ``i`` of an ``n``-qutrit register is the base-3 number whose
leftmost digit is qutrit 0, so ``|012>`` sits at index ``0*9 + 1*3 + 2 = 5``.
Entropies are reported in base 3, which makes a maximally entangled qutrit
bipartition read exactly 1.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .exceptions import DimensionError

NORM_TOL = 1e-10
RANK_TOL = 1e-8

#: Bipartition labels of a three-qutrit register mapped to the qutrits kept
#: on the left of the cut.
BIPARTITIONS = {"A|BC": (0,), "AB|C": (0, 1), "AC|B": (0, 2)}


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=complex)
    arr.setflags(write=False)
    return arr


def basis_index(label: str) -> int:
    """Index of a base-3 digit string such as ``"012"``."""
    if not label or any(ch not in "012" for ch in label):
        raise ValueError(f"invalid base-3 string {label!r}")
    return int(label, 3)


def basis_label(index: int, n_qutrits: int) -> str:
    """Inverse of :func:`basis_index`."""
    return np.base_repr(index, 3).zfill(n_qutrits)


@dataclass(frozen=True)
class PureState:
    """Normalized state vector of ``n_qutrits`` qutrits."""

    n_qutrits: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = _freeze(np.asarray(self.amplitudes).reshape(-1))
        if self.n_qutrits < 1:
            raise DimensionError("n_qutrits must be positive")
        if amps.size != 3**self.n_qutrits:
            raise DimensionError(
                f"expected {3**self.n_qutrits} amplitudes, got {amps.size}")
        norm = np.vdot(amps, amps).real
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized (norm^2 = {norm!r})")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_amplitudes(cls, amplitudes, normalize: bool = True) -> "PureState":
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        n = int(round(np.log(amps.size) / np.log(3)))
        if normalize:
            norm = np.linalg.norm(amps)
            if norm == 0:
                raise ValueError("cannot normalize the zero vector")
            amps = amps / norm
        return cls(n, amps)

    @classmethod
    def basis(cls, label: str) -> "PureState":
        amps = np.zeros(3 ** len(label), dtype=complex)
        amps[basis_index(label)] = 1.0
        return cls(len(label), amps)

    @classmethod
    def ghz(cls, phi1: float = 0.0, phi2: float = 0.0) -> "PureState":
        """``(|000> + e^{i phi1}|111> + e^{i phi2}|222>)/sqrt(3)``."""
        amps = np.zeros(27, dtype=complex)
        amps[0] = 1.0
        amps[13] = np.exp(1j * phi1)
        amps[26] = np.exp(1j * phi2)
        return cls(3, amps / np.sqrt(3))

    @property
    def dim(self) -> int:
        return 3**self.n_qutrits

    def amplitude(self, label: str) -> complex:
        return complex(self.amplitudes[basis_index(label)])

    def density_matrix(self) -> "DensityMatrix":
        return DensityMatrix(self.n_qutrits, np.outer(self.amplitudes, self.amplitudes.conj()))

    def to_dict(self) -> dict:
        return {"n": self.n_qutrits,
                "amplitudes": [[float(a.real), float(a.imag)] for a in self.amplitudes]}

    @classmethod
    def from_dict(cls, data: dict) -> "PureState":
        amps = np.array([complex(re, im) for re, im in data["amplitudes"]])
        return cls(int(data["n"]), amps)


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian ``3^n x 3^n`` matrix.

    ``reconstructed=True`` marks matrices assembled from measured data, which
    may have a trace away from one (raw readout gives traces like 1.12).
    """

    n_qutrits: int
    entries: np.ndarray = field(repr=False)
    reconstructed: bool = False

    def __post_init__(self):
        rho = _freeze(self.entries)
        dim = 3**self.n_qutrits
        if rho.shape != (dim, dim):
            raise DimensionError(f"expected a {dim}x{dim} matrix, got {rho.shape}")
        if np.abs(rho - rho.conj().T).max() > NORM_TOL:
            raise ValueError("density matrix is not Hermitian")
        if not self.reconstructed and abs(np.trace(rho) - 1.0) > NORM_TOL:
            raise ValueError(f"trace is {np.trace(rho).real!r}, expected 1")
        object.__setattr__(self, "entries", rho)

    @classmethod
    def maximally_mixed(cls, n_qutrits: int) -> "DensityMatrix":
        dim = 3**n_qutrits
        return cls(n_qutrits, np.eye(dim) / dim)

    @property
    def dim(self) -> int:
        return 3**self.n_qutrits

    @property
    def trace(self) -> float:
        return float(np.trace(self.entries).real)

    def element(self, row: str, col: str) -> complex:
        return complex(self.entries[basis_index(row), basis_index(col)])

    def to_dict(self) -> dict:
        return {"n": self.n_qutrits,
                "reconstructed": self.reconstructed,
                "entries": [[[float(z.real), float(z.imag)] for z in row]
                            for row in self.entries]}

    @classmethod
    def from_dict(cls, data: dict) -> "DensityMatrix":
        rho = np.array([[complex(re, im) for re, im in row] for row in data["entries"]])
        return cls(int(data["n"]), rho, bool(data.get("reconstructed", False)))


@dataclass(frozen=True)
class SchmidtRankVector:
    """Schmidt ranks across ``A|BC``, ``AB|C`` and ``AC|B``."""

    ranks: tuple[int, int, int]
    tolerance: float = RANK_TOL

    def __iter__(self):
        return iter(self.ranks)

    def __eq__(self, other):
        if isinstance(other, SchmidtRankVector):
            return self.ranks == other.ranks
        return self.ranks == tuple(other)

    def __hash__(self):
        return hash(self.ranks)


def _require_three(state: PureState) -> None:
    if state.n_qutrits != 3:
        raise DimensionError("operation is defined for three-qutrit states only")


def _matricize(state: PureState, left: Sequence[int]) -> np.ndarray:
    n = state.n_qutrits
    right = [q for q in range(n) if q not in left]
    tensor = state.amplitudes.reshape((3,) * n).transpose(list(left) + right)
    return tensor.reshape(3 ** len(left), 3 ** len(right))


def _cut(cut: str) -> tuple[int, ...]:
    try:
        return BIPARTITIONS[cut]
    except KeyError:
        raise ValueError(f"unknown bipartition {cut!r}; use one of {list(BIPARTITIONS)}") from None


def schmidt_coefficients(state: PureState, cut: str = "A|BC") -> np.ndarray:
    """Singular values of the matricization across ``cut``, descending."""
    _require_three(state)
    return np.linalg.svd(_matricize(state, _cut(cut)), compute_uv=False)


def schmidt_rank_vector(state: PureState, tol: float = RANK_TOL) -> SchmidtRankVector:
    """Schmidt ranks of a three-qutrit pure state, one per bipartition."""
    _require_three(state)
    ranks = tuple(int(np.sum(schmidt_coefficients(state, cut) > tol))
                  for cut in ("A|BC", "AB|C", "AC|B"))
    return SchmidtRankVector(ranks, tol)


def bipartite_entropy(state: PureState, cut: str) -> float:
    """Base-3 von Neumann entropy of the reduced state across ``cut``."""
    _require_three(state)
    lam = schmidt_coefficients(state, cut) ** 2
    lam = lam[lam > 0]
    return float(-np.sum(lam * np.log(lam)) / np.log(3))


def fidelity(rho: DensityMatrix, target: PureState) -> float:
    """``<psi|rho|psi>`` for a pure target."""
    if rho.dim != target.dim:
        raise DimensionError(f"dimension mismatch: {rho.dim} vs {target.dim}")
    value = np.vdot(target.amplitudes, rho.entries @ target.amplitudes)
    if abs(value.imag) > 1e-10:
        raise ValueError("fidelity has a non-negligible imaginary part")
    return float(value.real)


def ghz_family_fidelity(state: PureState) -> float:
    """Overlap with the best phased GHZ state.

    The maximum of ``|<GHZ(phi1, phi2)|psi>|^2`` over both relative phases is
    ``(|a_000| + |a_111| + |a_222|)^2 / 3``.
    """
    _require_three(state)
    a = np.abs(state.amplitudes[[0, 13, 26]])
    return float(a.sum() ** 2 / 3)


def _ket(*labels_and_weights) -> np.ndarray:
    vec = np.zeros(27, dtype=complex)
    for label, weight in labels_and_weights:
        vec[basis_index(label)] += weight
    return vec


def build_embedded_mixture(kind: str) -> DensityMatrix:
    """Lower-dimensional entangled mixtures embedded in three qutrits.

    ``"two_dim_ghz"``
        Equal mixture of the three two-level GHZ states
        ``(|iii> + |jjj>)/sqrt(2)``.
    ``"two_party_bell"``
        Equal mixture of a qubit Bell pair on each pair of parties, the
        remaining party in ``|0>``.
    """
    s = 1 / np.sqrt(2)
    if kind == "two_dim_ghz":
        kets = [_ket((i * 3, s), (j * 3, s)) for i, j in (("0", "1"), ("0", "2"), ("1", "2"))]
    elif kind == "two_party_bell":
        kets = []
        for pair in ((0, 1), (0, 2), (1, 2)):
            ones = "".join("1" if q in pair else "0" for q in range(3))
            kets.append(_ket(("000", s), (ones, s)))
    else:
        raise ValueError(f"unknown mixture kind {kind!r}")
    rho = sum(np.outer(k, k.conj()) for k in kets) / 3
    return DensityMatrix(3, rho)


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """Reduce ``rho`` onto the qutrits listed in ``keep`` (in ascending order)."""
    n = rho.n_qutrits
    keep = sorted(set(keep))
    if not keep or keep[0] < 0 or keep[-1] >= n:
        raise ValueError(f"keep must be a nonempty subset of range({n})")
    traced = [q for q in range(n) if q not in keep]
    tensor = rho.entries.reshape((3,) * (2 * n))
    in_labels = list(range(2 * n))
    for q in traced:
        in_labels[n + q] = q
    out_labels = keep + [n + q for q in keep]
    reduced = np.einsum(tensor, in_labels, out_labels)
    dim = 3 ** len(keep)
    return DensityMatrix(len(keep), reduced.reshape(dim, dim), rho.reconstructed)


def all_basis_labels(n_qutrits: int = 3) -> list[str]:
    return ["".join(t) for t in itertools.product("012", repeat=n_qutrits)]
