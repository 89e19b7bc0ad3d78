"""Single- and two-qutrit gate library.

Rotations act inside a two-level subspace ``(ab)`` and leave the third level
untouched::

    R_alpha^(ab)(theta) = exp(-i theta/2 sigma_alpha^(ab))

with ``sigma_x^(ab) = |a><b| + |b><a|``, ``sigma_y^(ab) = -i|a><b| + i|b><a|``
and ``sigma_z^(ab) = |a><a| - |b><b|``.  Products such as ``A @ B`` are read
right to left in time: ``B`` is applied first.  Global phases are kept.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from typing import Sequence

import numpy as np

from .states import basis_index

UNITARY_TOL = 1e-10

SUBSPACES = ((0, 1), (1, 2), (0, 2))


def subspace(value) -> tuple[int, int]:
    """Normalize ``"12"``, ``(1, 2)`` or ``[1, 2]`` to a level pair."""
    if isinstance(value, str):
        value = tuple(int(ch) for ch in value.strip("()"))
    pair = tuple(int(v) for v in value)
    if pair not in SUBSPACES:
        raise ValueError(f"unknown subspace {value!r}; use 01, 12 or 02")
    return pair


def subspace_name(sub) -> str:
    a, b = subspace(sub)
    return f"{a}{b}"


@dataclass(frozen=True)
class Gate:
    """A unitary with a symbolic label and the parameters that built it."""

    matrix: np.ndarray = field(repr=False)
    label: str
    params: tuple[float, ...] = ()

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=complex)
        if mat.shape not in ((3, 3), (9, 9), (27, 27)):
            raise ValueError(f"unsupported gate shape {mat.shape}")
        err = np.abs(mat.conj().T @ mat - np.eye(mat.shape[0])).max()
        if err > UNITARY_TOL:
            raise ValueError(f"{self.label} is not unitary (error {err:.2e})")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))

    @property
    def arity(self) -> int:
        return {3: 1, 9: 2, 27: 3}[self.matrix.shape[0]]

    def dagger(self) -> "Gate":
        return Gate(self.matrix.conj().T, self.label + "^dag", self.params)

    def __matmul__(self, other: "Gate") -> "Gate":
        return Gate(self.matrix @ other.matrix, f"{self.label}*{other.label}",
                    self.params + other.params)

    def to_dict(self) -> dict:
        return {"label": self.label, "params": list(self.params),
                "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in self.matrix]}


def subspace_pauli(axis: str, sub) -> np.ndarray:
    """Pauli matrix embedded in the ``(ab)`` subspace of a qutrit."""
    a, b = subspace(sub)
    m = np.zeros((3, 3), dtype=complex)
    if axis == "x":
        m[a, b] = m[b, a] = 1
    elif axis == "y":
        m[a, b], m[b, a] = -1j, 1j
    elif axis == "z":
        m[a, a], m[b, b] = 1, -1
    else:
        raise ValueError(f"unknown axis {axis!r}")
    return m


def rotation_gate(axis: str, sub, theta: float) -> Gate:
    """``exp(-i theta/2 sigma_axis^(sub))`` with a unit entry on the idle level."""
    a, b = subspace(sub)
    proj = np.zeros((3, 3))
    proj[a, a] = proj[b, b] = 1
    mat = (np.eye(3) - proj) + np.cos(theta / 2) * proj \
        - 1j * np.sin(theta / 2) * subspace_pauli(axis, (a, b))
    return Gate(mat, f"R{axis}{a}{b}", (theta,))


def dephased_r12(theta: float, phi: float) -> Gate:
    """(12) rotation about the in-plane axis selected by ``phi``.

    ``phi = pi`` gives ``R_x^(12)(theta)`` and ``phi = pi/2`` gives
    ``R_y^(12)(theta)``; the (12) block is
    ``[[c, i e^{i phi} s], [i e^{-i phi} s, c]]`` with ``c, s = cos, sin(theta/2)``.
    """
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    mat = np.eye(3, dtype=complex)
    mat[1, 1] = mat[2, 2] = c
    mat[1, 2] = 1j * np.exp(1j * phi) * s
    mat[2, 1] = 1j * np.exp(-1j * phi) * s
    return Gate(mat, "Rn12", (theta, phi))


#: Axis phase that reproduces each ideal (12) rotation in :func:`dephased_r12`.
NOMINAL_AXIS_PHASE = {"x": np.pi, "y": np.pi / 2}


@dataclass(frozen=True)
class CnotModelParams:
    """Free parameters of the hardware CNOT when the control sits in ``|2>``.

    The control-2 block maps ``|20> -> a|20> + b|21>`` and
    ``|21> -> b*|20> + c|21>`` with ``a = e^{i alpha}/sqrt2``,
    ``b = e^{i beta}/sqrt2``, ``c = -e^{-i alpha}/sqrt2``; ``|22>`` picks up
    ``e^{i phi}``.
    """

    alpha: float = 0.0
    beta: float = 0.0
    phi: float = np.pi / 2

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.alpha, self.beta, self.phi)


IDEAL_CNOT = CnotModelParams(0.0, 0.0, 0.0)


def cnot_model(params: CnotModelParams = CnotModelParams()) -> Gate:
    """9x9 model of the default hardware CNOT extended to qutrits (control first)."""
    a = np.exp(1j * params.alpha) / np.sqrt(2)
    b = np.exp(1j * params.beta) / np.sqrt(2)
    c = -np.exp(-1j * params.alpha) / np.sqrt(2)
    u = np.zeros((9, 9), dtype=complex)

    def col(src, out):
        for label, amp in out:
            u[basis_index(label), basis_index(src)] = amp

    col("00", [("00", 1)])
    col("01", [("01", 1)])
    col("02", [("02", 1)])
    col("10", [("11", 1)])
    col("11", [("10", 1)])
    col("12", [("12", 1j)])
    col("20", [("20", a), ("21", b)])
    col("21", [("20", np.conj(b)), ("21", c)])
    col("22", [("22", np.exp(1j * params.phi))])
    return Gate(u, "CNOT", params.as_tuple())


# Basis-change decompositions in time order: (axis, subspace, angle).
_BASIS_CHANGES = {
    ("H", (0, 1)): [("y", "01", np.pi / 2), ("x", "01", -np.pi)],
    ("H", (0, 2)): [("y", "01", -np.pi), ("y", "12", -np.pi / 2),
                    ("x", "12", np.pi), ("y", "01", np.pi)],
    ("H", (1, 2)): [("x", "12", -np.pi), ("y", "12", -np.pi / 2)],
    ("H_y", (0, 1)): [("y", "01", np.pi), ("x", "01", -np.pi / 2)],
    ("H_y", (0, 2)): [("y", "12", -np.pi), ("y", "01", np.pi),
                      ("x", "01", -np.pi / 2), ("y", "12", np.pi)],
    ("H_y", (1, 2)): [("y", "12", np.pi), ("x", "12", -np.pi / 2)],
}


def measurement_basis_sequence(kind: str, sub) -> list[tuple[str, tuple[int, int], float]]:
    """Native rotations realizing ``H`` or ``H_y`` in ``sub``, first-applied first."""
    key = (kind, subspace(sub))
    if key not in _BASIS_CHANGES:
        raise ValueError(f"unknown basis change {kind!r}")
    return [(ax, subspace(s), th) for ax, s, th in _BASIS_CHANGES[key]]


def measurement_basis_gate(kind: str, sub) -> Gate:
    """Product of the native rotations that rotate ``sigma_x`` (``H``) or
    ``sigma_y`` (``H_y``) of ``sub`` onto the computational basis."""
    seq = [rotation_gate(ax, s, th) for ax, s, th in measurement_basis_sequence(kind, sub)]
    mat = reduce(lambda acc, g: g.matrix @ acc, seq, np.eye(3, dtype=complex))
    return Gate(mat, f"{kind}{subspace_name(sub)}")


def basis_change_signs(kind: str, sub) -> dict[int, int]:
    """Eigenvalue carried by each subspace level after the basis change.

    ``V sigma V^dag`` is diagonal for the basis-change gate ``V``; the sign on
    each level is what a computational-basis outcome contributes to the
    Pauli expectation.
    """
    a, b = subspace(sub)
    v = measurement_basis_gate(kind, sub).matrix
    axis = "x" if kind == "H" else "y"
    diag = np.real(np.diag(v @ subspace_pauli(axis, sub) @ v.conj().T))
    return {a: int(np.rint(diag[a])), b: int(np.rint(diag[b]))}


def x_plus(phase_offset: float | None = None) -> Gate:
    """``R_y^(01)(pi) R_y^(12)(pi)``, which sends ``|2>`` to ``|0>``.

    With ``phase_offset`` the (12) factor is replaced by its dephased
    version, which only changes phases of the output.
    """
    if phase_offset is None:
        r12 = rotation_gate("y", "12", np.pi)
    else:
        r12 = dephased_r12(np.pi, NOMINAL_AXIS_PHASE["y"] + phase_offset)
    return Gate(rotation_gate("y", "01", np.pi).matrix @ r12.matrix, "Xplus")


def lowering_sequence(basis: str, xplus_phase: float | None = None) -> list[tuple[int, Gate]]:
    """Local gates taking ``|basis>`` to ``|0...0>`` up to a global phase.

    ``xplus_phase`` dephases the (12) half of every ``X_+``.
    """
    seq = []
    for q, digit in enumerate(basis):
        if digit == "0":
            continue
        if digit == "1":
            seq.append((q, rotation_gate("y", "01", np.pi)))
        elif digit == "2":
            seq.append((q, x_plus(xplus_phase)))
        else:
            raise ValueError(f"invalid digit {digit!r} in {basis!r}")
    return seq


def lowering_rotations(digit: str) -> list[tuple[str, tuple[int, int], float]]:
    """Native rotations (first-applied first) that lower one digit to ``0``."""
    if digit == "0":
        return []
    if digit == "1":
        return [("y", (0, 1), np.pi)]
    if digit == "2":
        return [("y", (1, 2), np.pi), ("y", (0, 1), np.pi)]
    raise ValueError(f"invalid digit {digit!r}")


def make_gate(label: str, params: Sequence[float] = ()) -> Gate:
    """Rebuild a gate from its label and parameters (circuit files use this)."""
    params = tuple(float(p) for p in params)
    if len(label) == 4 and label[0] == "R" and label[1] in "xyz" and label[2:] in ("01", "12", "02"):
        _expect(label, params, 1)
        return rotation_gate(label[1], label[2:], params[0])
    if label == "Rn12":
        _expect(label, params, 2)
        return dephased_r12(*params)
    if label == "CNOT":
        if not params:
            return cnot_model()
        _expect(label, params, 3)
        return cnot_model(CnotModelParams(*params))
    if label == "Xplus":
        return x_plus(params[0] if params else None)
    if label in ("H01", "H12", "H02", "H_y01", "H_y12", "H_y02"):
        return measurement_basis_gate(label[:-2], label[-2:])
    raise KeyError(f"unknown gate label {label!r}")


def _expect(label, params, n):
    if len(params) != n:
        raise ValueError(f"{label} takes {n} parameter(s), got {len(params)}")


def is_known_label(label: str) -> bool:
    try:
        make_gate(label, _default_params(label))
    except (KeyError, ValueError):
        return False
    return True


def _default_params(label: str) -> tuple[float, ...]:
    if label == "Rn12":
        return (0.0, 0.0)
    if label.startswith("R"):
        return (0.0,)
    return ()
