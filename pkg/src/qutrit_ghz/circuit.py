"""Circuit data model, statevector execution and the GHZ preparation circuit."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field, replace
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .exceptions import ConnectivityError, DimensionError
from .gates import CnotModelParams, Gate, IDEAL_CNOT, is_known_label, make_gate
from .states import PureState

#: Angles the discrete toolbox may use.
RESTRICTED_ANGLES = (np.pi, -np.pi, np.pi / 2, -np.pi / 2)

#: Angle of the first (01) rotation: cos(theta/2) = sqrt(2/3).
GHZ_FREE_THETA = 2 * np.arctan(1 / np.sqrt(2))

#: Hardware transmons used for the three qutrits, left to right.
EXPERIMENT_SITES = ("Q2", "Q3", "Q4")


def line_connectivity(n: int) -> frozenset[frozenset[int]]:
    return frozenset(frozenset((i, i + 1)) for i in range(n - 1))


#: Five transmons coupled in a linear chain.
DEVICE_CONNECTIVITY = line_connectivity(5)


@dataclass(frozen=True)
class GateInstruction:
    """A gate named by label + parameters acting on ``targets`` (control first)."""

    label: str
    params: tuple[float, ...] = ()
    targets: tuple[int, ...] = ()
    dagger: bool = False

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))

    def gate(self) -> Gate:
        g = _cached_gate(self.label, self.params)
        return g.dagger() if self.dagger else g

    def inverse(self) -> "GateInstruction":
        return replace(self, dagger=not self.dagger)

    def to_dict(self) -> dict:
        d = {"gate": self.label, "params": list(self.params), "targets": list(self.targets)}
        if self.dagger:
            d["dagger"] = True
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "GateInstruction":
        return cls(data["gate"], tuple(data.get("params", ())), tuple(data["targets"]),
                   bool(data.get("dagger", False)))


@lru_cache(maxsize=4096)
def _cached_gate(label: str, params: tuple[float, ...]) -> Gate:
    return make_gate(label, params)


@dataclass(frozen=True)
class Circuit:
    n_qutrits: int
    instructions: tuple[GateInstruction, ...] = ()
    connectivity: frozenset = field(default=None)

    def __post_init__(self):
        conn = self.connectivity
        if conn is None:
            conn = line_connectivity(self.n_qutrits)
        conn = frozenset(frozenset(int(q) for q in pair) for pair in conn)
        object.__setattr__(self, "connectivity", conn)
        object.__setattr__(self, "instructions", tuple(self.instructions))

    def __len__(self):
        return len(self.instructions)

    def __add__(self, other: "Circuit") -> "Circuit":
        if other.n_qutrits != self.n_qutrits:
            raise DimensionError("cannot concatenate circuits of different widths")
        return replace(self, instructions=self.instructions + other.instructions)

    def append(self, *instructions: GateInstruction) -> "Circuit":
        return replace(self, instructions=self.instructions + tuple(instructions))

    def count(self, label: str) -> int:
        return sum(1 for ins in self.instructions if ins.label == label)

    @property
    def cnot_count(self) -> int:
        return self.count("CNOT")

    def inverse(self) -> "Circuit":
        return replace(self, instructions=tuple(i.inverse() for i in reversed(self.instructions)))

    def to_dict(self) -> dict:
        return {"n": self.n_qutrits,
                "connectivity": sorted(sorted(p) for p in self.connectivity),
                "instructions": [i.to_dict() for i in self.instructions]}

    @classmethod
    def from_dict(cls, data: dict) -> "Circuit":
        return cls(int(data["n"]),
                   tuple(GateInstruction.from_dict(d) for d in data["instructions"]),
                   data.get("connectivity"))

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2))

    @classmethod
    def load(cls, path) -> "Circuit":
        return cls.from_dict(json.loads(Path(path).read_text()))


def validate(c: Circuit) -> list[str]:
    """Human-readable list of problems; empty when the circuit is valid."""
    problems = []
    for k, ins in enumerate(c.instructions):
        if not is_known_label(ins.label):
            problems.append(f"instruction {k}: unknown gate label {ins.label!r}")
            continue
        if any(t < 0 or t >= c.n_qutrits for t in ins.targets):
            problems.append(f"instruction {k}: target out of range {ins.targets}")
            continue
        if len(set(ins.targets)) != len(ins.targets):
            problems.append(f"instruction {k}: repeated target {ins.targets}")
            continue
        try:
            arity = ins.gate().arity
        except (KeyError, ValueError) as exc:
            problems.append(f"instruction {k}: {exc}")
            continue
        if arity != len(ins.targets):
            problems.append(f"instruction {k}: {ins.label} needs {arity} target(s)")
        elif arity == 2 and frozenset(ins.targets) not in c.connectivity:
            problems.append(f"instruction {k}: pair {ins.targets} violates connectivity")
    return problems


def apply_gate(amps: np.ndarray, matrix: np.ndarray, targets: Sequence[int], n: int) -> np.ndarray:
    """Apply a k-qutrit unitary to the listed qutrits of a flat amplitude vector."""
    k = len(targets)
    psi = amps.reshape((3,) * n)
    op = matrix.reshape((3,) * (2 * k))
    out = np.tensordot(op, psi, axes=(list(range(k, 2 * k)), list(targets)))
    return np.moveaxis(out, list(range(k)), list(targets)).reshape(-1)


def apply_circuit(c: Circuit, state: PureState) -> PureState:
    """Run ``c`` on ``state`` instruction by instruction."""
    if state.n_qutrits != c.n_qutrits:
        raise DimensionError(f"circuit has {c.n_qutrits} qutrits, state has {state.n_qutrits}")
    amps = np.array(state.amplitudes)
    for k, ins in enumerate(c.instructions):
        if any(t < 0 or t >= c.n_qutrits for t in ins.targets):
            raise IndexError(f"instruction {k}: target out of range {ins.targets}")
        if len(ins.targets) == 2 and frozenset(ins.targets) not in c.connectivity:
            raise ConnectivityError(f"instruction {k}: pair {ins.targets} is not connected")
        amps = apply_gate(amps, ins.gate().matrix, ins.targets, c.n_qutrits)
    return PureState(c.n_qutrits, amps / np.linalg.norm(amps))


def run(c: Circuit, initial: str | None = None) -> PureState:
    """Shorthand for executing ``c`` on a basis state (``|0...0>`` by default)."""
    return apply_circuit(c, PureState.basis(initial or "0" * c.n_qutrits))


def circuit_unitary(c: Circuit) -> np.ndarray:
    dim = 3**c.n_qutrits
    cols = [apply_circuit(c, PureState(c.n_qutrits, np.eye(dim)[j])).amplitudes for j in range(dim)]
    return np.array(cols).T


# --- GHZ preparation ---------------------------------------------------------

def _stage_c_candidates() -> Iterable[tuple[tuple[str, float], ...]]:
    per_qutrit = [(ax, th) for ax in ("x", "y") for th in RESTRICTED_ANGLES]
    return itertools.product(per_qutrit, repeat=3)


def find_stage_c_rotations(exact_phase: bool = True) -> tuple[tuple[str, float], ...]:
    """Exhaustively pick one (12) rotation per qutrit for the shifting stage.

    Searches every (axis, angle) assignment with axis in {x, y} and angle in
    {+-pi, +-pi/2}, keeping those that send ``|111>`` to ``|222>`` with unit
    modulus, leave ``|000>`` alone and use both axes. With ``exact_phase``
    the phase picked up must be exactly +1, so the ideal CNOT yields the
    zero-phase GHZ state. The first hit in enumeration order is returned.
    """
    for combo in _stage_c_candidates():
        if len({ax for ax, _ in combo}) < 2:
            continue
        c = Circuit(3, tuple(GateInstruction(f"R{ax}12", (th,), (q,)) for q, (ax, th) in enumerate(combo)))
        out = run(c, "111")
        amp = out.amplitude("222")
        if abs(abs(amp) - 1) > 1e-10:
            continue
        if exact_phase and abs(amp - 1) > 1e-10:
            continue
        return combo
    raise RuntimeError("no stage (c) combination found")


#: Result of :func:`find_stage_c_rotations`, frozen here and re-checked in the tests.
STAGE_C_ROTATIONS = (("x", np.pi), ("x", np.pi), ("y", -np.pi))

#: Instruction counts at the end of stages (a), (b), (c), (d).
GHZ_STAGE_ENDS = (1, 3, 6, 9)


def ghz_circuit(free_theta: float = GHZ_FREE_THETA,
                cnot: CnotModelParams = CnotModelParams(),
                connectivity=None) -> Circuit:
    """Four-CNOT circuit preparing the three-qutrit GHZ state from ``|000>``.

    Qutrit 1 (the middle one) controls every CNOT.

    (a) ``R_y^(01)(free_theta)`` on qutrit 1;
    (b) CNOT 1->0 and 1->2, giving ``sqrt(2/3)|000> + sqrt(1/3)|111>``;
    (c) a pi rotation in (12) on each qutrit moves ``|111>`` to ``|222>``;
    (d) ``R_y^(01)(pi/2)`` on qutrit 1 then CNOT 1->0 and 1->2 again.

    The ``|222>`` branch acquires ``e^{2i phi}`` from the CNOTs' control-2 phase.
    """
    p = cnot.as_tuple()
    ins = [GateInstruction("Ry01", (free_theta,), (1,)),
           GateInstruction("CNOT", p, (1, 0)),
           GateInstruction("CNOT", p, (1, 2))]
    ins += [GateInstruction(f"R{ax}12", (th,), (q,)) for q, (ax, th) in enumerate(STAGE_C_ROTATIONS)]
    ins += [GateInstruction("Ry01", (np.pi / 2,), (1,)),
            GateInstruction("CNOT", p, (1, 0)),
            GateInstruction("CNOT", p, (1, 2))]
    return Circuit(3, tuple(ins), connectivity)


def ghz_stages(c: Circuit | None = None) -> list[Circuit]:
    """Prefixes of the GHZ circuit: empty, then after stages (a) to (d)."""
    c = c or ghz_circuit()
    return [replace(c, instructions=c.instructions[:end]) for end in (0,) + GHZ_STAGE_ENDS]


def ideal_ghz_circuit() -> Circuit:
    return ghz_circuit(cnot=IDEAL_CNOT)
