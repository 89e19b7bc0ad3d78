"""Discrete random search for GHZ-preparing circuits.

Candidates are built from a restricted toolbox: (01) y-rotations and (12)
x/y-rotations with angles in ``{+-pi, +-pi/2}``, CNOTs on coupled pairs in
either direction, and at most one ``R_y^(01)`` whose angle is left free and
optimized numerically.  The figure of merit is the overlap with the best
phased GHZ state.

The sampler composes random sequences of toolbox *elements*.  Elements start
out as single gates.  Whenever a candidate reaches a high score with a state
whose support has not been seen before, its gate sequence is pruned of gates
that do not change the output and added to the toolbox as a new element, so
good building blocks are reused.  If nothing new is learned for a while the
toolbox is reset to the primitives.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .circuit import RESTRICTED_ANGLES, Circuit, GateInstruction, circuit_unitary, line_connectivity
from .exceptions import ConnectivityError
from .gates import CnotModelParams, subspace_pauli
from .measurement import make_rng

N_QUTRITS = 3
GHZ_INDICES = (0, 13, 26)
FREE_LABEL = "Ry01"
_FREE_GRID = np.linspace(0.0, np.pi, 65)


def is_free_slot(ins: GateInstruction) -> bool:
    """A free-angle slot is an ``Ry01`` instruction without parameters."""
    return ins.label == FREE_LABEL and not ins.params


def free_slot(qutrit: int) -> GateInstruction:
    return GateInstruction(FREE_LABEL, (), (qutrit,))


@dataclass(frozen=True)
class GateToolbox:
    """Restricted gate set available to the search."""

    local_gates: tuple[str, ...] = ("Ry01", "Rx12", "Ry12")
    angles: tuple[float, ...] = RESTRICTED_ANGLES
    free_angle: bool = True
    cnot: CnotModelParams = CnotModelParams()

    def __post_init__(self):
        allowed = {float(a) for a in RESTRICTED_ANGLES}
        if not set(float(a) for a in self.angles) <= allowed:
            raise ValueError("toolbox angles must be drawn from {+-pi, +-pi/2}")

    def local_instructions(self, n: int = N_QUTRITS) -> list[GateInstruction]:
        return [GateInstruction(label, (th,), (q,))
                for label in self.local_gates for th in self.angles for q in range(n)]

    def cnot_instructions(self, connectivity) -> list[GateInstruction]:
        pairs = sorted(tuple(sorted(p)) for p in connectivity)
        return [GateInstruction("CNOT", self.cnot.as_tuple(), t)
                for a, b in pairs for t in ((a, b), (b, a))]

    def free_instructions(self, n: int = N_QUTRITS) -> list[GateInstruction]:
        return [free_slot(q) for q in range(n)] if self.free_angle else []


@dataclass(frozen=True)
class SearchConfig:
    max_cnots: int = 4
    max_local: int = 10
    trials: int = 100_000
    seed: int = 0
    connectivity: frozenset | None = None
    success_threshold: float = 0.999
    toolbox: GateToolbox = GateToolbox()
    max_elements: int = 5
    learn_threshold: float = 0.5
    restart_after: int = 10_000
    free_probability: float = 0.3

    def __post_init__(self):
        if self.max_cnots < 0 or self.max_local < 1 or self.trials < 1 or self.max_elements < 1:
            raise ValueError("search budgets must be positive")
        if not 0 < self.success_threshold <= 1:
            raise ValueError("success_threshold must lie in (0, 1]")
        conn = self.connectivity
        if conn is None:
            conn = line_connectivity(N_QUTRITS)
        object.__setattr__(self, "connectivity",
                           frozenset(frozenset(int(q) for q in p) for p in conn))


@dataclass(frozen=True)
class Candidate:
    circuit: Circuit
    score: float
    free_angle: float | None = None
    canonical_key: tuple = ()

    def __post_init__(self):
        if not -1e-12 <= self.score <= 1 + 1e-12:
            raise ValueError(f"score {self.score} outside [0, 1]")

    @property
    def cnot_count(self) -> int:
        return self.circuit.cnot_count


@dataclass(frozen=True)
class LogEntry:
    trial: int
    cnots: int
    locals: int
    score: float
    best: float

    def to_dict(self) -> dict:
        return {"trial": self.trial, "cnots": self.cnots, "locals": self.locals,
                "score": self.score, "best": self.best}


@dataclass
class SearchResult:
    best: Candidate | None
    log: list[LogEntry]
    converged: bool
    trials_used: int
    toolbox_size: int

    def save(self, circuit_path, log_path) -> None:
        if self.best is not None:
            self.best.circuit.save(circuit_path)
        with open(log_path, "w") as fh:
            for entry in self.log:
                fh.write(json.dumps(entry.to_dict()) + "\n")


# --- evaluation --------------------------------------------------------------

def _embed(op: np.ndarray, q: int) -> np.ndarray:
    ops = [np.eye(3)] * N_QUTRITS
    ops[q] = op
    return np.kron(np.kron(ops[0], ops[1]), ops[2])


class _Evaluator:
    """Caches full-register matrices and scores instruction sequences."""

    def __init__(self):
        self._mats: dict[GateInstruction, np.ndarray] = {}
        proj = np.diag([1.0, 1.0, 0.0])
        sy = -1j * subspace_pauli("y", "01")
        # R_y^(01)(theta) = cos(theta/2) P + sin(theta/2) (-i sigma_y) + (1 - P)
        self._free = {q: (_embed(proj, q), _embed(sy, q), _embed(np.eye(3) - proj, q))
                      for q in range(N_QUTRITS)}

    def matrix(self, ins: GateInstruction) -> np.ndarray:
        m = self._mats.get(ins)
        if m is None:
            m = circuit_unitary(Circuit(N_QUTRITS, (ins,), _all_pairs()))
            self._mats[ins] = m
        return m

    def evaluate(self, seq: Sequence[GateInstruction]) -> tuple[float, float | None, np.ndarray]:
        """Return ``(score, free_angle, final_amplitudes)`` for a run on ``|000>``."""
        v = np.zeros(27, dtype=complex)
        v[0] = 1.0
        free = [k for k, ins in enumerate(seq) if is_free_slot(ins)]
        if len(free) > 1:
            raise ValueError("at most one free-angle slot per candidate")
        if not free:
            for ins in seq:
                v = self.matrix(ins) @ v
            return _family_score(v), None, v
        k = free[0]
        for ins in seq[:k]:
            v = self.matrix(ins) @ v
        p, s, r = self._free[seq[k].targets[0]]
        vs = np.stack([p @ v, s @ v, r @ v])
        for ins in seq[k + 1:]:
            vs = vs @ self.matrix(ins).T
        w = vs[:, GHZ_INDICES]

        def neg(theta):
            amp = np.cos(theta / 2) * w[0] + np.sin(theta / 2) * w[1] + w[2]
            return -np.abs(amp).sum() ** 2 / 3

        # Coarse grid, then a bounded golden-section/Brent polish around the best point.
        vals = [neg(t) for t in _FREE_GRID]
        i = int(np.argmin(vals))
        lo = _FREE_GRID[max(i - 1, 0)]
        hi = _FREE_GRID[min(i + 1, len(_FREE_GRID) - 1)]
        res = minimize_scalar(neg, bounds=(lo, hi), method="bounded", options={"xatol": 1e-9})
        theta = float(res.x) if res.fun <= vals[i] else float(_FREE_GRID[i])
        final = np.cos(theta / 2) * vs[0] + np.sin(theta / 2) * vs[1] + vs[2]
        return _family_score(final), theta, final


def _all_pairs():
    return frozenset(frozenset((a, b)) for a in range(N_QUTRITS) for b in range(a + 1, N_QUTRITS))


def _family_score(v: np.ndarray) -> float:
    return float(min(np.abs(v[list(GHZ_INDICES)]).sum() ** 2 / 3, 1.0))


_EVALUATOR = _Evaluator()


def evaluate_candidate(circuit: Circuit) -> Candidate:
    """Score a circuit on ``|000>``, optimizing its free-angle slot if it has one.

    The free angle is searched over ``[0, pi]``.  The returned candidate's
    circuit has the optimized angle filled in.
    """
    if circuit.n_qutrits != N_QUTRITS:
        raise ValueError("the search works on three qutrits")
    for k, ins in enumerate(circuit.instructions):
        if len(ins.targets) == 2 and frozenset(ins.targets) not in circuit.connectivity:
            raise ConnectivityError(f"instruction {k}: pair {ins.targets} is not connected")
    seq = circuit.instructions
    score, theta, _ = _EVALUATOR.evaluate(seq)
    filled = _fill_free(seq, theta)
    return Candidate(Circuit(N_QUTRITS, filled, circuit.connectivity), score, theta,
                     canonical_key(seq))


def _fill_free(seq, theta):
    if theta is None:
        return tuple(seq)
    return tuple(GateInstruction(FREE_LABEL, (theta,), ins.targets) if is_free_slot(ins) else ins
                 for ins in seq)


# --- canonical form ----------------------------------------------------------

def _is_rotation(ins: GateInstruction) -> bool:
    return ins.label[0] == "R" and ins.label != "Rn12" and len(ins.params) == 1 and not ins.dagger


def canonicalize(seq: Sequence[GateInstruction]) -> tuple[GateInstruction, ...]:
    """Merge adjacent same-gate rotations on one qutrit and drop identities.

    Rotations about the same axis of the same subspace add their angles; a
    net angle that is a multiple of ``4 pi`` is the identity and is removed
    (a ``2 pi`` rotation is kept since it flips the sign of two levels).
    The result prepares the same state as the input.
    """
    out: list[GateInstruction] = []
    for ins in seq:
        if out and _is_rotation(ins) and _is_rotation(out[-1]) \
                and out[-1].label == ins.label and out[-1].targets == ins.targets:
            theta = out.pop().params[0] + ins.params[0]
            theta = float(np.mod(theta + 2 * np.pi, 4 * np.pi) - 2 * np.pi)
            if not np.isclose(theta, 0.0, atol=1e-12):
                out.append(GateInstruction(ins.label, (theta,), ins.targets))
            continue
        out.append(ins)
    return tuple(out)


def canonical_key(seq: Sequence[GateInstruction]) -> tuple:
    return tuple((ins.label, tuple(round(p, 9) for p in ins.params), ins.targets)
                 for ins in canonicalize(seq))


# --- search ------------------------------------------------------------------

def _support(v: np.ndarray) -> frozenset[int]:
    return frozenset(int(i) for i in np.nonzero(np.abs(v) > 1e-6)[0])


def _freeze_angle(seq, theta) -> tuple[GateInstruction, ...] | None:
    """Replace the free slot by a toolbox rotation if ``theta`` is a toolbox angle."""
    hits = [a for a in RESTRICTED_ANGLES if abs(a - theta) < 1e-6]
    return _fill_free(seq, hits[0]) if hits else None


def _prune(seq, score, final):
    """Drop gates whose removal leaves the output state and score unchanged."""
    seq = list(seq)
    k = 0
    while k < len(seq):
        trial = seq[:k] + seq[k + 1:]
        s2, _, f2 = _EVALUATOR.evaluate(trial)
        if s2 >= score - 1e-9 and abs(abs(np.vdot(f2, final)) - 1) < 1e-9:
            seq = trial
        else:
            k += 1
    return tuple(seq)


def run_search(cfg: SearchConfig = SearchConfig()) -> SearchResult:
    """Randomized composition search with a self-extending toolbox.

    Every generated sequence counts as a trial; duplicates (by canonical key)
    and sequences over budget are skipped without evaluation.  Sampling stops
    at the first candidate whose score exceeds ``cfg.success_threshold``.
    """
    rng = make_rng(cfg.seed)
    tb = cfg.toolbox
    primitives = [(ins,) for ins in tb.local_instructions()]
    if cfg.max_cnots > 0:
        primitives += [(ins,) for ins in tb.cnot_instructions(cfg.connectivity)]
    primitives += [(ins,) for ins in tb.free_instructions()]
    elements = list(primitives)
    learned: set = set()
    seen: set = set()
    log: list[LogEntry] = []
    best: Candidate | None = None
    last_learned = 0

    for trial in range(cfg.trials):
        if trial - last_learned > cfg.restart_after:
            elements, learned, last_learned = list(primitives), set(), trial
        length = int(rng.integers(1, cfg.max_elements + 1))
        picks = rng.integers(len(elements), size=length)
        seq = [ins for i in picks for ins in elements[i]]
        n_free = sum(is_free_slot(ins) for ins in seq)
        if n_free == 0 and tb.free_angle and rng.random() < cfg.free_probability:
            ry = [k for k, ins in enumerate(seq) if ins.label == FREE_LABEL]
            if ry:
                k = ry[int(rng.integers(len(ry)))]
                seq[k] = free_slot(seq[k].targets[0])
                n_free = 1
        n_cnot = sum(ins.label == "CNOT" for ins in seq)
        if n_free > 1 or n_cnot > cfg.max_cnots or len(seq) - n_cnot > cfg.max_local:
            continue
        key = canonical_key(seq)
        if key in seen:
            continue
        seen.add(key)

        score, theta, final = _EVALUATOR.evaluate(seq)
        if best is None or score > best.score + 1e-12:
            circuit = Circuit(N_QUTRITS, _fill_free(seq, theta), cfg.connectivity)
            best = Candidate(circuit, score, theta, key)
        log.append(LogEntry(trial, n_cnot, len(seq) - n_cnot, score, best.score))
        if score > cfg.success_threshold:
            return SearchResult(best, log, True, trial + 1, len(elements))

        if score >= cfg.learn_threshold:
            signature = (_support(final), theta is None)
            if signature not in learned:
                learned.add(signature)
                last_learned = trial
                pruned = _prune(seq, score, final)
                elements.append(pruned)
                if theta is not None:
                    _, th, _ = _EVALUATOR.evaluate(pruned)
                    frozen = None if th is None else _freeze_angle(pruned, th)
                    if frozen is not None:
                        elements.append(frozen)

    return SearchResult(best, log, False, cfg.trials, len(elements))


def load_log(path) -> list[LogEntry]:
    return [LogEntry(**json.loads(line)) for line in Path(path).read_text().splitlines() if line]
