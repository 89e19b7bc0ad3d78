"""Rotating-frame dephasing of (12) rotations and its compensation.

Pulses in the (12) subspace are driven in a frame that drifts relative to
the (01) frame, so a nominal ``R_x^(12)`` or ``R_y^(12)`` is really a
rotation about an in-plane axis tilted by an accumulated phase.  For the
GHZ state measured in the (12) x-basis this turns into a sinusoidal
dependence of the ``|111>`` probability on the total frame phase, which a
``R_z^(01)(phi)`` inserted before the basis change can cancel.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .circuit import Circuit, GateInstruction
from .gates import NOMINAL_AXIS_PHASE

_DEPHASABLE = {"Rx12": "x", "Ry12": "y"}


def _triple(values) -> tuple[float, float, float]:
    vals = tuple(float(v) for v in np.broadcast_to(np.asarray(values, dtype=float), (3,)))
    if not all(np.isfinite(vals)):
        raise ValueError("frame phases must be finite")
    return vals


@dataclass(frozen=True)
class FramePhase:
    """Frame phases carried by the (12) rotations on each qutrit.

    Within a circuit the first (12) rotation on qutrit ``i`` picks up
    ``a[i]``, the second ``b[i]`` and any later one ``accumulated[i]``.  In
    a (12) or (02) basis change the two (12) rotations are exactly the
    first and the second.  Scalars broadcast to all three qutrits.
    """

    a: tuple[float, float, float] = (0.0, 0.0, 0.0)
    b: tuple[float, float, float] = (0.0, 0.0, 0.0)
    accumulated: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        for name in ("a", "b", "accumulated"):
            object.__setattr__(self, name, _triple(getattr(self, name)))

    @classmethod
    def uniform(cls, a: float, b: float | None = None) -> "FramePhase":
        """Equal phases on every qutrit; ``b`` defaults to ``a``."""
        b = a if b is None else b
        return cls((a,) * 3, (b,) * 3, (b,) * 3)

    def phase(self, qutrit: int, occurrence: int) -> float:
        if occurrence == 0:
            return self.a[qutrit]
        if occurrence == 1:
            return self.b[qutrit]
        return self.accumulated[qutrit]

    @property
    def total_shift(self) -> float:
        """``sum_i (b_i - 2 a_i)``, the phase entering the (12) oscillation."""
        return float(sum(b - 2 * a for a, b in zip(self.a, self.b)))

    def is_zero(self) -> bool:
        return not any(self.a + self.b + self.accumulated)

    def to_dict(self) -> dict:
        return {"a": list(self.a), "b": list(self.b), "accumulated": list(self.accumulated)}

    @classmethod
    def from_dict(cls, data: dict) -> "FramePhase":
        return cls(data.get("a", 0.0), data.get("b", 0.0), data.get("accumulated", 0.0))


NO_DEPHASING = FramePhase()


def dephase_circuit(c: Circuit, fp: FramePhase) -> Circuit:
    """Replace every ``Rx12``/``Ry12`` by the dephased rotation ``Rn12``.

    The tilted axis is the nominal one (``pi`` for x, ``pi/2`` for y) plus
    the frame phase of that occurrence.  ``Xplus`` gates receive the
    qutrit's ``accumulated`` phase.  With all phases zero the circuit is
    returned unchanged.
    """
    if fp.is_zero():
        return c
    seen = [0] * c.n_qutrits
    out = []
    for ins in c.instructions:
        if ins.label in _DEPHASABLE and not ins.dagger:
            q = ins.targets[0]
            offset = fp.phase(q, seen[q])
            seen[q] += 1
            axis_phase = NOMINAL_AXIS_PHASE[_DEPHASABLE[ins.label]] + offset
            out.append(GateInstruction("Rn12", (ins.params[0], axis_phase), ins.targets))
        elif ins.label == "Xplus" and not ins.params:
            q = ins.targets[0]
            out.append(GateInstruction("Xplus", (fp.accumulated[q],), ins.targets))
        else:
            out.append(ins)
    return replace(c, instructions=tuple(out))


def compensation_instruction(phi: float, qutrit: int = 0) -> GateInstruction:
    """The ``R_z^(01)(phi)`` inserted between preparation and basis change."""
    return GateInstruction("Rz01", (phi,), (qutrit,))


def predicted_oscillation(a: Sequence[float], b: Sequence[float], phi_z: float) -> float:
    """``(1/24) |1 + exp(i (sum(b - 2a) + phi_z/2))|^2``.

    Probability of ``|111>`` after the (12) x-basis change on the ideal GHZ
    state, with frame phases ``a``, ``b`` and compensation ``phi_z``.
    """
    arg = float(np.sum(np.asarray(b, float) - 2 * np.asarray(a, float))) + phi_z / 2
    return float(abs(1 + np.exp(1j * arg)) ** 2 / 24)


@dataclass(frozen=True)
class ScanConfig:
    """Grid of compensation phases; 24 points spaced by pi/12 by default."""

    grid: tuple[float, ...] = field(default_factory=lambda: tuple(np.arange(24) * np.pi / 12))
    qutrit: int = 0
    resolve_sigmas: float = 3.0

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        if g.size == 0:
            raise ValueError("scan grid is empty")
        if np.any(np.diff(g) <= 0):
            raise ValueError("scan grid must be strictly increasing")
        object.__setattr__(self, "grid", tuple(float(x) for x in g))

    def to_dict(self) -> dict:
        return {"grid": list(self.grid), "qutrit": self.qutrit, "resolve_sigmas": self.resolve_sigmas}

    @classmethod
    def from_dict(cls, data: dict) -> "ScanConfig":
        kw = {k: data[k] for k in ("qutrit", "resolve_sigmas") if k in data}
        if "grid" in data:
            kw["grid"] = tuple(data["grid"])
        elif "points" in data:
            step = float(data.get("step", np.pi / 12))
            kw["grid"] = tuple(np.arange(int(data["points"])) * step)
        return cls(**kw)


@dataclass(frozen=True)
class OscillationFit:
    """Least-squares fit ``A cos(phi/2 + delta) + C`` with ``A >= 0``."""

    amplitude: float
    delta: float
    offset: float
    amplitude_std: float
    resolved: bool

    def __call__(self, phi):
        return self.amplitude * np.cos(np.asarray(phi) / 2 + self.delta) + self.offset

    @property
    def peak_phi(self) -> float:
        """Compensation phase at the fitted maximum, in ``[0, 4 pi)``."""
        phi = float(np.mod(-2 * self.delta, 4 * np.pi))
        return 0.0 if np.isclose(phi, 4 * np.pi, rtol=0, atol=1e-12) else phi

    def to_dict(self) -> dict:
        return {"amplitude": self.amplitude, "delta": self.delta, "offset": self.offset,
                "amplitude_std": self.amplitude_std, "resolved": self.resolved,
                "peak_phi": self.peak_phi}


def fit_oscillation(phis, values, stds=None, resolve_sigmas: float = 3.0) -> OscillationFit:
    """Fit ``A cos(phi/2 + delta) + C`` by linear least squares.

    The model is linear in ``(A cos delta, -A sin delta, C)``.  With ``stds``
    the fit is weighted and the amplitude counts as resolved only when it
    exceeds ``resolve_sigmas`` times its standard error; without ``stds``
    (exact data) any amplitude above ``1e-12`` is resolved.  A 24-point grid
    over ``[0, 2 pi)`` covers half a period of the ``phi/2`` dependence,
    which is still enough to determine all three parameters.
    """
    phis = np.asarray(phis, dtype=float)
    y = np.asarray(values, dtype=float)
    if phis.shape != y.shape or phis.size < 3:
        raise ValueError("need at least three (phi, value) pairs of equal length")
    design = np.column_stack([np.cos(phis / 2), np.sin(phis / 2), np.ones_like(phis)])
    if stds is None:
        w = np.ones_like(y)
    else:
        s = np.asarray(stds, dtype=float)
        w = 1 / np.where(s > 0, s, np.min(s[s > 0]) if np.any(s > 0) else 1.0)
    coef, *_ = np.linalg.lstsq(design * w[:, None], y * w, rcond=None)
    p, q, c = coef
    amp = float(np.hypot(p, q))
    delta = float(np.arctan2(-q, p))
    if stds is None:
        amp_std = 0.0
        resolved = amp > 1e-12
    else:
        cov = np.linalg.pinv((design * w[:, None]).T @ (design * w[:, None]))
        grad = np.array([p, q]) / amp if amp > 0 else np.array([1.0, 0.0])
        amp_std = float(np.sqrt(max(grad @ cov[:2, :2] @ grad, 0.0)))
        resolved = amp > resolve_sigmas * amp_std
    return OscillationFit(amp, delta, float(c), amp_std, bool(resolved))
