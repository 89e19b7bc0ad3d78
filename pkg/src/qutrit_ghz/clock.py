"""GHZ-clock diagrams: one arrow per occupied basis string.

The dial is split into three 120-degree sectors for the subspaces (01),
(12) and (02), clockwise from 12 o'clock.  Each sector holds eight 15-degree
slots, one per string over its two levels, numbered as a binary number with
the lower level read as 0.  A string is placed in the first sector that
contains all of its levels, so ``|000>`` points at 12 o'clock, ``|010>`` at
about 1 o'clock, ``|111>`` in the lower right and ``|222>`` in the lower
left.  Arrow length is the amplitude modulus; phases are not drawn.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .circuit import ghz_stages, run
from .exceptions import NotClockRepresentableError
from .states import PureState, basis_label

SECTOR_START = {(0, 1): 0.0, (1, 2): 120.0, (0, 2): 240.0}
SLOT_WIDTH = 15.0
AMPLITUDE_TOL = 1e-12


@dataclass(frozen=True)
class Arrow:
    sector: tuple[int, int]
    label: str
    angle: float
    length: float

    def to_dict(self) -> dict:
        return {"sector": f"{self.sector[0]}{self.sector[1]}", "label": self.label,
                "angle": self.angle, "length": self.length}


@dataclass(frozen=True)
class ClockFrame:
    arrows: tuple[Arrow, ...]
    stage: str = ""

    def __post_init__(self):
        for a in self.arrows:
            if not 0 <= a.length <= 1 + 1e-12:
                raise ValueError(f"arrow length {a.length} outside [0, 1]")

    def __len__(self):
        return len(self.arrows)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(a.label for a in self.arrows)

    def to_dict(self) -> dict:
        return {"stage": self.stage, "arrows": [a.to_dict() for a in self.arrows]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


@dataclass(frozen=True)
class ClockLayout:
    sector_start: dict = field(default_factory=lambda: dict(SECTOR_START))
    slot_width: float = SLOT_WIDTH

    def place(self, label: str) -> tuple[tuple[int, int], float]:
        levels = {int(ch) for ch in label}
        if len(levels) > 2:
            raise NotClockRepresentableError(f"|{label}> uses all three levels")
        for sub, start in self.sector_start.items():
            if levels <= set(sub):
                lo = sub[0]
                slot = int("".join("0" if int(ch) == lo else "1" for ch in label), 2)
                return sub, start + slot * self.slot_width
        raise NotClockRepresentableError(f"no sector holds |{label}>")


DEFAULT_LAYOUT = ClockLayout()


def render_clock(state: PureState, layout: ClockLayout = DEFAULT_LAYOUT, stage: str = "") -> ClockFrame:
    """One arrow per basis string with nonzero amplitude.

    Raises :class:`NotClockRepresentableError` when an occupied string
    contains all three levels.
    """
    arrows = []
    for i in np.flatnonzero(np.abs(state.amplitudes) > AMPLITUDE_TOL):
        label = basis_label(int(i), state.n_qutrits)
        sub, angle = layout.place(label)
        arrows.append(Arrow(sub, label, angle, float(abs(state.amplitudes[i]))))
    arrows.sort(key=lambda a: a.angle)
    return ClockFrame(tuple(arrows), stage)


def ghz_clock_frames(circuit=None) -> list[ClockFrame]:
    """Frames before the circuit and after each of its stages (a) to (d)."""
    names = ("initial", "a", "b", "c", "d")
    return [render_clock(run(c), stage=name) for name, c in zip(names, ghz_stages(circuit))]


def to_svg(frame: ClockFrame, size: int = 240) -> str:
    """Minimal standalone SVG drawing of a frame."""
    r = size / 2 - 20
    cx = cy = size / 2
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
             f'viewBox="0 0 {size} {size}">',
             f'<circle cx="{cx}" cy="{cy}" r="{r}" fill="none" stroke="black"/>']
    for start in SECTOR_START.values():
        t = np.radians(start)
        parts.append(f'<line x1="{cx}" y1="{cy}" x2="{cx + r * np.sin(t):.2f}" '
                     f'y2="{cy - r * np.cos(t):.2f}" stroke="grey" stroke-dasharray="3,3"/>')
    for a in frame.arrows:
        t = np.radians(a.angle)
        x, y = cx + r * a.length * np.sin(t), cy - r * a.length * np.cos(t)
        parts.append(f'<line x1="{cx}" y1="{cy}" x2="{x:.2f}" y2="{y:.2f}" stroke="crimson" stroke-width="2"/>')
        lx, ly = cx + (r + 10) * np.sin(t), cy - (r + 10) * np.cos(t)
        parts.append(f'<text x="{lx:.2f}" y="{ly:.2f}" font-size="9" text-anchor="middle">|{a.label}&gt;</text>')
    if frame.stage:
        parts.append(f'<text x="4" y="12" font-size="11">{frame.stage}</text>')
    parts.append("</svg>")
    return "\n".join(parts)
