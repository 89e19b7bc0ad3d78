"""Compensation-phase and delay scans built on the tomography protocol."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .dephasing import OscillationFit, ScanConfig, fit_oscillation
from .gates import subspace, subspace_name
from .states import PureState
from .tomography import RE_STRINGS, ExpectationRecord, PauliString, TomographySettings, \
    expectation_with_variance, re_offdiagonal


@dataclass
class Curve:
    """One observable sampled along a scan axis."""

    name: str
    x: tuple[float, ...]
    values: tuple[float, ...]
    stds: tuple[float, ...]
    fit: OscillationFit | None = None

    def to_dict(self) -> dict:
        return {"name": self.name, "x": list(self.x), "values": list(self.values),
                "stds": list(self.stds), "fit": None if self.fit is None else self.fit.to_dict()}


def curves_csv(curves: Sequence[Curve], axis: str = "phi") -> str:
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow([axis, "observable", "value", "std"])
    for c in curves:
        for x, v, s in zip(c.x, c.values, c.stds):
            w.writerow([x, c.name, v, s])
    return buf.getvalue()


@dataclass
class PhaseScanResult:
    best_phi: float
    resolved: bool
    element: Curve
    probabilities: list[Curve]
    subspace: tuple[int, int]

    @property
    def curves(self) -> list[Curve]:
        return [self.element] + self.probabilities

    def to_dict(self) -> dict:
        return {"best_phi": self.best_phi, "resolved": self.resolved,
                "subspace": subspace_name(self.subspace),
                "curves": [c.to_dict() for c in self.curves]}

    def to_csv(self) -> str:
        return curves_csv(self.curves, "phi")


def _strings_at(state, sub, settings, phi, first) -> list[ExpectationRecord]:
    return [expectation_with_variance(state, PauliString.parse(s, sub), phi=phi, settings=settings,
                                      first_experiment=first + 8 * k)
            for k, s in enumerate(RE_STRINGS)]


def phase_scan(state: PureState, settings: TomographySettings, scan: ScanConfig | None = None,
               sub=(1, 2)) -> PhaseScanResult:
    """Scan the ``R_z^(01)(phi)`` compensation over ``scan.grid``.

    At each grid point the four Re strings of ``sub`` are measured.  The
    Re-element curve and the eight ``xxx`` outcome probabilities are each
    fitted with ``A cos(phi/2 + delta) + C``; ``best_phi`` is the peak of
    the Re-element fit, in ``[0, 4 pi)``.
    """
    scan = scan or settings.scan or ScanConfig()
    settings = replace(settings, scan=scan)
    sub = subspace(sub)
    grid = np.asarray(scan.grid)
    per_phi = [_strings_at(state, sub, settings, float(phi), 32 * i) for i, phi in enumerate(grid)]
    elem = np.array([re_offdiagonal(*recs) for recs in per_phi])
    weights = None if settings.exact else elem[:, 1]
    fit = fit_oscillation(grid, elem[:, 0], weights, scan.resolve_sigmas)
    element = Curve(f"Re{subspace_name(sub)}", tuple(grid), tuple(elem[:, 0]), tuple(elem[:, 1]), fit)

    xxx = [recs[0] for recs in per_phi]
    labels = PauliString.parse("xxx", sub).outcomes()
    probs = []
    for k, lab in enumerate(labels):
        vals = np.array([r.probabilities[k] for r in xxx])
        stds = np.sqrt([r.variances[k] for r in xxx])
        pf = fit_oscillation(grid, vals, None if settings.exact else stds, scan.resolve_sigmas)
        probs.append(Curve(f"xxx{subspace_name(sub)}:{lab}", tuple(grid), tuple(vals), tuple(stds), pf))
    return PhaseScanResult(fit.peak_phi, fit.resolved, element, probs, sub)


@dataclass
class DelayScanResult:
    delays: tuple[float, ...]
    phase_per_unit_delay: float
    elements: dict[str, Curve]
    expectations: dict[str, Curve]

    def to_dict(self) -> dict:
        return {"delays": list(self.delays), "phase_per_unit_delay": self.phase_per_unit_delay,
                "elements": {k: c.to_dict() for k, c in self.elements.items()},
                "expectations": {k: c.to_dict() for k, c in self.expectations.items()}}

    def to_csv(self) -> str:
        return curves_csv(list(self.elements.values()) + list(self.expectations.values()), "delay")


def delay_scan(state: PureState, settings: TomographySettings, delays: Sequence[float],
               phase_per_unit_delay: float, subspaces=((0, 1), (1, 2), (0, 2))) -> DelayScanResult:
    """Tomography expectations as a function of a wait between the (12) pulses.

    Each delay becomes an extra phase ``delay * phase_per_unit_delay`` on the
    compensation qutrit between its two (12) rotations.  The (01) basis
    change has no (12) pulses and is unaffected.
    """
    delays = tuple(float(d) for d in delays)
    if not delays:
        raise ValueError("delay list is empty")
    subs = [subspace(s) for s in subspaces]
    values = {(s, lab): [] for s in subs for lab in RE_STRINGS}
    elem = {s: [] for s in subs}
    for i, d in enumerate(delays):
        st = replace(settings, delay_phase=d * phase_per_unit_delay)
        for j, s in enumerate(subs):
            recs = _strings_at(state, s, st, None, 32 * (len(subs) * i + j))
            for lab, r in zip(RE_STRINGS, recs):
                values[(s, lab)].append((r.value, r.std))
            elem[s].append(re_offdiagonal(*recs))
    elements = {}
    for s in subs:
        arr = np.array(elem[s])
        elements[subspace_name(s)] = Curve(f"Re{subspace_name(s)}", delays, tuple(arr[:, 0]), tuple(arr[:, 1]))
    expectations = {}
    for (s, lab), vals in values.items():
        arr = np.array(vals)
        name = f"{lab}{subspace_name(s)}"
        expectations[name] = Curve(name, delays, tuple(arr[:, 0]), tuple(arr[:, 1]))
    return DelayScanResult(delays, float(phase_per_unit_delay), elements, expectations)
