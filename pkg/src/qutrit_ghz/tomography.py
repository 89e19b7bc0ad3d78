"""Partial tomography of the GHZ coherences and the fidelity witness.

Only the 3x3 block of the density matrix on ``{|000>, |111>, |222>}`` is
reconstructed.  Its diagonal comes from lowering experiments; each
off-diagonal element ``<aaa|rho|bbb>`` follows from four three-site Pauli
strings in the ``(ab)`` subspace::

    Re = (<xxx> - <yyx> - <yxy> - <xyy>) / 8
    Im = (<yyy> - <xxy> - <xyx> - <yxx>) / 8

Every Pauli expectation needs eight experiments, one per two-level outcome
string, and each experiment is an independent binomial estimate.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .circuit import Circuit, GateInstruction, apply_circuit
from .dephasing import NO_DEPHASING, FramePhase, OscillationFit, ScanConfig, compensation_instruction, \
    dephase_circuit, fit_oscillation
from .exceptions import DataError, UndefinedPhaseError
from .gates import basis_change_signs, measurement_basis_sequence, subspace, subspace_name
from .measurement import BasisEstimate, ConfusionMatrix, lower, make_rng, measure_all_zero
from .states import PureState, all_basis_labels

#: Witness threshold: no state with Schmidt rank vector (3,3,2) or lower exceeds it.
WITNESS_BOUND = 2 / 3

RE_STRINGS = ("xxx", "yyx", "yxy", "xyy")
IM_STRINGS = ("yyy", "xxy", "xyx", "yxx")
_COMBINATION_SIGNS = (1, -1, -1, -1)

#: Off-diagonal elements of the GHZ block, keyed by subspace.
ELEMENTS = {(0, 1): ("000", "111"), (0, 2): ("000", "222"), (1, 2): ("111", "222")}
_ORDER = ((0, 1), (0, 2), (1, 2))
GHZ_DIAGONAL = ("000", "111", "222")


@dataclass(frozen=True)
class PauliString:
    """Three-site string of ``x``/``y`` Paulis, all in one subspace."""

    axes: tuple[str, str, str]
    subspace: tuple[int, int] = (0, 1)

    def __post_init__(self):
        axes = tuple(self.axes)
        if len(axes) != 3 or any(ax not in ("x", "y") for ax in axes):
            raise ValueError(f"a Pauli string needs three axes from x/y, got {self.axes!r}")
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "subspace", subspace(self.subspace))

    @classmethod
    def parse(cls, label: str, sub=(0, 1)) -> "PauliString":
        return cls(tuple(label), sub)

    @property
    def label(self) -> str:
        return "".join(self.axes)

    def outcomes(self) -> list[str]:
        """The eight computational strings over the two subspace levels."""
        a, b = self.subspace
        return [f"{i}{j}{k}" for i in (a, b) for j in (a, b) for k in (a, b)]

    def eigenvalues(self) -> np.ndarray:
        """Product of the per-site eigenvalues for each outcome string."""
        signs = [basis_change_signs("H" if ax == "x" else "H_y", self.subspace) for ax in self.axes]
        return np.array([np.prod([signs[q][int(d)] for q, d in enumerate(s)]) for s in self.outcomes()],
                        dtype=float)


def pauli_measurement_circuit(p: PauliString, phi: float | None = None,
                              frame: FramePhase | None = None, compensation_qutrit: int = 0,
                              delay_phase: float = 0.0) -> Circuit:
    """Basis-change circuit for ``p``; measuring afterwards in the
    computational basis realizes the Pauli measurement.

    With ``phi`` a ``R_z^(01)(phi)`` compensation is applied first; with
    ``frame`` the (12) rotations are dephased.  A nonzero ``delay_phase``
    models a wait between the two (12) pulses on the compensation qutrit
    as ``R_z^(01)(delay_phase)`` placed between them.
    """
    ins = [] if phi is None else [compensation_instruction(phi, compensation_qutrit)]
    for q, ax in enumerate(p.axes):
        kind = "H" if ax == "x" else "H_y"
        n12 = 0
        for axis, (a, b), theta in measurement_basis_sequence(kind, p.subspace):
            ins.append(GateInstruction(f"R{axis}{a}{b}", (theta,), (q,)))
            if (a, b) == (1, 2):
                n12 += 1
                if n12 == 1 and delay_phase and q == compensation_qutrit:
                    ins.append(GateInstruction("Rz01", (delay_phase,), (q,)))
    c = Circuit(3, tuple(ins))
    return dephase_circuit(c, frame) if frame is not None else c


@dataclass(frozen=True)
class TomographySettings:
    """How each lowering experiment is run.

    ``exact`` replaces sampling by the analytic outcome distribution
    (through the readout channel when ``noise`` is set) with zero variance.
    """

    n_shots: int = 1024
    noise: ConfusionMatrix | None = None
    mitigation: bool = False
    exact: bool = False
    seed: int = 0
    frame: FramePhase = NO_DEPHASING
    scan: ScanConfig | None = None
    imaginary: bool = False
    delay_phase: float = 0.0

    def __post_init__(self):
        if self.n_shots < 1:
            raise ValueError("n_shots must be at least 1")

    def to_dict(self) -> dict:
        return {"n_shots": self.n_shots, "noise": None if self.noise is None else self.noise.to_dict(),
                "mitigation": self.mitigation, "exact": self.exact, "seed": self.seed,
                "frame": self.frame.to_dict(),
                "scan": None if self.scan is None else self.scan.to_dict(),
                "imaginary": self.imaginary, "delay_phase": self.delay_phase}


@dataclass(frozen=True)
class ExpectationRecord:
    """A Pauli expectation assembled from its eight lowering experiments."""

    value: float
    variance: float
    n_shots: int
    subspace: tuple[int, int]
    axes: str
    value_raw: float = float("nan")
    variance_raw: float = 0.0
    probabilities: tuple[float, ...] = ()
    variances: tuple[float, ...] = ()
    experiments: tuple[int, ...] = ()
    phi: float | None = None

    def __post_init__(self):
        if self.variance < 0:
            raise ValueError("variance must be non-negative")
        if np.isnan(self.value_raw):
            object.__setattr__(self, "value_raw", self.value)
            object.__setattr__(self, "variance_raw", self.variance)

    @property
    def std(self) -> float:
        return float(np.sqrt(self.variance))

    def raw(self) -> "ExpectationRecord":
        return ExpectationRecord(self.value_raw, self.variance_raw, self.n_shots, self.subspace, self.axes,
                                 self.value_raw, self.variance_raw, (), (), self.experiments, self.phi)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["subspace"] = subspace_name(self.subspace)
        return d


def _basis_estimates(state: PureState, p: PauliString, settings: TomographySettings,
                     phi: float | None, first_experiment: int) -> list[BasisEstimate]:
    qutrit = settings.scan.qutrit if settings.scan else 0
    circuit = pauli_measurement_circuit(p, phi, settings.frame, qutrit, settings.delay_phase)
    rotated = apply_circuit(circuit, state)
    xplus_phase = settings.frame.accumulated[0] if not settings.frame.is_zero() else None
    out = []
    for k, basis in enumerate(p.outcomes()):
        probs = np.abs(lower(rotated, basis, xplus_phase)) ** 2
        index = first_experiment + k
        out.append(measure_all_zero(probs, settings.n_shots, settings.noise, settings.seed,
                                    settings.mitigation, settings.exact,
                                    make_rng(settings.seed, index), basis))
    return out


def expectation_with_variance(state: PureState, p: PauliString, n: int = 1024,
                              noise: ConfusionMatrix | None = None, seed: int = 0, *,
                              mitigation: bool = False, exact: bool = False,
                              frame: FramePhase | None = None, phi: float | None = None,
                              first_experiment: int = 0,
                              settings: TomographySettings | None = None) -> ExpectationRecord:
    """Estimate ``<p>`` on ``state`` with the lowering protocol.

    The value is ``sum_k e_k p_k`` over the eight outcome strings and the
    variance is ``sum_k Var(p_k)`` with ``Var(p_k) = p_k (1 - p_k) / n``.
    Experiment ``first_experiment + k`` draws from its own random stream.
    """
    if settings is None:
        settings = TomographySettings(n, noise, mitigation, exact, seed, frame or NO_DEPHASING)
    ests = _basis_estimates(state, p, settings, phi, first_experiment)
    e = p.eigenvalues()
    probs = np.array([x.p_hat for x in ests])
    raw = np.array([x.p_raw for x in ests])
    var = np.array([x.variance for x in ests])
    var_raw = np.array([x.variance_raw for x in ests])
    return ExpectationRecord(float(e @ probs), float(var.sum()), settings.n_shots, p.subspace, p.label,
                             float(e @ raw), float(var_raw.sum()), tuple(probs), tuple(var),
                             tuple(range(first_experiment, first_experiment + 8)), phi)


def _value_and_variance(x) -> tuple[float, float, tuple[int, int] | None]:
    if isinstance(x, ExpectationRecord):
        return x.value, x.variance, x.subspace
    if isinstance(x, (tuple, list)):
        return float(x[0]), float(x[1]) ** 2, None
    return float(x), 0.0, None


def _combine(records: Sequence) -> tuple[float, float]:
    if len(records) != 4:
        raise ValueError("need exactly four expectation values")
    parts = [_value_and_variance(r) for r in records]
    subs = {s for _, _, s in parts if s is not None}
    if len(subs) > 1:
        raise ValueError(f"expectation records come from different subspaces: {sorted(subs)}")
    value = sum(sgn * v for sgn, (v, _, _) in zip(_COMBINATION_SIGNS, parts)) / 8
    std = np.sqrt(sum(var for _, var, _ in parts)) / 8
    return float(value), float(std)


def re_offdiagonal(e_xxx, e_yyx, e_yxy, e_xyy) -> tuple[float, float]:
    """Real part of ``<aaa|rho|bbb>`` and its standard deviation.

    Arguments are :class:`ExpectationRecord` objects, ``(value, std)``
    pairs or bare values (taken as exact).
    """
    return _combine((e_xxx, e_yyx, e_yxy, e_xyy))


def im_offdiagonal(e_yyy, e_xxy, e_xyx, e_yxx) -> tuple[float, float]:
    """Imaginary part of ``<aaa|rho|bbb>`` and its standard deviation."""
    return _combine((e_yyy, e_xxy, e_xyx, e_yxx))


@dataclass(frozen=True)
class PartialDensityMatrix:
    """Upper triangle of the GHZ block of a reconstructed density matrix.

    Off-diagonal entries are ordered ``<000|rho|111>``, ``<000|rho|222>``,
    ``<111|rho|222>``.  ``im_std`` is ``None`` when imaginary parts were not
    measured (they are then taken as zero).
    """

    diag: tuple[float, float, float]
    diag_std: tuple[float, float, float]
    offdiag: tuple[complex, complex, complex]
    re_std: tuple[float, float, float]
    im_std: tuple[float, float, float] | None = None
    full_diag_sum: float | None = None

    def __post_init__(self):
        if len(self.diag) != 3 or len(self.offdiag) != 3:
            raise DataError("a partial density matrix needs three diagonal and three off-diagonal entries")
        object.__setattr__(self, "diag", tuple(float(d) for d in self.diag))
        object.__setattr__(self, "diag_std", tuple(float(d) for d in self.diag_std))
        object.__setattr__(self, "offdiag", tuple(complex(z) for z in self.offdiag))
        object.__setattr__(self, "re_std", tuple(float(s) for s in self.re_std))
        if self.im_std is not None:
            object.__setattr__(self, "im_std", tuple(float(s) for s in self.im_std))

    @property
    def has_imaginary(self) -> bool:
        return self.im_std is not None

    @property
    def trace(self) -> float:
        """Sum of all 27 populations when available, else of the GHZ block."""
        return float(self.full_diag_sum if self.full_diag_sum is not None else sum(self.diag))

    def matrix(self) -> np.ndarray:
        m = np.diag(np.array(self.diag, dtype=complex))
        for (i, j), z in zip(((0, 1), (0, 2), (1, 2)), self.offdiag):
            m[i, j] = z
            m[j, i] = np.conj(z)
        return m

    @classmethod
    def from_state(cls, state: PureState) -> "PartialDensityMatrix":
        """Exact block of ``|psi><psi|`` with zero uncertainties."""
        amp = {lab: state.amplitude(lab) for lab in GHZ_DIAGONAL}
        diag = tuple(abs(amp[lab]) ** 2 for lab in GHZ_DIAGONAL)
        off = tuple(amp[r] * np.conj(amp[c]) for r, c in (ELEMENTS[s] for s in _ORDER))
        return cls(diag, (0.0,) * 3, off, (0.0,) * 3, (0.0,) * 3, 1.0)

    def to_dict(self) -> dict:
        return {"diag": list(self.diag), "diag_std": list(self.diag_std),
                "offdiag": [[z.real, z.imag] for z in self.offdiag],
                "re_std": list(self.re_std),
                "im_std": None if self.im_std is None else list(self.im_std),
                "full_diag_sum": self.full_diag_sum}

    @classmethod
    def from_dict(cls, data: dict) -> "PartialDensityMatrix":
        return cls(tuple(data["diag"]), tuple(data["diag_std"]),
                   tuple(complex(re, im) for re, im in data["offdiag"]), tuple(data["re_std"]),
                   None if data.get("im_std") is None else tuple(data["im_std"]),
                   data.get("full_diag_sum"))


def fidelity_with_error(pdm: PartialDensityMatrix, convention: str = "propagated") -> tuple[float, float]:
    """GHZ fidelity ``(sum diag + 2 sum Re offdiag) / 3`` and its standard deviation.

    ``convention="propagated"`` (default) is first-order propagation with
    the element standard deviations::

        sigma_F = sqrt(sum sigma_ii^2 + 4 sum sigma_Re^2) / 3

    ``convention="printed"`` inserts the element standard deviations into
    the closed form that carries an extra factor ``1/8`` on the off-diagonal
    terms (that form expects the unscaled string-combination spread).  It
    understates the spread of simulated estimates and exists only to replay
    externally reported error bars computed that way.
    """
    if any(np.isnan(x) for x in pdm.diag) or any(np.isnan(z.real) for z in pdm.offdiag):
        raise DataError("partial density matrix has missing elements")
    f = (sum(pdm.diag) + 2 * sum(z.real for z in pdm.offdiag)) / 3
    d2 = sum(s**2 for s in pdm.diag_std)
    r2 = sum(s**2 for s in pdm.re_std)
    if convention == "propagated":
        sigma = np.sqrt(d2 + 4 * r2) / 3
    elif convention == "printed":
        sigma = np.sqrt(d2 + 4 * r2 / 64) / 3
    else:
        raise ValueError(f"unknown convention {convention!r}")
    return float(f), float(sigma)


@dataclass(frozen=True)
class WitnessVerdict:
    certified: bool
    fidelity: float
    margin: float
    fidelity_std: float | None = None
    bound: float = WITNESS_BOUND

    @property
    def label(self) -> str:
        return "certified (3,3,3)" if self.certified else "not certified"

    def to_dict(self) -> dict:
        return {"certified": self.certified, "label": self.label, "fidelity": self.fidelity,
                "margin": self.margin, "fidelity_std": self.fidelity_std, "bound": self.bound}


def witness_verdict(f: float, fidelity_std: float | None = None, slack: float = 0.05,
                    tol: float = 1e-12) -> WitnessVerdict:
    """Certify Schmidt rank vector (3,3,3) when ``f > 2/3`` (strictly).

    The threshold applies to the point estimate; the standard deviation is
    reported, not subtracted.  ``f`` must exceed the bound by more than
    ``tol`` so that rounding in a computed fidelity of exactly ``2/3`` does
    not certify.  Values further than ``slack`` outside ``[0, 1]`` raise
    :class:`DataError`.
    """
    if not -slack <= f <= 1 + slack:
        raise DataError(f"fidelity {f} is outside [0, 1] beyond the {slack} slack")
    return WitnessVerdict(bool(f > WITNESS_BOUND + tol), float(f), float(f - WITNESS_BOUND), fidelity_std)


def max_fidelity_bound(schmidt_coeffs: Sequence[float], xi: int) -> float:
    """Largest GHZ-like fidelity reachable with Schmidt rank ``xi``: the sum
    of the ``xi`` largest squared coefficients.

    The squared coefficients are renormalized to unit sum before adding, so
    rounding in the inputs only affects the last bit of the bound.
    """
    lam = np.asarray(schmidt_coeffs, dtype=float)
    if lam.ndim != 1 or lam.size == 0:
        raise ValueError("need a nonempty list of coefficients")
    if np.any(lam < 0) or np.any(np.diff(lam) > 1e-12):
        raise ValueError("coefficients must be non-negative and sorted in descending order")
    if abs(np.sum(lam**2) - 1) > 1e-9:
        raise DataError("squared coefficients must sum to 1")
    if not 1 <= xi <= lam.size:
        raise ValueError(f"xi must lie in [1, {lam.size}]")
    p = lam**2 / math.fsum(lam**2)
    return float(math.fsum(p[:xi]))


# --- relative phases ---------------------------------------------------------

def _wrap(x: float) -> float:
    """Map an angle into ``(-pi, pi]``."""
    y = float(np.mod(x + np.pi, 2 * np.pi) - np.pi)
    return np.pi if np.isclose(y, -np.pi) else y


def phase_with_error(z: complex, sx: float, sy: float) -> tuple[float, float]:
    """``arg z`` via ``2 arctan(y / (|z| + x))`` with first-order error propagation."""
    x, y = z.real, z.imag
    r = np.hypot(x, y)
    if r < 1e-12:
        raise UndefinedPhaseError("the phase of a zero element is undefined")
    if np.isclose(r + x, 0.0):
        arg = np.pi
    else:
        arg = 2 * np.arctan(y / (r + x))
    # d(arg)/dx = -y/r^2, d(arg)/dy = x/r^2
    std = np.sqrt((y * sx) ** 2 + (x * sy) ** 2) / r**2
    return float(arg), float(std)


def modulus_with_error(z: complex, sx: float, sy: float) -> tuple[float, float]:
    r = abs(z)
    if r == 0:
        return 0.0, float(np.hypot(sx, sy))
    return float(r), float(np.sqrt((z.real * sx) ** 2 + (z.imag * sy) ** 2) / r)


@dataclass(frozen=True)
class RelativePhases:
    """Relative phases of ``|111>`` and ``|222>`` with the cross-check.

    ``phi1 = -arg<000|rho|111>`` and ``phi2 = -arg<000|rho|222>``.  The
    cross-check quotes ``delta_direct = -arg<111|rho|222>`` next to
    ``delta_difference = phi1 - phi2``; for a pure phased GHZ state these
    two are equal in size and opposite in sign.
    """

    phi1: float
    phi1_std: float
    phi2: float
    phi2_std: float
    delta_direct: float
    delta_direct_std: float
    delta_difference: float
    delta_difference_std: float

    def to_dict(self) -> dict:
        return asdict(self)


def relative_phases(pdm: PartialDensityMatrix) -> RelativePhases:
    if not pdm.has_imaginary:
        raise DataError("relative phases need the imaginary parts")
    args = [phase_with_error(z, sr, si) for z, sr, si in zip(pdm.offdiag, pdm.re_std, pdm.im_std)]
    (a01, s01), (a02, s02), (a12, s12) = args
    phi1, phi2 = _wrap(-a01), _wrap(-a02)
    return RelativePhases(phi1, s01, phi2, s02, _wrap(-a12), s12,
                          _wrap(phi1 - phi2), float(np.hypot(s01, s02)))


# --- full protocol -----------------------------------------------------------

@dataclass
class ScanRecord:
    """Compensation scan in one subspace."""

    subspace: tuple[int, int]
    grid: tuple[float, ...]
    element: tuple[float, ...]
    element_std: tuple[float, ...]
    fit: OscillationFit
    selected_phi: float
    selected_index: int

    def to_dict(self) -> dict:
        return {"subspace": subspace_name(self.subspace), "grid": list(self.grid),
                "element": list(self.element), "element_std": list(self.element_std),
                "fit": self.fit.to_dict(), "selected_phi": self.selected_phi}


@dataclass
class TomographyReport:
    fidelity: float
    fidelity_std: float
    raw_fidelity: float
    raw_fidelity_std: float
    trace: float
    raw_trace: float
    witness: WitnessVerdict
    pdm: PartialDensityMatrix
    pdm_raw: PartialDensityMatrix
    phases: RelativePhases | None
    records: list[ExpectationRecord]
    diagonal: dict[str, BasisEstimate]
    scans: dict[str, ScanRecord]
    experiment_count: int
    settings: TomographySettings

    @property
    def scan_resolved(self) -> bool:
        return all(s.fit.resolved for s in self.scans.values())

    def to_dict(self) -> dict:
        return {
            "fidelity": self.fidelity, "fidelity_std": self.fidelity_std,
            "raw_fidelity": self.raw_fidelity, "raw_fidelity_std": self.raw_fidelity_std,
            "trace": self.trace, "raw_trace": self.raw_trace,
            "witness": self.witness.to_dict(),
            "pdm": self.pdm.to_dict(), "pdm_raw": self.pdm_raw.to_dict(),
            "phases": None if self.phases is None else self.phases.to_dict(),
            "experiment_count": self.experiment_count,
            "settings": self.settings.to_dict(),
            "diagonal": {k: {"p_hat": v.p_hat, "variance": v.variance, "p_raw": v.p_raw,
                             "variance_raw": v.variance_raw}
                         for k, v in self.diagonal.items()},
            "expectations": [r.to_dict() for r in self.records],
            "scans": {k: v.to_dict() for k, v in self.scans.items()},
            "scan_resolved": self.scan_resolved,
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    def scan_csv(self) -> str:
        """Rows ``(phi, observable, value, std)`` for every scanned subspace."""
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["phi", "observable", "value", "std"])
        for name, scan in self.scans.items():
            for phi, v, s in zip(scan.grid, scan.element, scan.element_std):
                w.writerow([phi, f"Re{name}", v, s])
        for r in self.records:
            if r.phi is None:
                continue
            a, b = r.subspace
            labels = PauliString(tuple(r.axes), r.subspace).outcomes()
            for lab, p, v in zip(labels, r.probabilities, r.variances):
                w.writerow([r.phi, f"{r.axes}{a}{b}:{lab}", p, np.sqrt(v)])
        return buf.getvalue()


class _Counter:
    def __init__(self):
        self.n = 0

    def take(self, k: int) -> int:
        start = self.n
        self.n += k
        return start


def _measure_strings(state, sub, strings, settings, phi, counter) -> list[ExpectationRecord]:
    return [expectation_with_variance(state, PauliString.parse(s, sub), phi=phi, settings=settings,
                                      first_experiment=counter.take(8))
            for s in strings]


def _element(records: list[ExpectationRecord], raw: bool = False) -> tuple[float, float]:
    recs = [r.raw() for r in records] if raw else records
    return re_offdiagonal(*recs)


def _pick_from_fit(fit: OscillationFit, grid: np.ndarray) -> int:
    if not fit.resolved:
        zero = np.flatnonzero(np.isclose(grid, 0.0))
        return int(zero[0]) if zero.size else 0
    return int(np.argmax(fit(grid)))


def run_full_tomography(state: PureState, settings: TomographySettings = TomographySettings()) -> TomographyReport:
    """Run the whole measurement protocol on ``state``.

    Order of experiments: the 27 populations, then the (01) strings, then
    (12) and (02).  With ``settings.scan`` the (12) and (02) strings are
    measured at every compensation phase of the grid; the reported values
    are those at the grid point where the fitted Re-element curve peaks.
    """
    counter = _Counter()
    diagonal = {}
    for label in all_basis_labels(3):
        idx = counter.take(1)
        probs = np.abs(lower(state, label)) ** 2
        diagonal[label] = measure_all_zero(probs, settings.n_shots, settings.noise, settings.seed,
                                           settings.mitigation, settings.exact,
                                           make_rng(settings.seed, idx), label)

    records: list[ExpectationRecord] = []
    chosen: dict[tuple[int, int], list[ExpectationRecord]] = {}
    chosen_phi: dict[tuple[int, int], float | None] = {}
    scans: dict[str, ScanRecord] = {}

    chosen[(0, 1)] = _measure_strings(state, (0, 1), RE_STRINGS, settings, None, counter)
    chosen_phi[(0, 1)] = None
    records += chosen[(0, 1)]
    for sub in ((1, 2), (0, 2)):
        if settings.scan is None:
            chosen[sub] = _measure_strings(state, sub, RE_STRINGS, settings, None, counter)
            chosen_phi[sub] = None
            records += chosen[sub]
            continue
        grid = np.asarray(settings.scan.grid)
        per_phi = [_measure_strings(state, sub, RE_STRINGS, settings, float(phi), counter) for phi in grid]
        for recs in per_phi:
            records += recs
        curve = [_element(recs) for recs in per_phi]
        values = np.array([v for v, _ in curve])
        stds = np.array([s for _, s in curve])
        fit = fit_oscillation(grid, values, None if settings.exact else stds, settings.scan.resolve_sigmas)
        k = _pick_from_fit(fit, grid)
        chosen[sub] = per_phi[k]
        chosen_phi[sub] = float(grid[k])
        scans[subspace_name(sub)] = ScanRecord(sub, tuple(grid), tuple(values), tuple(stds), fit,
                                               float(grid[k]), k)

    im_records: dict[tuple[int, int], list[ExpectationRecord]] = {}
    if settings.imaginary:
        for sub in _ORDER:
            im_records[sub] = _measure_strings(state, sub, IM_STRINGS, settings, chosen_phi[sub], counter)
            records += im_records[sub]

    def assemble(raw: bool) -> PartialDensityMatrix:
        diag_est = [diagonal[lab] for lab in GHZ_DIAGONAL]
        if raw:
            diag = [d.p_raw for d in diag_est]
            dstd = [np.sqrt(d.variance_raw) for d in diag_est]
            total = sum(d.p_raw for d in diagonal.values())
        else:
            diag = [d.p_hat for d in diag_est]
            dstd = [np.sqrt(d.variance) for d in diag_est]
            total = sum(d.p_hat for d in diagonal.values())
        off, re_std, im_std = [], [], []
        for sub in _ORDER:
            re, rs = _element(chosen[sub], raw)
            im, is_ = (0.0, 0.0)
            if settings.imaginary:
                recs = [r.raw() for r in im_records[sub]] if raw else im_records[sub]
                im, is_ = im_offdiagonal(*recs)
            off.append(complex(re, im))
            re_std.append(rs)
            im_std.append(is_)
        return PartialDensityMatrix(tuple(diag), tuple(dstd), tuple(off), tuple(re_std),
                                    tuple(im_std) if settings.imaginary else None, total)

    pdm = assemble(raw=False)
    pdm_raw = assemble(raw=True)
    f, sf = fidelity_with_error(pdm)
    fr, sfr = fidelity_with_error(pdm_raw)
    phases = None
    if settings.imaginary:
        try:
            phases = relative_phases(pdm)
        except UndefinedPhaseError:
            phases = None
    return TomographyReport(f, sf, fr, sfr, pdm.trace, pdm_raw.trace,
                            witness_verdict(float(np.clip(f, -0.05, 1.05)), sf),
                            pdm, pdm_raw, phases, records, diagonal, scans, counter.n, settings)


def experiment_budget(scan_points: int | None = 24, imaginary: bool = False) -> int:
    """Number of lowering experiments :func:`run_full_tomography` performs."""
    per_string = 8
    count = 27 + 4 * per_string
    count += 2 * 4 * per_string * (scan_points if scan_points else 1)
    if imaginary:
        count += 3 * 4 * per_string
    return count


def pdm_from_expectations(diag: Sequence[float], diag_std: Sequence[float],
                          re_table: dict, im_table: dict | None = None) -> PartialDensityMatrix:
    """Build a partial density matrix from tables of Pauli expectations.

    ``re_table`` maps a subspace (``"01"``, ``"12"`` or ``"02"``) to the four
    ``(value, std)`` pairs of ``xxx, yyx, yxy, xyy``; ``im_table`` likewise
    for ``yyy, xxy, xyx, yxx``.
    """
    off, re_std, im_std = [], [], []
    for sub in _ORDER:
        name = subspace_name(sub)
        re, rs = re_offdiagonal(*re_table[name])
        im, is_ = (0.0, 0.0) if im_table is None else im_offdiagonal(*im_table[name])
        off.append(complex(re, im))
        re_std.append(rs)
        im_std.append(is_)
    return PartialDensityMatrix(tuple(diag), tuple(diag_std), tuple(off), tuple(re_std),
                                None if im_table is None else tuple(im_std))
