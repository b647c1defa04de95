"""Measurement-induced state engineering and phase-sensitivity evaluation.

Mode labels used throughout: ``a = 0`` and ``b = 1`` are the main arms,
``c = 2`` and ``d = 3`` the ancilla/detector modes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DegeneratePointError, DomainError
from .fock import PureState, fidelity, make_basis_state, superpose, tensor
from .optics import (
    BeamSplitterParams,
    ModeUnitary,
    PhaseShiftParams,
    apply_elements,
    apply_unitary,
    beam_splitter_unitary,
    compose_all,
    creation_polynomial,
    element_unitary,
    phase_shifter_unitary,
)
from .postselect import DetectionPattern, exactly, project

A, B, C, D = 0, 1, 2, 3
HALF = math.pi / 4
ASYMPTOTIC_YURKE_PROBABILITY = 1.0 / (2.0 * math.e**2)


class SchemeResult(NamedTuple):
    state: PureState
    probability: float


def noon_state(n: int, sign: int = 1) -> PureState:
    return superpose([((n, 0), 1.0), ((0, n), float(sign))], normalize=True)


# --- NOON, four photons ---------------------------------------------------------

def noon4_heralded_elements(tap_reflectivity: float = 0.5) -> list:
    """Main 50:50 splitter and the two taps feeding detector modes c, d."""
    return [
        BeamSplitterParams(HALF, 0.0, A, B),
        BeamSplitterParams.from_reflectivity(tap_reflectivity, A, C),
        BeamSplitterParams.from_reflectivity(tap_reflectivity, B, D),
    ]


# the taps leave |3,1> - |1,3>; this phase turns it into the input that the
# final splitter maps onto |4,0> - |0,4>
NOON4_CORRECTION = PhaseShiftParams(math.pi / 2, A)


def noon4_final_elements() -> list:
    return [NOON4_CORRECTION, BeamSplitterParams(HALF, 0.0, A, B)]


def noon4_elements(tap_reflectivity: float = 0.5) -> list:
    return noon4_heralded_elements(tap_reflectivity) + noon4_final_elements()


NOON4_HERALD = DetectionPattern.exact({C: 1, D: 1})


def noon4_heralded_arms(tap_reflectivity: float = 0.5) -> SchemeResult:
    """Conditional two-mode state right after the detectors click."""
    start = make_basis_state((3, 3, 0, 0))
    out = apply_elements(start, noon4_heralded_elements(tap_reflectivity))
    res = project(out, NOON4_HERALD)
    return SchemeResult(res.conditional_state, res.probability)


def noon4_scheme(tap_reflectivity: float = 0.5) -> SchemeResult:
    """Heralded (|4,0> - |0,4>)/sqrt2 from a |3,3> input."""
    arms, probability = noon4_heralded_arms(tap_reflectivity)
    return SchemeResult(apply_elements(arms, noon4_final_elements()), probability)


# --- Yurke-state generator --------------------------------------------------------

@dataclass(frozen=True)
class YurkeSchemeConfig:
    n: int
    reflectivity_sq: float
    coincidence_order: int = 2

    def __post_init__(self):
        if not 0.0 < self.reflectivity_sq < 1.0:
            raise DomainError("reflectivity_sq must lie in (0, 1)")
        if self.coincidence_order not in (1, 2):
            raise DomainError("coincidence_order must be 1 or 2")
        if self.n < self.coincidence_order:
            raise DomainError("n must be at least the coincidence order")


def yurke_elements(reflectivity_sq: float) -> list:
    """Taps a->c and b->d, then a 50:50 splitter on c, d.

    The pi/2 pre-phase on d makes both photon-pair paths reach the
    coincidence outcome with the same sign.
    """
    return [
        BeamSplitterParams.from_reflectivity(reflectivity_sq, A, C),
        BeamSplitterParams.from_reflectivity(reflectivity_sq, B, D),
        BeamSplitterParams(HALF, math.pi / 2, C, D),
    ]


def yurke_herald(coincidence_order: int) -> DetectionPattern:
    if coincidence_order == 2:
        return DetectionPattern.exact({C: 1, D: 1})
    return DetectionPattern.exact({C: 1, D: 0})


def yurke_scheme(config: YurkeSchemeConfig) -> SchemeResult:
    start = make_basis_state((config.n, config.n, 0, 0))
    out = apply_elements(start, yurke_elements(config.reflectivity_sq))
    res = project(out, yurke_herald(config.coincidence_order))
    return SchemeResult(res.conditional_state, res.probability)


def _check_yurke_args(n, reflectivity_sq):
    if n < 2:
        raise DomainError("n must be at least 2")
    r = np.asarray(reflectivity_sq, dtype=float)
    if np.any((r <= 0.0) | (r >= 1.0)):
        raise DomainError("reflectivity_sq must lie in (0, 1)")
    return r


def yurke_success_probability(n: int, reflectivity_sq):
    """Two-fold coincidence probability of the Yurke generator, closed form.

    Losing a photon pair from one arm and none from the other has amplitude
    sqrt(C(n, 2)) r^2 t^(n-2) * t^n; the 50:50 splitter sends |2, 0> (or
    |0, 2>) to the coincidence outcome with amplitude 1/sqrt2.  The two
    which-arm paths end in distinct arm states, so their probabilities add.
    Accepts scalars or arrays of reflectivities.
    """
    r_sq = _check_yurke_args(n, reflectivity_sq)
    log_t_sq = np.log1p(-r_sq)
    pair = 0.5 * math.log(math.comb(n, 2)) + np.log(r_sq) + 0.5 * (n - 2) * log_t_sq
    keep = 0.5 * n * log_t_sq
    amp_path = np.exp(pair + keep) / math.sqrt(2.0)
    p = 2.0 * amp_path**2
    return float(p) if np.ndim(p) == 0 else p


def optimize_reflectivity(n: int, grid_points: int = 2001, xtol: float = 1e-10) -> tuple[float, float]:
    """Reflectivity maximizing the coincidence probability, by golden-section search.

    A coarse grid supplies the bracketing triple for the search. It mixes linear
    and logarithmic spacing so the peak near 1/n is resolved for large n.
    """
    if n < 2:
        raise DomainError("n must be at least 2")
    linear = np.linspace(0.0, 1.0, grid_points + 2)[1:-1]
    grid = np.unique(np.concatenate([linear, np.geomspace(1e-9, linear[-1], grid_points)]))
    values = yurke_success_probability(n, grid)
    k = int(np.clip(np.argmax(values), 1, len(grid) - 2))
    bracket = (grid[k - 1], grid[k], grid[k + 1])
    res = minimize_scalar(
        lambda r: -yurke_success_probability(n, r),
        bracket=bracket, method="golden", options={"xtol": xtol},
    )
    return float(res.x), float(-res.fun)


# --- single-photon QND ------------------------------------------------------------

@dataclass(frozen=True)
class QndInput:
    c0: complex
    c1: complex
    c2: complex

    def __post_init__(self):
        total = abs(self.c0) ** 2 + abs(self.c1) ** 2 + abs(self.c2) ** 2
        if abs(total - 1.0) > 1e-10:
            raise DomainError(f"QND input is not normalized (norm^2 = {total})")

    def state(self) -> PureState:
        return superpose([((0,), self.c0), ((1,), self.c1), ((2,), self.c2)])


def qnd_elements() -> list:
    """c, d mixed first, then each onto its own output arm (all 50:50 with phase pi)."""
    return [
        BeamSplitterParams(HALF, math.pi, C, D),
        BeamSplitterParams(HALF, math.pi, C, A),
        BeamSplitterParams(HALF, math.pi, D, B),
    ]


def qnd_unitary() -> ModeUnitary:
    return compose_all([element_unitary(e, 4) for e in qnd_elements()])


_S = 1.0 / math.sqrt(2.0)
# expected creation-operator expansions of the device
QND_PROBE_EXPANSION = {
    (0, 2, 0, 0): 0.25, (2, 0, 0, 0): -0.25, (0, 0, 0, 2): 0.25,
    (0, 0, 2, 0): -0.25, (1, 0, 1, 0): -0.5, (0, 1, 0, 1): 0.5,
}
QND_SIGNAL_EXPANSION = {(1, 0, 0, 0): _S, (0, 0, 1, 0): -_S}
QND_SIGNAL_PAIR_EXPANSION = {(2, 0, 0, 0): 0.5, (1, 0, 1, 0): -1.0, (0, 0, 2, 0): 0.5}


def _poly_deviation(poly, expected, scale=1.0):
    keys = set(poly) | set(expected)
    return float(max(abs(poly.get(k, 0.0) * scale - expected.get(k, 0.0)) for k in keys))


def qnd_expansion_errors(u: ModeUnitary | None = None) -> dict[str, float]:
    """Largest coefficient deviation of the device from each reference expansion."""
    u = u or qnd_unitary()
    return {
        "c_dag d_dag": _poly_deviation(creation_polynomial(u, (0, 0, 1, 1)), QND_PROBE_EXPANSION),
        "a_dag": _poly_deviation(creation_polynomial(u, (1, 0, 0, 0)), QND_SIGNAL_EXPANSION),
        "a_dag^2": _poly_deviation(creation_polynomial(u, (2, 0, 0, 0)), QND_SIGNAL_PAIR_EXPANSION),
    }


QND_HERALD = DetectionPattern({A: exactly(0), C: exactly(1), D: exactly(1)})


class QndResult(NamedTuple):
    probability: float
    state: PureState
    classification: str


def qnd_scheme(inp: QndInput, u: ModeUnitary | None = None) -> QndResult:
    """Herald on one click each at c', d' and none at a'; output is mode b'."""
    u = u or qnd_unitary()
    errors = qnd_expansion_errors(u)
    if max(errors.values()) > 1e-12:
        raise DomainError(f"QND network does not reproduce its reference expansions: {errors}")
    # input arm a, vacuum in b, one probe photon each in c and d
    start = tensor(tensor(inp.state(), make_basis_state((0,))), make_basis_state((1, 1)))
    res = project(apply_unitary(start, u), QND_HERALD)
    if not res.succeeded:
        label = "no-herald"
    elif fidelity(res.conditional_state, make_basis_state((1,))) >= 1.0 - 1e-10:
        label = "single-photon"
    else:
        label = "ambiguous"
    return QndResult(res.probability, res.conditional_state, label)


# --- phase sensitivity --------------------------------------------------------

@dataclass(frozen=True)
class Observable:
    """Hermitian observable given by its action on states."""

    name: str
    apply: Callable[[PureState], PureState]


def difference_current(mode_a: int = 0, mode_b: int = 1) -> Observable:
    def apply(state):
        return PureState(state.mode_count, {occ: amp * (occ[mode_a] - occ[mode_b]) for occ, amp in state})

    return Observable(f"n{mode_a}-n{mode_b}", apply)


def noon_projector(n: int) -> Observable:
    """|n,0><0,n| + |0,n><n,0| on two modes."""
    hi, lo = (n, 0), (0, n)

    def apply(state):
        return PureState(state.mode_count, {hi: state[lo], lo: state[hi]})

    return Observable(f"noon{n}", apply)


def truncated_coherent_state(alpha: complex, cutoff: int, modes: int = 2, mode: int = 0) -> PureState:
    """Coherent state on ``mode`` truncated at ``cutoff`` photons and renormalized."""
    terms = []
    for n in range(cutoff + 1):
        occ = [0] * modes
        occ[mode] = n
        amp = alpha**n / math.sqrt(math.factorial(n)) if n else 1.0
        terms.append((tuple(occ), amp))
    return superpose(terms, normalize=True)


@dataclass(frozen=True)
class SensitivityReport:
    phi: float
    mean_obs: float
    std_obs: float
    delta_phi: float
    slope: float


def _number_weighted(state: PureState, mode: int) -> PureState:
    return PureState(state.mode_count, {occ: 1j * occ[mode] * amp for occ, amp in state})


def _real_inner(a: PureState, b: PureState) -> complex:
    return sum(a[k].conjugate() * amp for k, amp in b)


def phase_sensitivity(
    state: PureState,
    phi: float,
    observable: Observable,
    interferometer: str = "mach-zehnder",
    phase_mode: int = 0,
) -> SensitivityReport:
    """Delta phi = Delta O / |d<O>/dphi| for a phase ``phi`` on one arm.

    ``interferometer="mach-zehnder"`` wraps the phase between two 50:50
    splitters; ``"phase-only"`` applies the phase directly to ``state``.
    The slope is computed analytically from the generator of the phase,
    d|psi>/dphi = U_out (i n) |psi_mid>.
    """
    if state.mode_count != 2:
        raise DomainError("phase sensitivity is defined for two-mode inputs")
    if not state.is_normalized():
        raise DomainError("input state must be normalized")
    if interferometer == "mach-zehnder":
        splitter = beam_splitter_unitary(BeamSplitterParams(HALF, 0.0, 0, 1), 2)
        inner = apply_unitary(state, splitter)
    elif interferometer == "phase-only":
        splitter = None
        inner = state
    else:
        raise DomainError(f"unknown interferometer {interferometer!r}")
    mid = apply_unitary(inner, phase_shifter_unitary(phase_mode, phi, 2))
    dmid = _number_weighted(mid, phase_mode)
    if splitter is not None:
        out, dout = apply_unitary(mid, splitter), apply_unitary(dmid, splitter)
    else:
        out, dout = mid, dmid
    o_out = observable.apply(out)
    mean = _real_inner(out, o_out).real
    second = o_out.norm_sq()
    std = math.sqrt(max(second - mean**2, 0.0))
    slope = 2.0 * _real_inner(o_out, dout).real
    if abs(slope) < 1e-12:
        raise DegeneratePointError(f"d<{observable.name}>/dphi vanishes at phi={phi}")
    return SensitivityReport(phi, mean, std, std / abs(slope), slope)


def best_phase_sensitivity(
    state: PureState,
    observable: Observable,
    interferometer: str = "mach-zehnder",
    grid_points: int = 721,
) -> SensitivityReport:
    """Scan phi over (0, pi) and refine the smallest Delta phi with a bounded search."""
    grid = np.linspace(0.0, math.pi, grid_points)[1:-1]
    best = None
    for phi in grid:
        try:
            rep = phase_sensitivity(state, float(phi), observable, interferometer)
        except DegeneratePointError:
            continue
        if best is None or rep.delta_phi < best.delta_phi:
            best = rep
    if best is None:
        raise DegeneratePointError(f"{observable.name} has no phase response on (0, pi)")
    step = grid[1] - grid[0]

    def objective(phi):
        try:
            return phase_sensitivity(state, phi, observable, interferometer).delta_phi
        except DegeneratePointError:
            return math.inf

    res = minimize_scalar(objective, bounds=(best.phi - step, best.phi + step), method="bounded",
                          options={"xatol": 1e-10})
    refined = phase_sensitivity(state, float(res.x), observable, interferometer)
    return refined if refined.delta_phi <= best.delta_phi else best
