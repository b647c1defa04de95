"""Self-contained check bundles for each heralded gate and scheme."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import gates, schemes
from .checks import Check, below, close, holds, near_one
from .fock import PureState, fidelity, make_basis_state, superpose
from .optics import apply_elements
from .postselect import enumerate_outcomes

DEFAULT_SEED = 2024
TRIALS = 100


@dataclass
class Bundle:
    name: str
    herald_probability: float
    conditional_state: PureState
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)


def random_complex_unit(rng: np.random.Generator, size: int) -> np.ndarray:
    v = rng.normal(size=size) + 1j * rng.normal(size=size)
    return v / np.linalg.norm(v)


def _worst(values, expected):
    values = np.asarray(values, dtype=float)
    return float(values[np.argmax(np.abs(values - expected))])


def ns_bundle(seed: int = DEFAULT_SEED) -> Bundle:
    rng = np.random.default_rng(seed)
    params = gates.load_ns_params()
    probs, fids, last = [], [], None
    for _ in range(TRIALS):
        a = random_complex_unit(rng, 3)
        last = gates.ns_gate_apply(superpose([((n,), a[n]) for n in range(3)]), params)
        probs.append(last.success_probability)
        fids.append(last.fidelity_vs_target)
    checks = [
        close("success_prob", _worst(probs, 0.25), 0.25, 1e-8),
        near_one("sign_flip_fidelity", min(fids), 1e-8),
    ]
    return Bundle("ns", last.success_probability, last.conditional_state, checks)


def _random_dual_rail(rng):
    return gates.logical_state(random_complex_unit(rng, 4))


def csign_bundle(seed: int = DEFAULT_SEED) -> Bundle:
    rng = np.random.default_rng(seed)
    params = gates.load_ns_params()
    probs, fids, last = [], [], None
    for _ in range(TRIALS):
        last = gates.csign_apply(_random_dual_rail(rng), params)
        probs.append(last.success_probability)
        fids.append(last.fidelity_vs_target)
    cnot = [gates.cnot_via_csign(_random_dual_rail(rng), params) for _ in range(10)]
    checks = [
        close("success_prob", _worst(probs, 0.0625), 0.0625, 1e-8),
        near_one("kerr_oracle_fidelity", min(fids), 1e-8),
        close("cnot_success_prob", _worst([r.success_probability for r in cnot], 0.0625), 0.0625, 1e-8),
        near_one("cnot_fidelity", min(r.fidelity_vs_target for r in cnot), 1e-8),
    ]
    return Bundle("csign", last.success_probability, last.conditional_state, checks)


def noon4_herald_oracle(tap_reflectivity: float = 0.5) -> float:
    """Probability of one click on each detector, by enumerating every detector outcome."""
    out = apply_elements(make_basis_state((3, 3, 0, 0)), schemes.noon4_elements(tap_reflectivity))
    outcomes = {counts: p for counts, p, _ in enumerate_outcomes(out, (2, 3))}
    return outcomes.get((1, 1), 0.0)


def noon4_bundle(seed: int = DEFAULT_SEED) -> Bundle:
    state, p = schemes.noon4_scheme()
    arms, _ = schemes.noon4_heralded_arms()
    mid_target = superpose([((3, 1), 1.0), ((1, 3), -1.0)], normalize=True)
    checks = [
        near_one("noon_fidelity", fidelity(state, schemes.noon_state(4, -1)), 1e-8),
        near_one("intermediate_fidelity", fidelity(arms, mid_target), 1e-8),
        close("herald_prob_vs_enumeration", p, noon4_herald_oracle(), 1e-12),
        holds("four_photons_in_every_term", state.photon_numbers() == {4}),
    ]
    return Bundle("noon4", p, state, checks)


YURKE_ASYMPTOTE_NS = (10, 100, 1000, 10000)


def yurke_bundle(seed: int = DEFAULT_SEED) -> Bundle:
    checks = []
    support_err, formula_err = 0.0, 0.0
    grid = np.linspace(0.02, 0.98, 20)
    supports_ok = True
    for n in range(2, 6):
        state, _ = schemes.yurke_scheme(schemes.YurkeSchemeConfig(n, 0.3))
        supports_ok &= set(state.terms) == {(n, n - 2), (n - 2, n)}
        support_err = max(support_err, abs(abs(state[(n, n - 2)]) - abs(state[(n - 2, n)])))
        closed = schemes.yurke_success_probability(n, grid)
        for r, pc in zip(grid, closed):
            _, p = schemes.yurke_scheme(schemes.YurkeSchemeConfig(n, float(r)))
            formula_err = max(formula_err, abs(p - pc))
    checks.append(holds("two_fold_support", supports_ok))
    checks.append(close("two_fold_magnitude_gap", support_err, 0.0, 1e-10))
    checks.append(close("closed_form_vs_simulation", formula_err, 0.0, 1e-10))
    target = schemes.ASYMPTOTIC_YURKE_PROBABILITY
    gaps = [abs(schemes.yurke_success_probability(n, 1.0 / n) - target) for n in YURKE_ASYMPTOTE_NS]
    checks.append(holds("monotone_approach", all(b < a for a, b in zip(gaps, gaps[1:]))))
    checks.append(below("asymptote_gap_n10000", gaps[-1], 0.005))
    for n in (10, 100, 1000):
        r_opt, _ = schemes.optimize_reflectivity(n)
        checks.append(close(f"argmax_n{n}_relative", r_opt * n, 1.0, 0.25))
    state, p = schemes.yurke_scheme(schemes.YurkeSchemeConfig(3, 1.0 / 3))
    return Bundle("yurke", p, state, checks)


def random_qnd_input(rng: np.random.Generator) -> schemes.QndInput:
    return schemes.QndInput(*random_complex_unit(rng, 3))


def qnd_bundle(seed: int = DEFAULT_SEED) -> Bundle:
    rng = np.random.default_rng(seed)
    errs = schemes.qnd_expansion_errors()
    lin = 0.0
    for _ in range(TRIALS):
        inp = random_qnd_input(rng)
        lin = max(lin, abs(schemes.qnd_scheme(inp).probability - abs(inp.c1) ** 2 / 8))
    single = schemes.qnd_scheme(schemes.QndInput(0, 1, 0))
    checks = [close(f"expansion_{k}", v, 0.0, 1e-12) for k, v in errs.items()]
    checks += [
        close("prob_linear_in_c1", lin, 0.0, 1e-10),
        close("prob_single_photon", single.probability, 0.125, 1e-10),
        close("prob_vacuum", schemes.qnd_scheme(schemes.QndInput(1, 0, 0)).probability, 0.0, 1e-10),
        close("prob_two_photons", schemes.qnd_scheme(schemes.QndInput(0, 0, 1)).probability, 0.0, 1e-10),
        holds("single_photon_reaches_b", single.classification == "single-photon"),
    ]
    return Bundle("qnd", single.probability, single.state, checks)


BUNDLES = {
    "ns": ns_bundle, "csign": csign_bundle, "noon4": noon4_bundle,
    "yurke": yurke_bundle, "qnd": qnd_bundle,
}
