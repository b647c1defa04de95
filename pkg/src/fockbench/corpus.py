"""Builders for the shipped circuit files.

Each builder assembles a :class:`~fockbench.dsl.CircuitSpec` from the same
element lists the gate and scheme modules use, so the files in
``fockbench/circuits`` can be regenerated with ``python -m fockbench.corpus``
and compared structurally against their builders.
"""

from __future__ import annotations

import math
import sys
from importlib import resources
from pathlib import Path

from . import gates, schemes
from .dsl import (
    BasisInput,
    BsStmt,
    CircuitSpec,
    DetectStmt,
    ExpectStmt,
    MetricStmt,
    PsStmt,
    SuperposeInput,
    SweepStmt,
    serialize,
)
from .fock import make_basis_state, superpose, tensor
from .optics import BeamSplitterParams, PhaseShiftParams
from .postselect import exactly

S = 1.0 / math.sqrt(2.0)
THETA_HEADER = "angles in radians; reflectivity |r|^2 = sin^2(theta)"


def _stmts(elements, names=None):
    """Element list to DSL statements; ``names`` maps element index to a theta parameter."""
    names = names or {}
    out = []
    for k, e in enumerate(elements):
        if isinstance(e, BeamSplitterParams):
            out.append(BsStmt(names.get(k, e.theta), e.phase, e.mode_a, e.mode_b))
        elif isinstance(e, PhaseShiftParams):
            out.append(PsStmt(e.phi, e.mode))
        else:
            raise TypeError(f"unsupported element {e!r}")
    return tuple(out)


def _detects(pattern):
    return tuple(DetectStmt(m, c) for m, c in pattern.conditions.items())


def _terms(state):
    return SuperposeInput(tuple(state.terms.items()))


def hom() -> CircuitSpec:
    return CircuitSpec(
        mode_count=2,
        input_decl=BasisInput((1, 1)),
        elements=(BsStmt(math.pi / 4, 0.0, 0, 1),),
        detects=(DetectStmt(0, exactly(2)),),
        expects=(
            ExpectStmt("probability", 1e-12, value=0.5),
            ExpectStmt("fidelity", 1e-12, target=SuperposeInput((((0,), 1 + 0j),))),
        ),
        comments=("two-photon interference on a 50:50 splitter; both photons exit mode 0 half the time",
                  THETA_HEADER),
    )


NS_DEMO_INPUT = (0.6, 0.48 + 0.36j, math.sqrt(0.28))


def ns() -> CircuitSpec:
    p = gates.load_ns_params()
    signal = superpose([((n,), a) for n, a in enumerate(NS_DEMO_INPUT)])
    full = tensor(signal, make_basis_state(p.ancilla))
    return CircuitSpec(
        mode_count=3,
        input_decl=_terms(full),
        elements=_stmts(p.elements()),
        detects=_detects(p.herald_pattern()),
        expects=(
            ExpectStmt("probability", 1e-8, value=0.25),
            ExpectStmt("fidelity", 1e-8, target=_terms(gates.ns_target(signal))),
        ),
        comments=("nonlinear sign gate: signal mode 0, ancilla |1,0> on modes 1,2",
                  "heralded map a|0> + b|1> + c|2> -> a|0> + b|1> - c|2>", THETA_HEADER),
    )


def csign() -> CircuitSpec:
    p = gates.load_ns_params()
    logical = gates.logical_state([0.5, 0.5, 0.5, 0.5])
    full = tensor(logical, make_basis_state(p.ancilla * 2))
    return CircuitSpec(
        mode_count=gates.CSIGN_MODES,
        input_decl=_terms(full),
        elements=_stmts(gates.csign_elements(p)),
        detects=_detects(gates.csign_herald(p)),
        expects=(
            ExpectStmt("probability", 1e-8, value=0.0625),
            ExpectStmt("fidelity", 1e-8, target=_terms(gates.kerr_oracle_csign(logical))),
        ),
        comments=("conditional sign flip on two dual-rail qubits (modes 0..3, |1> rails 0 and 2)",
                  "one NS gate per |1> rail, ancillas on modes 4,5 and 6,7", THETA_HEADER),
    )


def noon4() -> CircuitSpec:
    elements = schemes.noon4_elements()
    return CircuitSpec(
        mode_count=4,
        input_decl=BasisInput((3, 3, 0, 0)),
        params=(("tap", math.pi / 4),),
        elements=_stmts(elements, {1: "tap", 2: "tap"}),
        detects=_detects(schemes.NOON4_HERALD),
        expects=(
            ExpectStmt("probability", 1e-12, value=3 / 64),
            ExpectStmt("fidelity", 1e-8, target=_terms(schemes.noon_state(4, -1))),
        ),
        comments=("four-photon NOON state from |3,3>: taps to detectors 2,3, pi/2 correction, 50:50",
                  "herald probability 3/64 holds for the default tap of 50:50", THETA_HEADER),
    )


YURKE_DEMO = schemes.YurkeSchemeConfig(3, 0.3)


def yurke() -> CircuitSpec:
    cfg = YURKE_DEMO
    return CircuitSpec(
        mode_count=4,
        input_decl=BasisInput((cfg.n, cfg.n, 0, 0)),
        params=(("tap", math.asin(math.sqrt(cfg.reflectivity_sq))),),
        elements=_stmts(schemes.yurke_elements(cfg.reflectivity_sq), {0: "tap", 1: "tap"}),
        detects=_detects(schemes.yurke_herald(2)),
        expects=(
            ExpectStmt("probability", 1e-10,
                       value=schemes.yurke_success_probability(cfg.n, cfg.reflectivity_sq)),
            ExpectStmt("fidelity", 1e-10, target=SuperposeInput(
                (((cfg.n - 2, cfg.n), S + 0j), ((cfg.n, cfg.n - 2), S + 0j)))),
        ),
        comments=("path-entangled |3,1> + |1,3> from |3,3> on a two-fold coincidence",
                  "tap |r|^2 = 0.3; detector splitter carries a pi/2 pre-phase on mode 3",
                  THETA_HEADER),
    )


def qnd() -> CircuitSpec:
    return CircuitSpec(
        mode_count=4,
        input_decl=BasisInput((1, 0, 1, 1)),
        elements=_stmts(schemes.qnd_elements()),
        detects=_detects(schemes.QND_HERALD),
        expects=(
            ExpectStmt("probability", 1e-10, value=0.125),
            ExpectStmt("fidelity", 1e-10, target=SuperposeInput((((1,), 1 + 0j),))),
        ),
        comments=("single-photon presence detection: signal in mode 0, probe photons in modes 2,3",
                  "herald none/one/one at modes 0,2,3 leaves the photon in mode 1", THETA_HEADER),
    )


def noon_phase() -> CircuitSpec:
    return CircuitSpec(
        mode_count=2,
        input_decl=_terms(schemes.noon_state(4)),
        params=(("phi", 0.0),),
        elements=(PsStmt("phi", 0),),
        metrics=(MetricStmt("noon", (0, 1), 4),),
        sweeps=(SweepStmt("phi", 0.0, math.pi, 25),),
        expects=(ExpectStmt("probability", 1e-12, value=1.0),),
        comments=("phase phi on one arm of a four-photon NOON state",
                  "the NOON coherence metric follows cos(4 phi)"),
    )


BUILDERS = {
    "hom": hom, "ns": ns, "csign": csign, "noon4": noon4,
    "yurke": yurke, "qnd": qnd, "noon_phase": noon_phase,
}


def shipped_path(name: str) -> Path:
    return Path(str(resources.files("fockbench.circuits").joinpath(f"{name}.circ")))


def write_corpus(directory: Path) -> list[Path]:
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name, build in BUILDERS.items():
        path = directory / f"{name}.circ"
        path.write_text(serialize(build()), encoding="utf-8", newline="\n")
        written.append(path)
    return written


if __name__ == "__main__":
    target = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).parent / "circuits"
    for p in write_corpus(target):
        print(p)
