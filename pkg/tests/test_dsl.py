import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fockbench import corpus, dsl, gates, schemes
from fockbench.dsl import (
    BasisInput,
    BsStmt,
    CircuitSpec,
    DetectStmt,
    ExpectStmt,
    KerrStmt,
    MetricStmt,
    PsStmt,
    SuperposeInput,
    SweepStmt,
)
from fockbench.errors import CapacityError
from fockbench.fock import make_basis_state, superpose, tensor
from fockbench.optics import apply_elements
from fockbench.postselect import Condition, project

HOM = "modes 2\ninput 1 1\nbs 0.7853981633974483 0 0 1\ndetect 0 exactly 2\n"
finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


# --- generators ------------------------------------------------------------------

@st.composite
def specs(draw):
    n = draw(st.integers(1, 5))
    mode = st.integers(0, n - 1)
    names = draw(st.lists(st.from_regex(r"[a-z][a-z0-9_]{0,5}", fullmatch=True)
                          .filter(lambda s: s not in dsl.KEYWORDS), max_size=3, unique=True))
    params = tuple((name, draw(st.floats(0, math.pi / 2))) for name in names)
    theta = st.floats(0, math.pi / 2) | (st.sampled_from(names) if names else st.nothing())
    value = finite | (st.sampled_from(names) if names else st.nothing())

    def pair():
        i = draw(mode)
        j = draw(mode.filter(lambda x: x != i)) if n > 1 else None
        return i, j

    elements = []
    for _ in range(draw(st.integers(0, 6))):
        kind = draw(st.sampled_from(["bs", "ps", "kerr"] if n > 1 else ["ps"]))
        if kind == "ps":
            elements.append(PsStmt(draw(value), draw(mode)))
        else:
            i, j = pair()
            if kind == "bs":
                elements.append(BsStmt(draw(theta), draw(value), i, j))
            else:
                elements.append(KerrStmt(draw(value), i, j))
    det_modes = draw(st.lists(mode, unique=True, max_size=n))
    detects = tuple(DetectStmt(m, Condition(draw(st.integers(0, 3)), draw(st.booleans()))) for m in det_modes)
    remaining = n - sum(1 for d in detects if not d.condition.at_least)

    def normalized_terms(width):
        occs = draw(st.lists(st.lists(st.integers(0, 3), min_size=width, max_size=width).map(tuple),
                             min_size=1, max_size=4, unique=True))
        amps = [complex(draw(st.floats(0.1, 2)), draw(st.floats(-2, 2))) for _ in occs]
        state = superpose(list(zip(occs, amps)), normalize=True)
        return SuperposeInput(tuple(state.terms.items()))

    if draw(st.booleans()):
        input_decl = BasisInput(tuple(draw(st.integers(0, 3)) for _ in range(n)))
    else:
        input_decl = normalized_terms(n)
    sweeps = tuple(
        SweepStmt(name, draw(finite), draw(finite), draw(st.integers(1, 50)))
        for name in names if draw(st.booleans())
    )
    kept = [m for m in range(n) if m not in {d.mode for d in detects if not d.condition.at_least}]
    metrics = []
    if len(kept) >= 2 and draw(st.booleans()):
        i, j = draw(st.permutations(kept))[:2]
        metrics.append(MetricStmt("noon", (i, j), draw(st.integers(1, 4))) if draw(st.booleans())
                       else MetricStmt("diff", (i, j)))
    expects = []
    if draw(st.booleans()):
        expects.append(ExpectStmt("probability", draw(st.floats(0, 1)), value=draw(st.floats(0, 1))))
    if remaining > 0 and draw(st.booleans()):
        expects.append(ExpectStmt("fidelity", draw(st.floats(0, 1)), target=normalized_terms(remaining)))
    return CircuitSpec(n, input_decl, tuple(elements), detects, params, sweeps, tuple(metrics), tuple(expects))


@settings(max_examples=200)
@given(specs())
def test_parse_serialize_round_trip(spec):
    text = dsl.serialize(spec)
    parsed = dsl.parse(text)
    assert not isinstance(parsed, list), parsed
    assert parsed == spec
    assert dsl.serialize(parsed) == text


# --- grammar examples --------------------------------------------------------------

def test_hom_example():
    spec = dsl.parse(HOM)
    assert spec.mode_count == 2
    run = dsl.execute(dsl.lower(spec))
    assert run.probability == pytest.approx(0.5, abs=1e-12)


def test_angles_serialize_with_17_digits():
    text = dsl.serialize(dsl.parse(HOM))
    assert "bs 0.78539816339744828 0 0 1" in text


def test_keywords_are_case_insensitive_and_canonicalized():
    spec = dsl.parse("MODES 2\nInput 1 1\nBS 0.5 0 0 1\nDETECT 1 AtLeast 1\n")
    assert dsl.serialize(spec) == "modes 2\ninput 1 1\nbs 0.5 0 0 1\ndetect 1 atleast 1\n"


def test_comments_and_blank_lines():
    spec = dsl.parse("# header\n\nmodes 1   # trailing\ninput 2\n  # note\nps 0.1 0\n")
    assert spec.comments == ("header",)
    assert len(spec.elements) == 1


def test_noon4_file_shape():
    spec = dsl.parse(corpus.shipped_path("noon4").read_text())
    assert spec.mode_count == 4
    assert len(spec.elements) == 5
    assert len(spec.herald.modes) == 2


def test_out_of_range_mode():
    diags = dsl.parse("modes 2\ninput 1 1\nbs 0.5 0 0 9\n")
    assert isinstance(diags, list)
    assert diags[0].line == 3 and diags[0].column == 12
    assert "mode index out of range" in diags[0].message


@pytest.mark.parametrize("source,line,fragment", [
    ("modes 2\ninput 1 1\ndetect 0 exactly 1\ndetect 0 exactly 1\n", 4, "duplicate herald mode"),
    ("modes 2\ninput 1\n", 2, "expected 2"),
    ("modes 2\ninput 1 1\nbs 2 0 0 1\n", 3, "theta"),
    ("modes 2\ninput 1 1\nbs x 0 0 1\n", 3, "unknown parameter"),
    ("modes 2\ninput 1 1\nbs nan 0 0 1\n", 3, "'nan'"),
    ("modes 2\ninput 1 1\nsweep t 0 1 0\n", 3, "step count"),
    ("modes 2\ninput 1 1\nfrobnicate\n", 3, "unknown statement"),
    ("modes 2\ninput superpose (1,0 : 1 0; 0,1 : 1 0)\n", 2, "not normalized"),
    ("modes 2\ninput 1 1\ndetect 0 exactly 1\nmetric diff 0 1\n", 4, "removed"),
    ("modes 2\ninput 1 1\nexpect fidelity superpose (1,0 : 1 0) 1e-3\ndetect 0 exactly 1\n", 3, "1 modes"),
    ("input 1 1\n", 1, "missing 'modes'"),
    ("modes 2\nmodes 3\ninput 1 1\n", 2, "duplicate"),
])
def test_semantic_diagnostics(source, line, fragment):
    diags = dsl.parse(source)
    assert isinstance(diags, list) and diags
    assert any(d.line == line and fragment in d.message for d in diags), diags


def test_kerr_requires_oracle_mode():
    spec = dsl.parse("modes 2\ninput 1 1\nkerr 3.141592653589793 0 1\n")
    with pytest.raises(dsl.DslError) as info:
        dsl.lower(spec)
    assert info.value.diagnostics[0].message == "nonlinear element outside oracle mode"
    assert info.value.diagnostics[0].line == 3
    run = dsl.execute(dsl.lower(spec, oracle_mode=True))
    assert run.output_state[(1, 1)] == pytest.approx(-1)


def test_lowering_fuses_linear_runs():
    src = "modes 2\ninput 1 1\nbs 0.3 0 0 1\nps 0.2 1\nkerr 1 0 1\nbs 0.4 0 0 1\nps 0.1 0\n"
    circuit = dsl.lower(dsl.parse(src), oracle_mode=True)
    assert len(circuit.stages) == 3


def test_overrides_and_unknown_override():
    spec = dsl.parse("modes 2\nparam t 0\ninput 1 0\nbs t 0 0 1\ndetect 1 exactly 1\n")
    assert dsl.execute(dsl.lower(spec)).probability == pytest.approx(0)
    assert dsl.execute(dsl.lower(spec, overrides={"t": math.pi / 2})).probability == pytest.approx(1)
    with pytest.raises(dsl.DslError):
        dsl.lower(spec, overrides={"nope": 1})


def test_capacity_propagates():
    with pytest.raises(CapacityError):
        dsl.run_source("modes 2\ninput 7 7\nbs 0.3 0 0 1\n")


def test_sweep_values():
    assert dsl.sweep_values(0.5, 2, 1) == [0.5]
    assert dsl.sweep_values(0, 1, 3) == [0, 0.5, 1]


# --- mutation corpus ---------------------------------------------------------------

def _statement_lines(text):
    return [k for k, line in enumerate(text.splitlines()) if line.strip() and not line.startswith("#")]


def mutations(text, rng):
    """(mutated text, 1-based line of the damage) for each mutation kind."""
    lines = text.splitlines()
    out = []
    for k in _statement_lines(text):
        toks = lines[k].split()
        if len(toks) > 1:
            for drop in range(1, len(toks)):
                mutated = lines[:k] + [" ".join(toks[:drop] + toks[drop + 1:])] + lines[k + 1:]
                out.append(("\n".join(mutated), k + 1, "delete"))
        if toks[0] in ("bs", "kerr", "ps", "detect"):
            pos = {"bs": 3, "kerr": 2, "ps": 2, "detect": 1}[toks[0]]
            bad = list(toks)
            bad[pos] = "99"
            out.append(("\n".join(lines[:k] + [" ".join(bad)] + lines[k + 1:]), k + 1, "range"))
        if toks[0] == "detect":
            mutated = lines[: k + 1] + [lines[k]] + lines[k + 1:]
            out.append(("\n".join(mutated), k + 2, "dup"))
    rng.shuffle(out)
    return out


@pytest.mark.parametrize("name", sorted(corpus.BUILDERS))
def test_mutation_corpus_yields_positioned_diagnostics(name):
    text = corpus.shipped_path(name).read_text()
    rng = random.Random(name)
    for mutated, line, kind in mutations(text, rng):
        result = dsl.parse(mutated)
        if not isinstance(result, list):
            pytest.fail(f"{kind} mutation at line {line} parsed cleanly:\n{mutated}")
        assert any(d.line == line for d in result), (kind, line, result)
        for d in result:
            assert 1 <= d.line <= max(1, len(mutated.splitlines()))
            assert d.column >= 1


@settings(max_examples=300)
@given(st.text(alphabet="modesinputbskerrdtcxyz0123456789 .-:;,()#\n", max_size=200))
def test_parser_never_crashes_on_noise(text):
    result = dsl.parse(text)
    if isinstance(result, list):
        assert result and all(isinstance(d, dsl.ParseDiagnostic) for d in result)


# --- shipped corpus ------------------------------------------------------------------

@pytest.mark.parametrize("name", sorted(corpus.BUILDERS))
def test_shipped_files_match_builders_and_pass(name):
    text = corpus.shipped_path(name).read_text()
    spec = dsl.parse(text)
    assert spec == corpus.BUILDERS[name]()
    assert dsl.parse(dsl.serialize(spec)) == spec
    run = dsl.execute(dsl.lower(spec))
    assert run.checks and run.passed, [c.line() for c in run.checks]


def _hand_assembled(name):
    """Conditional state of each shipped circuit computed directly through the modules."""
    if name == "hom":
        from fockbench.optics import BeamSplitterParams
        out = apply_elements(make_basis_state((1, 1)), [BeamSplitterParams(math.pi / 4)])
        return project(out, corpus.hom().herald)
    if name == "ns":
        p = gates.load_ns_params()
        sig = superpose([((n,), a) for n, a in enumerate(corpus.NS_DEMO_INPUT)])
        out = apply_elements(tensor(sig, make_basis_state(p.ancilla)), p.elements())
        return project(out, p.herald_pattern())
    if name == "csign":
        p = gates.load_ns_params()
        inp = tensor(gates.logical_state([0.5] * 4), make_basis_state(p.ancilla * 2))
        return project(apply_elements(inp, gates.csign_elements(p)), gates.csign_herald(p))
    if name == "noon4":
        out = apply_elements(make_basis_state((3, 3, 0, 0)), schemes.noon4_elements())
        return project(out, schemes.NOON4_HERALD)
    if name == "yurke":
        cfg = corpus.YURKE_DEMO
        out = apply_elements(make_basis_state((cfg.n, cfg.n, 0, 0)), schemes.yurke_elements(cfg.reflectivity_sq))
        return project(out, schemes.yurke_herald(2))
    if name == "qnd":
        out = apply_elements(make_basis_state((1, 0, 1, 1)), schemes.qnd_elements())
        return project(out, schemes.QND_HERALD)
    from fockbench.optics import PhaseShiftParams
    out = apply_elements(schemes.noon_state(4), [PhaseShiftParams(0.0, 0)])
    return project(out, corpus.noon_phase().herald)


@pytest.mark.parametrize("name", sorted(corpus.BUILDERS))
def test_lowered_files_match_module_calls(name):
    run = dsl.execute(dsl.lower(dsl.parse(corpus.shipped_path(name).read_text())))
    ref = _hand_assembled(name)
    assert run.probability == pytest.approx(ref.probability, abs=1e-12)
    assert run.conditional_state.allclose(ref.conditional_state, atol=1e-12)


def test_csign_file_matches_gate_module():
    run = dsl.execute(dsl.lower(dsl.parse(corpus.shipped_path("csign").read_text())))
    rep = gates.csign_apply(gates.logical_state([0.5] * 4))
    assert run.conditional_state.allclose(rep.conditional_state, atol=1e-12)


def test_noon_phase_metric_is_cos():
    spec = dsl.parse(corpus.shipped_path("noon_phase").read_text())
    header, rows = dsl.sweep_rows(spec, "phi", spec.sweeps[0].values())
    assert header == ["phi", "probability", "noon4_0_1"]
    for phi, _, value in rows:
        assert value == pytest.approx(math.cos(4 * phi), abs=1e-9)
