"""Line-oriented circuit description language.

One statement per line, ``#`` starts a comment::

    modes 2
    param theta 0.78539816339744828
    input 1 1
    bs theta 0 0 1
    detect 0 exactly 2
    sweep theta 0 1.5707963267948966 9
    expect probability 0.5 1e-12

Statements:

``modes N``
    number of modes (exactly once).
``param NAME VALUE``
    named real constant; any real-valued field may refer to it by name,
    and ``sweep``/``--set`` may rebind it.
``input n1 n2 ...`` / ``input superpose (n1,n2 : re im; ...)``
    initial basis state or normalized superposition.
``bs THETA PHASE I J``
    beam splitter with reflectivity ``|r|^2 = sin^2 THETA``.
``ps PHI I``, ``kerr KAPPA_TAU I J``
    phase shifter; cross-Kerr phase (only allowed in oracle mode).
``detect I exactly|atleast N``
    one detector condition of the herald.
``sweep NAME FROM TO STEPS``
    default scan range for a declared parameter.
``metric noon N I J`` / ``metric diff I J``
    expectation values reported on the conditional state: the NOON
    coherence ``|N,0><0,N| + h.c.`` on modes I, J, or ``<n_I - n_J>``.
``expect probability VALUE TOL`` / ``expect fidelity superpose (...) TOL``
    embedded checks on the herald probability and on the conditional state
    (which lives on the modes not removed by ``exactly`` detectors).
"""

from __future__ import annotations

import dataclasses
import math
import re
from dataclasses import dataclass, field
from typing import Mapping, Sequence, Union

from .checks import Check, close, near_one
from .errors import DomainError
from .fock import NORM_TOL, Occupation, PureState, fidelity, make_basis_state, superpose
from .optics import (
    BeamSplitterParams,
    KerrParams,
    ModeUnitary,
    PhaseShiftParams,
    apply_kerr,
    apply_unitary,
    compose_all,
    element_unitary,
)
from .postselect import Condition, DetectionPattern, project

Num = Union[float, str]

_TOKEN = re.compile(r"[():;,]|[^\s():;,]+")
_NUMBER = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?\Z")
_INT = re.compile(r"\d+\Z")
_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
KEYWORDS = frozenset(
    {"modes", "param", "input", "bs", "ps", "kerr", "detect", "sweep", "metric", "expect",
     "superpose", "exactly", "atleast", "noon", "diff", "probability", "fidelity"}
)


@dataclass(frozen=True)
class ParseDiagnostic:
    line: int
    column: int
    message: str
    severity: str = "error"

    def __str__(self) -> str:
        return f"{self.line}:{self.column}: {self.severity}: {self.message}"


class DslError(DomainError):
    """Raised by lowering and execution; carries positioned diagnostics."""

    def __init__(self, diagnostics: Sequence[ParseDiagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))


# --- statement types ---------------------------------------------------------------
# ``line`` is bookkeeping for diagnostics and does not take part in equality.

@dataclass(frozen=True)
class BasisInput:
    counts: Occupation


@dataclass(frozen=True)
class SuperposeInput:
    terms: tuple[tuple[Occupation, complex], ...]

    def state(self) -> PureState:
        return superpose(self.terms)


InputDecl = Union[BasisInput, SuperposeInput]


@dataclass(frozen=True)
class BsStmt:
    theta: Num
    phase: Num
    i: int
    j: int
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class PsStmt:
    phi: Num
    i: int
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class KerrStmt:
    kappa_tau: Num
    i: int
    j: int
    line: int = field(default=0, compare=False)


ElementStmt = Union[BsStmt, PsStmt, KerrStmt]


@dataclass(frozen=True)
class DetectStmt:
    mode: int
    condition: Condition
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class SweepStmt:
    name: str
    start: float
    stop: float
    steps: int

    def values(self) -> list[float]:
        return sweep_values(self.start, self.stop, self.steps)


@dataclass(frozen=True)
class MetricStmt:
    kind: str  # "noon" or "diff"
    modes: tuple[int, int]
    n: int = 0

    @property
    def name(self) -> str:
        i, j = self.modes
        return f"noon{self.n}_{i}_{j}" if self.kind == "noon" else f"diff_{i}_{j}"


@dataclass(frozen=True)
class ExpectStmt:
    kind: str  # "probability" or "fidelity"
    tolerance: float
    value: float = 0.0
    target: SuperposeInput | None = None


@dataclass(frozen=True)
class CircuitSpec:
    mode_count: int
    input_decl: InputDecl
    elements: tuple[ElementStmt, ...] = ()
    detects: tuple[DetectStmt, ...] = ()
    params: tuple[tuple[str, float], ...] = ()
    sweeps: tuple[SweepStmt, ...] = ()
    metrics: tuple[MetricStmt, ...] = ()
    expects: tuple[ExpectStmt, ...] = ()
    comments: tuple[str, ...] = field(default=(), compare=False)

    @property
    def herald(self) -> DetectionPattern:
        return DetectionPattern({d.mode: d.condition for d in self.detects})

    @property
    def param_defaults(self) -> dict[str, float]:
        return dict(self.params)

    @property
    def remaining_modes(self) -> tuple[int, ...]:
        removed = {d.mode for d in self.detects if not d.condition.at_least}
        return tuple(m for m in range(self.mode_count) if m not in removed)


def sweep_values(start: float, stop: float, steps: int) -> list[float]:
    """``steps`` evenly spaced points from ``start`` to ``stop``; one step gives ``[start]``."""
    if steps < 1:
        raise DomainError("a sweep needs at least one step")
    if steps == 1:
        return [float(start)]
    return [start + (stop - start) * k / (steps - 1) for k in range(steps)]


# --- parsing -----------------------------------------------------------------------

class _Fail(Exception):
    def __init__(self, column: int, message: str):
        self.column = column
        self.message = message


class _Line:
    def __init__(self, text: str, lineno: int):
        self.lineno = lineno
        self.tokens = [(m.group(), m.start() + 1) for m in _TOKEN.finditer(text)]
        self.pos = 0
        self.end_col = len(text.rstrip()) + 1

    def peek(self) -> str | None:
        return self.tokens[self.pos][0] if self.pos < len(self.tokens) else None

    def col(self) -> int:
        return self.tokens[self.pos][1] if self.pos < len(self.tokens) else self.end_col

    def take(self, what: str) -> tuple[str, int]:
        if self.pos >= len(self.tokens):
            raise _Fail(self.end_col, f"expected {what}, found end of line")
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def keyword(self, options: Sequence[str]) -> str:
        text, col = self.take(" or ".join(options))
        if text.lower() not in options:
            raise _Fail(col, f"expected {' or '.join(options)}, found {text!r}")
        return text.lower()

    def punct(self, p: str) -> None:
        text, col = self.take(repr(p))
        if text != p:
            raise _Fail(col, f"expected {p!r}, found {text!r}")

    def integer(self, what: str) -> tuple[int, int]:
        text, col = self.take(what)
        if not _INT.match(text):
            raise _Fail(col, f"expected {what} (non-negative integer), found {text!r}")
        return int(text), col

    def number(self, what: str) -> tuple[float, int]:
        text, col = self.take(what)
        if not _NUMBER.match(text):
            raise _Fail(col, f"expected {what} (number), found {text!r}")
        value = float(text)
        if not math.isfinite(value):
            raise _Fail(col, f"{what} must be finite")
        return value, col

    def num_or_name(self, what: str) -> tuple[Num, int]:
        text, col = self.take(what)
        if _NUMBER.match(text):
            value = float(text)
            if not math.isfinite(value):
                raise _Fail(col, f"{what} must be finite")
            return value, col
        if _NAME.match(text) and text.lower() not in KEYWORDS:
            return text, col
        raise _Fail(col, f"expected {what} (number or parameter name), found {text!r}")

    def name(self, what: str) -> tuple[str, int]:
        text, col = self.take(what)
        if not _NAME.match(text) or text.lower() in KEYWORDS:
            raise _Fail(col, f"expected {what} (identifier), found {text!r}")
        return text, col

    def done(self) -> None:
        if self.pos < len(self.tokens):
            text, col = self.tokens[self.pos]
            raise _Fail(col, f"unexpected trailing token {text!r}")


def _superpose_block(ln: _Line) -> tuple[SuperposeInput, int]:
    col = ln.col()
    ln.punct("(")
    terms = []
    while True:
        occ = [ln.integer("photon count")[0]]
        while ln.peek() == ",":
            ln.punct(",")
            occ.append(ln.integer("photon count")[0])
        ln.punct(":")
        re_, _ = ln.number("real part")
        im_, _ = ln.number("imaginary part")
        terms.append((tuple(occ), complex(re_, im_)))
        if ln.peek() == ";":
            ln.punct(";")
            continue
        ln.punct(")")
        break
    return SuperposeInput(tuple(terms)), col


class _Builder:
    """Collects statements and positions, then runs the semantic checks."""

    def __init__(self):
        self.diags: list[ParseDiagnostic] = []
        self.modes: tuple[int, int, int] | None = None  # value, line, col
        self.input: tuple[InputDecl, int, int, list[tuple[int, int]]] | None = None
        self.params: dict[str, float] = {}
        self.elements: list[ElementStmt] = []
        self.detects: list[DetectStmt] = []
        self.sweeps: list[SweepStmt] = []
        self.metrics: list[MetricStmt] = []
        self.expects: list[ExpectStmt] = []
        self.mode_refs: list[tuple[int, int, int]] = []  # value, line, col
        self.name_refs: list[tuple[str, int, int]] = []
        self.angle_refs: list[tuple[Num, int, int, str]] = []
        self.targets: list[tuple[SuperposeInput, int, int]] = []
        self.metric_pos: list[tuple[MetricStmt, int, int]] = []
        self.detect_pos: list[tuple[int, int, int]] = []

    def error(self, line: int, col: int, message: str) -> None:
        self.diags.append(ParseDiagnostic(line, col, message))

    def mode(self, ln: _Line) -> int:
        value, col = ln.integer("mode index")
        self.mode_refs.append((value, ln.lineno, col))
        return value

    def value(self, ln: _Line, what: str) -> Num:
        value, col = ln.num_or_name(what)
        if isinstance(value, str):
            self.name_refs.append((value, ln.lineno, col))
        return value

    def statement(self, ln: _Line) -> None:
        kw_text, kw_col = ln.take("statement")
        kw = kw_text.lower()
        no = ln.lineno
        if kw == "modes":
            n, col = ln.integer("mode count")
            ln.done()
            if self.modes is not None:
                raise _Fail(kw_col, "duplicate 'modes' statement")
            if n < 1:
                raise _Fail(col, "mode count must be positive")
            self.modes = (n, no, col)
        elif kw == "param":
            name, col = ln.name("parameter name")
            value, _ = ln.number("parameter value")
            ln.done()
            if name in self.params:
                raise _Fail(col, f"duplicate parameter {name!r}")
            self.params[name] = value
        elif kw == "input":
            if self.input is not None:
                raise _Fail(kw_col, "duplicate 'input' statement")
            if (ln.peek() or "").lower() == "superpose":
                ln.take("superpose")
                decl, col = _superpose_block(ln)
                ln.done()
                self.input = (decl, no, col, [])
            else:
                counts = []
                cols = []
                while ln.peek() is not None:
                    n, col = ln.integer("photon count")
                    counts.append(n)
                    cols.append(col)
                if not counts:
                    raise _Fail(ln.col(), "expected photon counts or 'superpose'")
                self.input = (BasisInput(tuple(counts)), no, cols[0], cols)
        elif kw == "bs":
            theta_col = ln.col()
            theta = self.value(ln, "theta")
            phase = self.value(ln, "phase")
            i_col = ln.col()
            i, j = self.mode(ln), self.mode(ln)
            ln.done()
            if i == j:
                raise _Fail(i_col, "beam splitter needs two distinct modes")
            self.angle_refs.append((theta, no, theta_col, "theta"))
            self.elements.append(BsStmt(theta, phase, i, j, no))
        elif kw == "ps":
            phi = self.value(ln, "phi")
            i = self.mode(ln)
            ln.done()
            self.elements.append(PsStmt(phi, i, no))
        elif kw == "kerr":
            kt = self.value(ln, "kappa_tau")
            i_col = ln.col()
            i, j = self.mode(ln), self.mode(ln)
            ln.done()
            if i == j:
                raise _Fail(i_col, "cross-Kerr element needs two distinct modes")
            self.elements.append(KerrStmt(kt, i, j, no))
        elif kw == "detect":
            col = ln.col()
            m = self.mode(ln)
            kind = ln.keyword(("exactly", "atleast"))
            n, _ = ln.integer("photon count")
            ln.done()
            self.detect_pos.append((m, no, col))
            self.detects.append(DetectStmt(m, Condition(n, kind == "atleast"), no))
        elif kw == "sweep":
            name, col = ln.name("parameter name")
            start, _ = ln.number("sweep start")
            stop, _ = ln.number("sweep stop")
            steps, steps_col = ln.integer("step count")
            ln.done()
            if steps < 1:
                raise _Fail(steps_col, "step count must be at least 1")
            self.name_refs.append((name, no, col))
            self.sweeps.append(SweepStmt(name, start, stop, steps))
        elif kw == "metric":
            kind = ln.keyword(("noon", "diff"))
            n = 0
            if kind == "noon":
                n, n_col = ln.integer("photon number")
                if n < 1:
                    raise _Fail(n_col, "NOON metric needs at least one photon")
            col = ln.col()
            i, j = self.mode(ln), self.mode(ln)
            ln.done()
            if i == j:
                raise _Fail(col, "metric needs two distinct modes")
            stmt = MetricStmt(kind, (i, j), n)
            self.metric_pos.append((stmt, no, col))
            self.metrics.append(stmt)
        elif kw == "expect":
            kind = ln.keyword(("probability", "fidelity"))
            if kind == "probability":
                value, col = ln.number("expected probability")
                tol, tol_col = ln.number("tolerance")
                ln.done()
                if not 0.0 <= value <= 1.0:
                    raise _Fail(col, "expected probability must lie in [0, 1]")
                expect = ExpectStmt("probability", tol, value=value)
            else:
                ln.keyword(("superpose",))
                target, col = _superpose_block(ln)
                tol, tol_col = ln.number("tolerance")
                ln.done()
                self.targets.append((target, no, col))
                expect = ExpectStmt("fidelity", tol, target=target)
            if tol < 0:
                raise _Fail(tol_col, "tolerance must be non-negative")
            self.expects.append(expect)
        else:
            raise _Fail(kw_col, f"unknown statement {kw_text!r}")

    def finish(self, source_lines: int) -> CircuitSpec | None:
        if self.modes is None:
            self.error(max(source_lines, 1), 1, "missing 'modes' statement")
            return None
        n, _, _ = self.modes
        for value, line, col in self.mode_refs:
            if value >= n:
                self.error(line, col, f"mode index out of range: {value} (modes {n})")
        for name, line, col in self.name_refs:
            if name not in self.params:
                self.error(line, col, f"unknown parameter {name!r}")
        for theta, line, col, _ in self.angle_refs:
            value = self.params.get(theta) if isinstance(theta, str) else theta
            if value is not None and not 0.0 <= value <= math.pi / 2:
                self.error(line, col, f"theta must lie in [0, pi/2], got {value!r}")
        seen = {}
        for m, line, col in self.detect_pos:
            if m in seen:
                self.error(line, col, f"duplicate herald mode {m}")
            seen[m] = line
        if self.input is None:
            self.error(max(source_lines, 1), 1, "missing 'input' statement")
            return None
        decl, line, col, cols = self.input
        if isinstance(decl, BasisInput):
            if len(decl.counts) != n:
                at = cols[n] if len(cols) > n else col
                self.error(line, at, f"input lists {len(decl.counts)} modes, expected {n}")
        else:
            self._check_superposition(decl, n, line, col, "input")
        spec_removed = {d.mode for d in self.detects if not d.condition.at_least}
        remaining = n - len(spec_removed)
        for target, line, col in self.targets:
            self._check_superposition(target, remaining, line, col, "fidelity target")
        for stmt, line, col in self.metric_pos:
            if any(m in spec_removed for m in stmt.modes):
                self.error(line, col, "metric refers to a mode removed by an 'exactly' detector")
        if any(d.severity == "error" for d in self.diags):
            return None
        return CircuitSpec(
            mode_count=n,
            input_decl=decl,
            elements=tuple(self.elements),
            detects=tuple(self.detects),
            params=tuple(self.params.items()),
            sweeps=tuple(self.sweeps),
            metrics=tuple(self.metrics),
            expects=tuple(self.expects),
        )

    def _check_superposition(self, decl, width, line, col, what):
        if any(len(occ) != width for occ, _ in decl.terms):
            self.error(line, col, f"{what} terms must have {width} modes")
            return
        total = math.fsum(abs(a) ** 2 for a in superpose(decl.terms).terms.values())
        if abs(total - 1.0) > NORM_TOL:
            self.error(line, col, f"{what} is not normalized (norm^2 = {total:.12g})")


def parse(source: str) -> CircuitSpec | list[ParseDiagnostic]:
    """Parse circuit text; returns a spec, or the diagnostics if anything is wrong."""
    builder = _Builder()
    comments = []
    lines = source.splitlines()
    header = True
    for lineno, raw in enumerate(lines, 1):
        body, _, comment = raw.partition("#")
        if not body.strip():
            if header and comment.strip() and raw.lstrip().startswith("#"):
                comments.append(comment.strip())
            continue
        header = False
        ln = _Line(body, lineno)
        try:
            builder.statement(ln)
        except _Fail as fail:
            builder.error(lineno, fail.column, fail.message)
        except (DomainError, ValueError) as exc:
            builder.error(lineno, ln.col(), str(exc))
    spec = builder.finish(len(lines))
    if spec is None:
        return sorted(builder.diags, key=lambda d: (d.line, d.column))
    return dataclasses.replace(spec, comments=tuple(comments))


def parse_or_raise(source: str) -> CircuitSpec:
    result = parse(source)
    if isinstance(result, list):
        raise DslError(result)
    return result


# --- serialization -------------------------------------------------------------------

def _num(x: float) -> str:
    return format(float(x), ".17g")


def _field(v: Num) -> str:
    return v if isinstance(v, str) else _num(v)


def _superpose_text(decl: SuperposeInput) -> str:
    body = "; ".join(
        f"{','.join(map(str, occ))} : {_num(a.real)} {_num(a.imag)}" for occ, a in decl.terms
    )
    return f"superpose ({body})"


def serialize(spec: CircuitSpec) -> str:
    """Canonical text form: header comments, then statements in a fixed section order."""
    out = [f"# {c}" if c else "#" for c in spec.comments]
    out.append(f"modes {spec.mode_count}")
    out.extend(f"param {name} {_num(value)}" for name, value in spec.params)
    if isinstance(spec.input_decl, BasisInput):
        out.append("input " + " ".join(map(str, spec.input_decl.counts)))
    else:
        out.append("input " + _superpose_text(spec.input_decl))
    for e in spec.elements:
        if isinstance(e, BsStmt):
            out.append(f"bs {_field(e.theta)} {_field(e.phase)} {e.i} {e.j}")
        elif isinstance(e, PsStmt):
            out.append(f"ps {_field(e.phi)} {e.i}")
        else:
            out.append(f"kerr {_field(e.kappa_tau)} {e.i} {e.j}")
    for d in spec.detects:
        kind = "atleast" if d.condition.at_least else "exactly"
        out.append(f"detect {d.mode} {kind} {d.condition.count}")
    for m in spec.metrics:
        head = f"metric noon {m.n}" if m.kind == "noon" else "metric diff"
        out.append(f"{head} {m.modes[0]} {m.modes[1]}")
    for s in spec.sweeps:
        out.append(f"sweep {s.name} {_num(s.start)} {_num(s.stop)} {s.steps}")
    for x in spec.expects:
        if x.kind == "probability":
            out.append(f"expect probability {_num(x.value)} {_num(x.tolerance)}")
        else:
            out.append(f"expect fidelity {_superpose_text(x.target)} {_num(x.tolerance)}")
    return "\n".join(out) + "\n"


# --- lowering and execution --------------------------------------------------------

Stage = Union[ModeUnitary, KerrParams]


@dataclass(frozen=True)
class LoweredCircuit:
    spec: CircuitSpec
    input_state: PureState
    stages: tuple[Stage, ...]
    herald: DetectionPattern
    param_values: Mapping[str, float]


def _resolve(v: Num, values: Mapping[str, float]) -> float:
    return values[v] if isinstance(v, str) else v


def lower(
    spec: CircuitSpec,
    oracle_mode: bool = False,
    overrides: Mapping[str, float] | None = None,
) -> LoweredCircuit:
    """Resolve parameters, build element unitaries and fuse adjacent linear stages."""
    values = spec.param_defaults
    for name, v in (overrides or {}).items():
        if name not in values:
            raise DslError([ParseDiagnostic(1, 1, f"unknown parameter {name!r}")])
        values[name] = float(v)
    diags = []
    stages: list[Stage] = []
    pending: list[ModeUnitary] = []
    n = spec.mode_count
    for e in spec.elements:
        try:
            if isinstance(e, KerrStmt):
                if not oracle_mode:
                    diags.append(ParseDiagnostic(e.line, 1, "nonlinear element outside oracle mode"))
                    continue
                if pending:
                    stages.append(compose_all(pending))
                    pending = []
                stages.append(KerrParams(_resolve(e.kappa_tau, values), e.i, e.j))
                continue
            if isinstance(e, BsStmt):
                elem = BeamSplitterParams(_resolve(e.theta, values), _resolve(e.phase, values), e.i, e.j)
            else:
                elem = PhaseShiftParams(_resolve(e.phi, values), e.i)
            pending.append(element_unitary(elem, n))
        except DomainError as exc:
            diags.append(ParseDiagnostic(e.line, 1, str(exc)))
    if diags:
        raise DslError(diags)
    if pending:
        stages.append(compose_all(pending))
    decl = spec.input_decl
    state = make_basis_state(decl.counts) if isinstance(decl, BasisInput) else decl.state()
    return LoweredCircuit(spec, state, tuple(stages), spec.herald, values)


@dataclass(frozen=True)
class CircuitRun:
    output_state: PureState
    probability: float
    conditional_state: PureState
    metrics: dict[str, float]
    checks: list[Check]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def _metric_value(metric: MetricStmt, state: PureState, positions: Mapping[int, int]) -> float:
    if state.is_zero():
        return math.nan
    i, j = (positions[m] for m in metric.modes)
    if metric.kind == "diff":
        return math.fsum(abs(a) ** 2 * (occ[i] - occ[j]) for occ, a in state)
    total = 0j
    for occ, a in state:
        if occ[i] == metric.n and occ[j] == 0:
            partner = list(occ)
            partner[i], partner[j] = 0, metric.n
            total += a.conjugate() * state[partner]
    return 2.0 * total.real


def execute(circuit: LoweredCircuit, cutoff: int | None = None) -> CircuitRun:
    state = circuit.input_state
    for stage in circuit.stages:
        if isinstance(stage, KerrParams):
            state = apply_kerr(state, stage)
        else:
            state = apply_unitary(state, stage, cutoff)
    res = project(state, circuit.herald)
    spec = circuit.spec
    positions = {m: k for k, m in enumerate(spec.remaining_modes)}
    metrics = {m.name: _metric_value(m, res.conditional_state, positions) for m in spec.metrics}
    checks = []
    for x in spec.expects:
        if x.kind == "probability":
            checks.append(close("probability", res.probability, x.value, x.tolerance))
        else:
            fid = 0.0 if res.conditional_state.is_zero() else fidelity(
                res.conditional_state, x.target.state().normalized())
            checks.append(near_one("fidelity", fid, x.tolerance))
    return CircuitRun(state, res.probability, res.conditional_state, metrics, checks)


def run_source(source: str, oracle_mode: bool = False, cutoff: int | None = None,
               overrides: Mapping[str, float] | None = None) -> CircuitRun:
    return execute(lower(parse_or_raise(source), oracle_mode, overrides), cutoff)


def sweep_rows(
    spec: CircuitSpec,
    name: str,
    values: Sequence[float],
    oracle_mode: bool = False,
    cutoff: int | None = None,
) -> tuple[list[str], list[list[float]]]:
    """Run ``spec`` once per value of parameter ``name``; rows follow ``values`` order."""
    if name not in spec.param_defaults:
        raise DslError([ParseDiagnostic(1, 1, f"unknown parameter {name!r}")])
    header = [name, "probability"] + [m.name for m in spec.metrics]
    rows = []
    for v in values:
        run = execute(lower(spec, oracle_mode, {name: v}), cutoff)
        rows.append([float(v), run.probability] + [run.metrics[m.name] for m in spec.metrics])
    return header, rows

