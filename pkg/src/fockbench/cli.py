"""``fockbench`` command line: run circuit files, reproduce checks, sweep, solve NS constants.

Exit codes: 0 success, 1 failed checks, 2 input or parse errors,
3 environment, I/O or capacity errors.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import json
import math
import sys
import time
from pathlib import Path
from typing import Sequence

from . import dsl, gates, schemes
from .checks import Check, close
from .errors import CapacityError, DomainError, SearchFailure
from .fock import format_state, photon_cutoff, superpose
from .reproduce import BUNDLES, DEFAULT_SEED

EXIT_OK, EXIT_FAILED, EXIT_INPUT, EXIT_ENV = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)


def _report(spec_path, probability, state_text, checks: Sequence[Check], started, metrics=None) -> dict:
    rep = {
        "spec_path": str(spec_path),
        "herald_probability": min(max(float(probability), 0.0), 1.0),
        "conditional_state": state_text,
        "checks": [c.to_dict() for c in checks],
        "wall_time_ms": (time.perf_counter() - started) * 1e3,
    }
    if metrics:
        rep["metrics"] = {k: (None if math.isnan(v) else v) for k, v in metrics.items()}
    return rep


def _emit(rep: dict, as_json: bool, dump_state: bool) -> None:
    if as_json:
        json.dump(rep, sys.stdout, indent=2)
        sys.stdout.write("\n")
        return
    print(f"{rep['spec_path']}")
    print(f"  herald probability  {rep['herald_probability']:.17g}")
    for name, value in rep.get("metrics", {}).items():
        print(f"  {name:<20}{'nan' if value is None else format(value, '.17g')}")
    for c in rep["checks"]:
        print("  " + Check(**c).line())
    print(f"  wall time           {rep['wall_time_ms']:.1f} ms")
    if dump_state:
        print("conditional state:")
        sys.stdout.write(rep["conditional_state"] or "(zero)\n")


def _cutoff_scope(value):
    return photon_cutoff(value) if value is not None else contextlib.nullcontext()


def _parse_sets(items) -> dict[str, float]:
    out = {}
    for item in items or ():
        name, sep, value = item.partition("=")
        if not sep:
            raise DomainError(f"--set expects NAME=VALUE, got {item!r}")
        out[name.strip()] = float(value)
    return out


def _load_spec(path: str) -> dsl.CircuitSpec:
    try:
        source = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise dsl.DslError([dsl.ParseDiagnostic(0, 0, f"cannot read {path}: {exc.strerror or exc}")])
    return dsl.parse_or_raise(source)


def cmd_run(args) -> int:
    started = time.perf_counter()
    spec = _load_spec(args.spec)
    with _cutoff_scope(args.cutoff):
        circuit = dsl.lower(spec, args.oracle_mode, _parse_sets(args.set))
        run = dsl.execute(circuit, args.cutoff)
    rep = _report(args.spec, run.probability, format_state(run.conditional_state),
                  run.checks, started, run.metrics)
    _emit(rep, args.json, args.dump_state)
    return EXIT_OK if run.passed else EXIT_FAILED


def cmd_reproduce(args) -> int:
    started = time.perf_counter()
    with _cutoff_scope(args.cutoff):
        bundle = BUNDLES[args.figure](args.seed)
    rep = _report(f"reproduce:{bundle.name}", bundle.herald_probability,
                  format_state(bundle.conditional_state), bundle.checks, started)
    _emit(rep, args.json, args.dump_state)
    return EXIT_OK if bundle.passed else EXIT_FAILED


BUILTIN_SWEEPS = {"yurke": ("r_sq", "n")}


def _fmt(v: float) -> str:
    return "nan" if math.isnan(v) else format(v, ".17g")


def _builtin_yurke(args, values):
    rows = []
    if args.param == "r_sq":
        for r in values:
            rows.append([args.n, r, schemes.yurke_success_probability(args.n, r)])
    else:
        for v in values:
            if abs(v - round(v)) > 1e-9:
                raise DomainError(f"n must be an integer, got {v!r}")
            n = int(round(v))
            r = args.r_sq if args.r_sq is not None else 1.0 / n
            rows.append([n, r, schemes.yurke_success_probability(n, r)])
    return ["n", "r_sq", "probability"], rows


def cmd_sweep(args) -> int:
    values = dsl.sweep_values(args.start, args.stop, args.steps)
    if args.spec in BUILTIN_SWEEPS:
        if args.param not in BUILTIN_SWEEPS[args.spec]:
            raise DomainError(f"unknown parameter {args.param!r} for {args.spec}; "
                              f"choose from {', '.join(BUILTIN_SWEEPS[args.spec])}")
        header, rows = _builtin_yurke(args, values)
    else:
        spec = _load_spec(args.spec)
        with _cutoff_scope(args.cutoff):
            header, rows = dsl.sweep_rows(spec, args.param, values, args.oracle_mode, args.cutoff)
    out = Path(args.out)
    with out.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([v if isinstance(v, int) else _fmt(v) for v in row])
    print(f"wrote {len(rows)} rows to {out}")
    return EXIT_OK


def _ns_verification(params: gates.NsGateParams) -> list[Check]:
    probs, fids = [], []
    for amps in ((1, 0, 0), (0, 1, 0), (0, 0, 1), (0.6, 0.48 + 0.36j, math.sqrt(0.28))):
        rep = gates.ns_gate_apply(superpose([((n,), a) for n, a in enumerate(amps)]), params)
        probs.append(rep.success_probability)
        fids.append(rep.fidelity_vs_target)
    worst = max(probs, key=lambda p: abs(p - 0.25))
    return [close("success_prob", worst, 0.25, 1e-8), close("sign_flip_fidelity", min(fids), 1.0, 1e-8)]


def cmd_solve_ns(args) -> int:
    try:
        params = gates.solve_ns_gate_params(seed=args.seed, max_restarts=args.max_restarts)
    except SearchFailure as exc:
        print(f"search failed: {exc}", file=sys.stderr)
        if exc.best is not None:
            print("best found:\n" + exc.best.to_text(), file=sys.stderr)
        return EXIT_FAILED
    checks = _ns_verification(params)
    for c in checks:
        print(c.line())
    if not all(c.passed for c in checks):
        return EXIT_FAILED
    Path(args.out).write_text(params.to_text(), encoding="utf-8")
    print(f"herald pattern on ancilla modes: {params.herald[0]} {params.herald[1]}")
    print(f"wrote {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fockbench", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def output_flags(sp):
        sp.add_argument("--json", action="store_true", help="print a JSON report")
        sp.add_argument("--dump-state", action="store_true", help="print the conditional state")
        sp.add_argument("--cutoff", type=int, help="photon-number cutoff (default 12 or $FOCKBENCH_CUTOFF)")

    run = sub.add_parser("run", help="simulate a .circ file")
    run.add_argument("spec")
    output_flags(run)
    run.add_argument("--oracle-mode", action="store_true", help="allow cross-Kerr elements")
    run.add_argument("--set", action="append", metavar="NAME=VALUE", help="override a parameter")
    run.set_defaults(func=cmd_run)

    rep = sub.add_parser("reproduce", help="run a built-in check bundle")
    rep.add_argument("figure", choices=sorted(BUNDLES))
    rep.add_argument("--seed", type=int, default=DEFAULT_SEED)
    output_flags(rep)
    rep.set_defaults(func=cmd_reproduce)

    sw = sub.add_parser("sweep", help="scan one parameter and write CSV")
    sw.add_argument("spec", help="a .circ file, or 'yurke' for the closed-form generator")
    sw.add_argument("param")
    sw.add_argument("start", type=float)
    sw.add_argument("stop", type=float)
    sw.add_argument("steps", type=int)
    sw.add_argument("--out", required=True)
    sw.add_argument("--n", type=int, default=10, help="photons per arm for 'yurke r_sq' sweeps")
    sw.add_argument("--r-sq", type=float, help="fixed reflectivity for 'yurke n' sweeps (default 1/n)")
    sw.add_argument("--oracle-mode", action="store_true")
    sw.add_argument("--cutoff", type=int)
    sw.set_defaults(func=cmd_sweep)

    ns = sub.add_parser("solve-ns", help="search NS gate constants and write them to a file")
    ns.add_argument("--out", required=True)
    ns.add_argument("--seed", type=int, default=2024)
    ns.add_argument("--max-restarts", type=int, default=64)
    ns.set_defaults(func=cmd_solve_ns)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except dsl.DslError as exc:
        for d in exc.diagnostics:
            print(f"{getattr(args, 'spec', '')}:{d}", file=sys.stderr)
        return EXIT_INPUT
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_ENV
    except DomainError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_ENV


if __name__ == "__main__":
    sys.exit(main())
