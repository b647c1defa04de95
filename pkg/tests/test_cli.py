import csv
import json
import subprocess
import sys
from importlib import resources

import jsonschema
import numpy as np
import pytest

from fockbench import cli, corpus, gates

SCHEMA = json.loads(resources.files("fockbench").joinpath("data/report.schema.json").read_text())


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def test_run_hom_json_report(capsys):
    code, out, _ = run_cli(capsys, "run", str(corpus.shipped_path("hom")), "--json")
    assert code == 0
    rep = json.loads(out)
    jsonschema.validate(rep, SCHEMA)
    assert rep["herald_probability"] == pytest.approx(0.5, abs=1e-12)
    assert rep["checks"] and all(c["passed"] for c in rep["checks"])


def test_run_qnd_probability(capsys):
    code, out, _ = run_cli(capsys, "run", str(corpus.shipped_path("qnd")), "--json")
    assert code == 0
    assert json.loads(out)["herald_probability"] == pytest.approx(0.125, abs=1e-12)


def test_run_human_table_and_state(capsys):
    code, out, _ = run_cli(capsys, "run", str(corpus.shipped_path("noon4")), "--dump-state")
    assert code == 0
    assert "herald probability" in out and "conditional state:" in out
    assert "\n4,0 : " in out and "\n0,4 : " in out


def test_run_metrics_are_in_report(capsys):
    code, out, _ = run_cli(capsys, "run", str(corpus.shipped_path("noon_phase")), "--json",
                           "--set", "phi=0.25")
    rep = json.loads(out)
    jsonschema.validate(rep, SCHEMA)
    assert code == 0
    assert rep["metrics"]["noon4_0_1"] == pytest.approx(np.cos(1.0), abs=1e-12)


def test_missing_file(capsys, tmp_path):
    code, _, err = run_cli(capsys, "run", str(tmp_path / "missing.circ"))
    assert code == 2
    assert len(err.strip().splitlines()) == 1


def test_parse_error_exit_2(capsys, tmp_path):
    path = tmp_path / "bad.circ"
    path.write_text("modes 2\ninput 1 1\nbs 0.5 0 0 9\n")
    code, _, err = run_cli(capsys, "run", str(path))
    assert code == 2
    assert ":3:" in err and "out of range" in err


def test_kerr_needs_oracle_flag(capsys, tmp_path):
    path = tmp_path / "kerr.circ"
    path.write_text("modes 2\ninput 1 1\nkerr 3.141592653589793 0 1\n")
    assert run_cli(capsys, "run", str(path))[0] == 2
    assert run_cli(capsys, "run", str(path), "--oracle-mode")[0] == 0


def test_capacity_exit_3(capsys):
    code, _, err = run_cli(capsys, "run", str(corpus.shipped_path("noon4")), "--cutoff", "4")
    assert code == 3
    assert "capacity" in err


def test_env_cutoff(tmp_path):
    env = {"FOCKBENCH_CUTOFF": "4", "PATH": "/usr/bin:/bin"}
    out = subprocess.run([sys.executable, "-m", "fockbench", "run", str(corpus.shipped_path("noon4"))],
                         env=env, capture_output=True, text=True)
    assert out.returncode == 3


def test_failed_check_exit_1(capsys, tmp_path):
    path = tmp_path / "wrong.circ"
    path.write_text(corpus.shipped_path("hom").read_text() + "expect probability 0.3 1e-9\n")
    code, out, _ = run_cli(capsys, "run", str(path), "--json")
    assert code == 1
    assert not all(c["passed"] for c in json.loads(out)["checks"])


def test_bad_usage_exit_2(capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["reproduce", "teleport"])
    assert info.value.code == 2
    assert run_cli(capsys, "run", str(corpus.shipped_path("hom")), "--set", "nonsense")[0] == 2


@pytest.mark.parametrize("figure", ["ns", "csign", "noon4", "yurke", "qnd"])
def test_reproduce_bundles(capsys, figure):
    code, out, _ = run_cli(capsys, "reproduce", figure, "--json")
    rep = json.loads(out)
    jsonschema.validate(rep, SCHEMA)
    assert code == 0
    assert rep["checks"] and all(c["passed"] for c in rep["checks"])


def test_reproduce_expected_checks(capsys):
    _, out, _ = run_cli(capsys, "reproduce", "ns", "--json")
    checks = {c["name"]: c for c in json.loads(out)["checks"]}
    assert checks["success_prob"]["expected"] == 0.25
    assert checks["success_prob"]["tolerance"] == 1e-8
    _, out, _ = run_cli(capsys, "reproduce", "csign", "--json")
    checks = {c["name"]: c for c in json.loads(out)["checks"]}
    assert checks["success_prob"]["expected"] == 0.0625


def test_reproduce_seed_is_deterministic(capsys):
    a = json.loads(run_cli(capsys, "reproduce", "qnd", "--json", "--seed", "7")[1])
    b = json.loads(run_cli(capsys, "reproduce", "qnd", "--json", "--seed", "7")[1])
    assert a["checks"] == b["checks"]


def test_sweep_yurke_r_sq_unimodal(capsys, tmp_path):
    out = tmp_path / "y.csv"
    code, _, _ = run_cli(capsys, "sweep", "yurke", "r_sq", "0.01", "0.5", "50", "--out", str(out), "--n", "10")
    assert code == 0
    header, rows = read_csv(out)
    assert header == ["n", "r_sq", "probability"]
    assert len(rows) == 50
    p = np.array([float(r[2]) for r in rows])
    k = int(np.argmax(p))
    assert 0 < k < 49
    assert (np.diff(p[: k + 1]) > 0).all() and (np.diff(p[k:]) < 0).all()


def test_sweep_yurke_n(capsys, tmp_path):
    out = tmp_path / "n.csv"
    assert run_cli(capsys, "sweep", "yurke", "n", "10", "40", "4", "--out", str(out))[0] == 0
    _, rows = read_csv(out)
    assert [r[0] for r in rows] == ["10", "20", "30", "40"]


def test_sweep_single_step(capsys, tmp_path):
    out = tmp_path / "one.csv"
    assert run_cli(capsys, "sweep", "yurke", "r_sq", "0.2", "0.5", "1", "--out", str(out))[0] == 0
    _, rows = read_csv(out)
    assert len(rows) == 1 and float(rows[0][1]) == 0.2


def test_sweep_noon_phase_file(capsys, tmp_path):
    out = tmp_path / "phi.csv"
    args = ["sweep", str(corpus.shipped_path("noon_phase")), "phi", "0", str(np.pi), "25", "--out", str(out)]
    assert run_cli(capsys, *args)[0] == 0
    header, rows = read_csv(out)
    assert header == ["phi", "probability", "noon4_0_1"]
    for row in rows:
        assert float(row[2]) == pytest.approx(np.cos(4 * float(row[0])), abs=1e-9)
    first = out.read_bytes()
    run_cli(capsys, *args)
    assert out.read_bytes() == first


def test_sweep_unknown_param(capsys, tmp_path):
    out = tmp_path / "x.csv"
    assert run_cli(capsys, "sweep", "yurke", "theta", "0", "1", "3", "--out", str(out))[0] == 2
    assert run_cli(capsys, "sweep", str(corpus.shipped_path("noon_phase")), "theta", "0", "1", "3",
                   "--out", str(out))[0] == 2


def test_sweep_unwritable(capsys, tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert run_cli(capsys, "sweep", "yurke", "r_sq", "0.1", "0.2", "2", "--out", str(blocker / "x.csv"))[0] == 3


@pytest.mark.slow
def test_solve_ns_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    code, out, _ = run_cli(capsys, "solve-ns", "--out", str(a), "--seed", "2024")
    assert code == 0
    assert "herald pattern on ancilla modes" in out
    assert run_cli(capsys, "solve-ns", "--out", str(b), "--seed", "2024")[0] == 0
    assert a.read_bytes() == b.read_bytes()
    packaged = resources.files("fockbench").joinpath("data/ns_params.txt").read_bytes()
    assert a.read_bytes() == packaged
    params = gates.load_ns_params(a)
    assert params == gates.load_ns_params()


def test_solve_ns_unwritable(capsys, tmp_path, monkeypatch):
    # skip the search itself; the write path is what is under test
    monkeypatch.setattr(gates, "solve_ns_gate_params", lambda **_: gates.load_ns_params())
    blocker = tmp_path / "file"
    blocker.write_text("")
    code, _, err = run_cli(capsys, "solve-ns", "--out", str(blocker / "ns.txt"))
    assert code == 3
    assert "I/O error" in err


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "fockbench", "run", str(corpus.shipped_path("hom")), "--json"],
                         capture_output=True, text=True)
    assert out.returncode == 0
    jsonschema.validate(json.loads(out.stdout), SCHEMA)
