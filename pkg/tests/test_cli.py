from __future__ import annotations

import json
import subprocess
import sys

import pytest

from gvforge import __version__
from gvforge.cli import EXIT_ERROR, EXIT_FAIL, EXIT_PASS, main, run_scenario, strip_timing
from gvforge.scenario import SCHEMA_VERSION, ScenarioError, load_scenario, parse_scenario, shipped_scenarios

SMALL = """
name = "small"
description = "tiny vec scenario"
seed = 7
backend = "vec"
field = { p = 3 }
dualizing = "unit"

[objects]
enumerate = true
max_dim = 2

[[battery]]
check = "dualizer"
objects = "enumerated"

[[battery]]
check = "A5"
objects = "enumerated"
max_product = 8
"""

FAILING = SMALL.replace('dualizing = "unit"', 'dualizing = { kind = "space", dim = 2 }')


def _write(tmp_path, text, name="sc.toml"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def test_seven_shipped_scenarios():
    names = set(shipped_scenarios())
    assert names == {
        "vec-r-category", "bimodules-over-dual-numbers", "skew-group-Z2", "truncated-weyl-1-2",
        "svec-local-modules", "quantale-powerset", "roundtrip-2equivalence",
    }


@pytest.mark.parametrize("name", sorted(shipped_scenarios()))
def test_shipped_scenarios_pass(name, capsys):
    assert main(["run", "--scenario", name]) == EXIT_PASS
    assert "verdict: pass" in capsys.readouterr().out


def test_report_schema(tmp_path):
    out = tmp_path / "r.json"
    assert main(["--scenario", _write(tmp_path, SMALL), "--report", str(out)]) == EXIT_PASS
    rep = json.loads(out.read_text())
    assert rep["schema_version"] == SCHEMA_VERSION
    assert rep["version"] == __version__
    assert rep["verdict"] == "pass"
    assert len(rep["scenario_digest"]) == 64
    assert [r["check"] for r in rep["results"]] == ["dualizer", "A5"]
    for r in rep["results"]:
        assert r["cases"] > 0 and r["passed"] and "elapsed_ms" in r["timing"]


def test_report_is_deterministic_modulo_timing(tmp_path):
    sc = load_scenario(_write(tmp_path, SMALL))
    a = run_scenario(sc, seed=3)
    b = run_scenario(sc, seed=3)
    assert strip_timing(a) == strip_timing(b)
    assert json.dumps(strip_timing(a), sort_keys=True) == json.dumps(strip_timing(b), sort_keys=True)


def test_seed_override(tmp_path):
    sc = load_scenario(_write(tmp_path, SMALL))
    assert run_scenario(sc)["seed"] == 7
    assert run_scenario(sc, seed=11)["seed"] == 11


def test_sampling_depends_on_seed(tmp_path):
    text = SMALL.replace("max_product = 8", "max_product = 8\nsample = 3")
    sc = load_scenario(_write(tmp_path, text))
    picks = {json.dumps(run_scenario(sc, seed=s)["results"][1]["cases"]) for s in range(3)}
    assert picks == {"3"}


def test_failing_scenario_exit_code_and_witness(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["run", "--scenario", _write(tmp_path, FAILING), "--report", str(out)]) == EXIT_FAIL
    rep = json.loads(out.read_text())
    assert rep["verdict"] == "fail"
    first = rep["results"][0]
    assert first["check"] == "dualizer" and not first["passed"]
    assert first["failures"][0]["objects"]


def test_fail_fast_stops_early(tmp_path):
    sc = load_scenario(_write(tmp_path, FAILING))
    full = run_scenario(sc)
    fast = run_scenario(sc, fail_fast=True)
    assert len(fast["results"]) == 1 and fast["results"][0]["failed"] == 1
    assert len(full["results"]) == 2


def test_budget_env(tmp_path, monkeypatch):
    monkeypatch.setenv("GVFORGE_BUDGET_MS", "0.000001")
    out = tmp_path / "r.json"
    assert main(["run", "--scenario", _write(tmp_path, SMALL), "--report", str(out)]) == EXIT_FAIL
    rep = json.loads(out.read_text())
    assert any(r["budget_exceeded"] for r in rep["results"])
    assert "budget exceeded" in rep["results"][0]["failures"][0]["message"]


def test_bad_budget_env_is_an_input_error(tmp_path, monkeypatch):
    monkeypatch.setenv("GVFORGE_BUDGET_MS", "soon")
    assert main(["run", "--scenario", _write(tmp_path, SMALL)]) == EXIT_ERROR


def test_max_dim_caps_enumeration(tmp_path):
    sc = load_scenario(_write(tmp_path, SMALL))
    full = run_scenario(sc)
    capped = run_scenario(sc, max_dim=1)
    assert capped["results"][0]["cases"] < full["results"][0]["cases"]


@pytest.mark.parametrize("text", [
    "name = [",                                                    # not TOML
    SMALL.replace("p = 3", "p = 4"),                               # not a prime
    SMALL.replace('backend = "vec"', 'backend = "nope"'),           # unknown backend
    SMALL.replace('check = "A5"', 'check = "A11"'),                 # unknown check
    SMALL.replace('objects = "enumerated"\nmax_product', 'objects = ["ghost"]\nmax_product'),
])
def test_parse_and_resolution_errors_exit_2(tmp_path, text, capsys):
    assert main(["run", "--scenario", _write(tmp_path, text)]) == EXIT_ERROR
    assert "error" in capsys.readouterr().err


def test_missing_scenario_exit_2(capsys):
    assert main(["run", "--scenario", "no-such-scenario"]) == EXIT_ERROR


@pytest.mark.parametrize("argv", [["run", "--scenario", "x", "--seed", "-1"], ["run"], ["bogus"], []])
def test_bad_arguments_exit_2(argv):
    assert main(argv) == EXIT_ERROR


def test_list_checks(capsys):
    assert main(["list_checks"]) == EXIT_PASS
    out = capsys.readouterr().out
    names = [line.split()[0] for line in out.splitlines()]
    for ax in [f"A{i}" for i in range(1, 11)] + ["S1", "S2", "F1", "F2", "H1", "H2", "dualizer", "lifting"]:
        assert ax in names
    assert all(len(line.split(None, 1)) == 2 for line in out.splitlines())


def test_list_scenarios(capsys):
    assert main(["list_scenarios"]) == EXIT_PASS
    assert len(capsys.readouterr().out.splitlines()) == 7


def test_parse_scenario_rejects_bad_parts():
    with pytest.raises(ScenarioError):
        parse_scenario('name = "x"\n[[part]]\nbackend = "vec"\n')
    sc = parse_scenario(SMALL)
    assert sc.name == "small" and len(sc.parts) == 1


def test_mutated_scenario_names_axiom_and_witness(tmp_path):
    text = SMALL.replace('dualizing = "unit"', 'dualizing = "unit"\nmutate = { method = "assoc", seed = 1 }')
    rep = run_scenario(load_scenario(_write(tmp_path, text)))
    a5 = rep["results"][1]
    assert not a5["passed"]
    f = a5["failures"][0]
    assert f["check"] == "A5" and f["objects"] and {"lhs", "rhs"} <= set(f["witness"])


def test_console_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "gvforge.cli", "--scenario", _write(tmp_path, SMALL)],
                         capture_output=True, text=True)
    assert res.returncode == EXIT_PASS
    assert "verdict: pass" in res.stdout
