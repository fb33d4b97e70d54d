"""Command line runner for scenario files.

    gvforge run --scenario vec-r-category [--seed N] [--report out.json]
                [--max-dim N] [--fail-fast]
    gvforge list_checks
    gvforge list_scenarios

Exit codes: 0 all checks pass, 1 some check fails, 2 the scenario does not
parse or does not resolve.  ``GVFORGE_BUDGET_MS`` caps the wall time of each
individual case; a case over budget is reported as failed.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from typing import Any

import numpy as np

from . import __version__
from .checks import CATALOGUE, expand, list_checks
from .reports import CheckReport
from .scenario import (
    SCHEMA_VERSION,
    ResolutionError,
    Scenario,
    ScenarioError,
    build_context,
    load_scenario,
    resolve_scenario_path,
    shipped_scenarios,
)

MAX_FAILURES_REPORTED = 5

EXIT_PASS, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


def _budget_ms() -> float | None:
    raw = os.environ.get("GVFORGE_BUDGET_MS")
    if not raw:
        return None
    try:
        val = float(raw)
    except ValueError:
        raise ScenarioError(f"GVFORGE_BUDGET_MS must be a number, got {raw!r}") from None
    return val if val > 0 else None


def _leaf_failures(rep: CheckReport) -> list[dict]:
    out = []
    # a report failed only by the budget has passing details
    for f in rep.failures() or [rep]:
        d = {"check": f.check, "objects": list(f.objects)}
        if f.message:
            d["message"] = f.message
        if f.witness:
            d["witness"] = f.witness
        out.append(d)
    return out


def _guarded(cases, name: str):
    """Turn an exception raised while computing a case into a failed case."""
    it = iter(cases)
    while True:
        try:
            rep = next(it)
        except StopIteration:
            return
        except (ResolutionError, ScenarioError):
            raise
        except (ArithmeticError, RuntimeError, ValueError) as exc:
            yield CheckReport(name, (), False, f"not computable: {type(exc).__name__}: {exc}")
            return
        yield rep


def run_scenario(sc: Scenario, seed: int | None = None, max_dim: int | None = None,
                 fail_fast: bool = False, budget_ms: float | None = None) -> dict[str, Any]:
    """Execute every battery entry in declaration order and assemble the report.

    Raises :class:`ScenarioError` or :class:`ResolutionError` for input
    problems; check failures are recorded in the report.
    """
    seed = sc.seed if seed is None else seed
    results: list[dict] = []
    t_start = time.perf_counter()
    stop = False
    for k, part in enumerate(sc.parts):
        if stop:
            break
        ctx = build_context(part, k, max_dim)
        specs = []
        for spec in part["battery"]:
            specs.extend(expand(spec))
        for j, spec in enumerate(specs):
            entry = CATALOGUE[spec["check"]]
            rng = np.random.default_rng([seed, k, j])
            t_spec = time.perf_counter()
            cases = failed = 0
            failures: list[dict] = []
            over_budget = False
            t_case = time.perf_counter()
            for rep in _guarded(entry.run(ctx, spec, rng), spec["check"]):
                elapsed = (time.perf_counter() - t_case) * 1000
                cases += 1
                if budget_ms is not None and elapsed > budget_ms:
                    rep.passed = False
                    rep.message = (rep.message + "; " if rep.message else "") + "budget exceeded"
                    over_budget = True
                if not rep.passed:
                    failed += 1
                    if len(failures) < MAX_FAILURES_REPORTED:
                        failures.extend(_leaf_failures(rep)[:MAX_FAILURES_REPORTED - len(failures)])
                    if fail_fast:
                        break
                t_case = time.perf_counter()
            opts = {key: v for key, v in spec.items() if key != "check"}
            results.append({
                "part": ctx.part,
                "check": spec["check"],
                "options": opts,
                "cases": cases,
                "failed": failed,
                "passed": failed == 0 and cases > 0,
                "failures": failures,
                "budget_exceeded": over_budget,
                "timing": {"elapsed_ms": round((time.perf_counter() - t_spec) * 1000, 3)},
            })
            if cases == 0:
                results[-1]["failures"] = [{"check": spec["check"], "objects": [],
                                            "message": "no cases selected"}]
            if fail_fast and not results[-1]["passed"]:
                stop = True
                break
    verdict = "pass" if results and all(r["passed"] for r in results) else "fail"
    return {
        "schema_version": SCHEMA_VERSION,
        "version": __version__,
        "scenario": sc.name,
        "scenario_digest": sc.digest,
        "seed": seed,
        "results": results,
        "verdict": verdict,
        "timing": {"total_ms": round((time.perf_counter() - t_start) * 1000, 3)},
    }


def strip_timing(report: dict) -> dict:
    """The report without its timing fields (for determinism comparisons)."""
    out = {k: v for k, v in report.items() if k != "timing"}
    out["results"] = [{k: v for k, v in r.items() if k != "timing"} for r in report["results"]]
    return out


def _summary_line(r: dict) -> str:
    status = "PASS" if r["passed"] else "FAIL"
    opts = ""
    if r["options"]:
        opts = " " + " ".join(f"{k}={v}" for k, v in sorted(r["options"].items()))
    line = f"[{status}] {r['part']}: {r['check']}{opts} ({r['cases']} cases)"
    for f in r["failures"][:1]:
        line += f" first failure: {f['check']} on {', '.join(f['objects']) or '-'}"
        if f.get("message"):
            line += f" ({f['message']})"
    return line


def _cmd_run(args) -> int:
    try:
        path = resolve_scenario_path(args.scenario)
        sc = load_scenario(path)
        report = run_scenario(sc, args.seed, args.max_dim, args.fail_fast, _budget_ms())
    except (ScenarioError, ResolutionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    for r in report["results"]:
        print(_summary_line(r))
    print(f"verdict: {report['verdict']}")
    text = json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False)
    if args.report == "-":
        print(text)
    elif args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    return EXIT_PASS if report["verdict"] == "pass" else EXIT_FAIL


def _cmd_list_checks(args) -> int:
    rows = list_checks()
    width = max(len(n) for n, _ in rows)
    for name, desc in rows:
        print(f"{name.ljust(width)}  {desc}")
    return EXIT_PASS


def _cmd_list_scenarios(args) -> int:
    for name, path in shipped_scenarios().items():
        try:
            desc = load_scenario(path).description
        except ScenarioError as exc:
            desc = f"(unreadable: {exc})"
        print(f"{name}: {desc}")
    return EXIT_PASS


def _seed(text: str) -> int:
    val = int(text)
    if not 0 <= val < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return val


def _positive(text: str) -> int:
    val = int(text)
    if val < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return val


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gvforge", description="Run duality and coherence checks from scenario files.")
    parser.add_argument("--version", action="version", version=f"gvforge {__version__}")
    sub = parser.add_subparsers(dest="command")
    run = sub.add_parser("run", help="run a scenario")
    run.add_argument("--scenario", required=True, help="scenario file, or the name of a shipped scenario")
    run.add_argument("--seed", type=_seed, default=None, help="override the scenario seed")
    run.add_argument("--report", default=None, help="write the JSON report here ('-' for stdout)")
    run.add_argument("--max-dim", type=_positive, default=None, help="cap on enumerated object sizes")
    run.add_argument("--fail-fast", action="store_true", help="stop at the first failing case")
    run.set_defaults(func=_cmd_run)
    lc = sub.add_parser("list_checks", help="list check keywords")
    lc.set_defaults(func=_cmd_list_checks)
    ls = sub.add_parser("list_scenarios", help="list shipped scenarios")
    ls.set_defaults(func=_cmd_list_scenarios)
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and argv[0].startswith("--scenario"):
        argv.insert(0, "run")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_PASS
    if not getattr(args, "command", None):
        parser.print_help()
        return EXIT_ERROR
    return args.func(args)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
