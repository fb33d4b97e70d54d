"""Acceptance criteria, one test per criterion.

Each test records its verdict; the pytest terminal summary prints one
PASS/FAIL line per criterion.  Running this file directly prints the same
lines without pytest.
"""
from __future__ import annotations

import dataclasses
import itertools
import time

import numpy as np
import pytest

from gvforge.algebroids import (
    algebroid_gv,
    dualizing_module_skew,
    forgetful_to_base,
    frobenius_forms,
    module_category_of,
    skew_free_module,
    skew_group_algebra,
    standard_module,
    TruncatedPolynomialRing,
    truncated_weyl,
)
from gvforge.cli import run_scenario
from gvforge.coherence import LD_BATTERY, all_tuples, arity, check
from gvforge.duality import (
    GVData,
    LDData,
    gv_to_ld_to_gv,
    identity_is_braided,
    is_frobenius_form,
    roundtrip_upsilon_C,
    tau_l,
    verify_lifting,
)
from gvforge.graded import gv_structure, svec, vec
from gvforge.kernel import gamma, seq
from gvforge.linalg import Matrix
from gvforge.modules import (
    BimoduleCategory,
    LocalModuleCategory,
    bimodule_gv,
    dual_actions,
    enumerate_bimodules,
    enumerate_left_modules,
    exterior_algebra,
    forgetful,
    is_local,
    truncated_polynomial,
)
from gvforge.scenario import load_scenario, resolve_scenario_path
from gvforge import suplat as sl


def _all_pass(reports) -> tuple[bool, str]:
    bad = [r for r in reports if not r.passed]
    if not bad:
        return True, f"{len(reports)} checks"
    first = bad[0]
    return False, f"{len(bad)}/{len(reports)} failing, first {first.check} on {', '.join(first.objects)}"


# -- criterion 1 ----------------------------------------------------------------

def criterion_1() -> tuple[bool, str]:
    details = []
    ok_all = True
    for p in (2, 3):
        t0 = time.perf_counter()
        C = vec(p)
        ld = LDData(GVData(C, C.unit))
        objs = [C.vec(n) for n in range(4)]
        reps = []
        for ax in LD_BATTERY:
            for tup in all_tuples(objs, arity(ax), lambda X: X.dim, 16):
                reps.append(check(ax, ld, tup))
        elapsed = time.perf_counter() - t0
        ok, msg = _all_pass(reps)
        ok = ok and elapsed < 10
        ok_all &= ok
        details.append(f"p={p}: {msg} in {elapsed:.2f}s")
    return ok_all, "; ".join(details)


# -- criteria 2 and 3 -----------------------------------------------------------------

def _dual_numbers():
    C = vec(2)
    gvb = gv_structure(C)
    R = truncated_polynomial(C, 2, "R")
    B = BimoduleCategory(R)
    gv = bimodule_gv(gvb, B)
    return C, gvb, R, B, gv


def criterion_2() -> tuple[bool, str]:
    t0 = time.perf_counter()
    C, gvb, R, B, gv = _dual_numbers()
    zero_action = Matrix([[1, 0]], 2)          # 1 acts as identity, x as zero
    k = B.bimodule(C.vec(1), zero_action, zero_action, "k")
    objs = [B.unit, gv.K, k, B.free(C.vec(1), "R⊗R")]
    rep = gv.verify_dualizer(objs)
    ok = rep.passed and all(B.inverse(gv.d(X)) is not None and B.inverse(gv.d_tilde(X)) is not None
                            for X in objs)
    elapsed = time.perf_counter() - t0
    return ok and elapsed < 10, f"{len(rep.details)} maps on {len(objs)} bimodules in {elapsed:.2f}s"


def criterion_3() -> tuple[bool, str]:
    C, gvb, R, B, gv = _dual_numbers()
    U = forgetful(gv, gvb)
    form = seq(C, gamma(C, gvb.K), gvb.Dp_mor(R.eta))
    if U.upsilon0 is None or not C.equal(U.upsilon0, form):
        return False, "the forgetful functor does not carry the form γ_K∘D'(η)"
    mods = enumerate_bimodules(B, [C.vec(1), C.vec(2)])
    frob = is_frobenius_form(U, mods + [B.unit, gv.K])
    reps = []
    for tup in itertools.product(mods, repeat=3):
        reps.append(check("F1", U, tup))
        reps.append(check("F2", U, tup))
    ok_f, msg = _all_pass(reps)
    exact = all(tau_l(U, M, N).data == B.incl(M, N).data for M, N in itertools.product(mods, repeat=2))
    return frob.passed and ok_f and exact, f"Frobenius form ok={frob.passed}; F1/F2 {msg}; τ^l = i exact={exact}"


# -- criterion 4 --------------------------------------------------------------------

def _skew_category():
    R = TruncatedPolynomialRing(3, [2])
    _, B = skew_group_algebra(R, ["e", "g"], [[0, 1], [1, 0]],
                              {"e": np.eye(2, dtype=int), "g": [[1, 0], [0, 2]]})
    return module_category_of(B)


def criterion_4() -> tuple[bool, str]:
    t0 = time.perf_counter()
    cat = _skew_category()
    K = dualizing_module_skew(cat)              # raises unless R* matches f(g⁻¹▷(x·−))
    gv = algebroid_gv(cat, K)
    objs = [cat.unit, K, skew_free_module(cat)]
    lift = verify_lifting(forgetful_to_base(gv), objs)
    ld = LDData(gv)
    snakes = [check(ax, ld, (X,)) for ax in ("S1", "S2") for X in objs]
    ok_s, msg = _all_pass(snakes)
    elapsed = time.perf_counter() - t0
    return lift.passed and ok_s and elapsed < 15, f"lifting ok={lift.passed}; snakes {msg}; {elapsed:.2f}s"


# -- criterion 5 ------------------------------------------------------------------

def criterion_5() -> tuple[bool, str]:
    P, B = truncated_weyl(1, 2)
    cat = module_category_of(B)
    R = standard_module(cat)
    mats = cat.generator_matrices(R)
    shapes_ok = all(m.shape == (2, 2) and m.p == 2 for m in mats.values())
    rel_ok = not P.failing_relations(mats) and not cat.relation_problems(R)
    objs = [R, cat.tensor(R, R), cat.lhom(R, R)]
    dual = GVData(cat, R).verify_dualizer(objs)
    top = tuple(int(v) for v in B.base.top_form())
    forms = frobenius_forms(cat)
    ok = shapes_ok and rel_ok and dual.passed and forms == [top]
    return ok, f"relations ok={rel_ok}; dualizer ok={dual.passed}; forms {forms} vs top {top}"


# -- criterion 6 -----------------------------------------------------------------

def criterion_6() -> tuple[bool, str]:
    C = svec(3)
    gvb = gv_structure(C)
    A = exterior_algebra(C)
    comm = A.is_commutative(1)
    lp, _ = dual_actions(gvb, A)
    local = is_local(A, (gvb.Dp(A.A), lp))
    L = LocalModuleCategory(A)
    gv = bimodule_gv(gvb, L)
    dual = gv.verify_dualizer([L.unit, gv.K])
    mods = enumerate_left_modules(L, C.objects_up_to(2, 1), local_only=True)
    ld = LDData(gv)
    reps = [check(ax, ld, tup, sign=s) for ax in ("H1", "H2") for s in (1, -1)
            for tup in itertools.product(mods, repeat=3)]
    ok_h, msg = _all_pass(reps)
    return comm and local and dual.passed and ok_h, \
        f"commutative={comm}; D'(A) local={local}; dualizer ok={dual.passed}; H1/H2 {msg}"


# -- criterion 7 ---------------------------------------------------------------------

def criterion_7() -> tuple[bool, str]:
    C = vec(2)
    gv = GVData(C, C.unit)
    rec = gv_to_ld_to_gv(gv)
    objs = [C.vec(n) for n in range(3)]
    same = rec.K == gv.K and all(rec.D(X) == gv.D(X) and rec.Dp(X) == gv.Dp(X) for X in objs)
    ups = all(C.inverse(roundtrip_upsilon_C(gv, X, Y)) is not None for X, Y in itertools.product(objs, repeat=2))
    S = svec(3)
    sgv = GVData(S, S.unit)
    sobjs = S.objects_up_to(2)
    braided = [identity_is_braided(sgv, X, Y, s) for s in (1, -1) for X, Y in itertools.product(sobjs, repeat=2)]
    ok_b, msg = _all_pass(braided)
    return same and ups and ok_b, f"round trip identical={same}; υ^C invertible={ups}; braided {msg}"


# -- criterion 8 ------------------------------------------------------------------------

def criterion_8() -> tuple[bool, str]:
    C = sl.SupLat()
    Q = sl.powerset_quantale(C, [0, 1], lambda a, b: (a + b) % 2, 0, "P(Z/2)")
    cat = sl.quantale_bimodule_category(Q)
    gv = bimodule_gv(GVData(C, C.unit), cat)
    f = sl.duality_map(C, Q.A)
    is_qop = f.target == gv.K.space and sl.is_order_iso(f)
    mods = sl.enumerate_quantale_bimodules(cat, 5)
    dual = gv.verify_dualizer(mods)
    op = sl.op_dual(Q.A)
    invol = sl.reverses_order(Q.A, op) and sl.op_dual(op) == Q.A and sl.reverses_order(op, Q.A)
    return is_qop and dual.passed and invol, \
        f"K ≅ Q^op={is_qop}; dualizer on {len(mods)} bimodules ok={dual.passed}; involution={invol}"


# -- criterion 9 ------------------------------------------------------------------------

MUTATIONS = [
    # (criterion, shipped scenario, structure method, part overrides)
    (1, "vec-r-category", "assoc", {}),
    (1, "vec-r-category", "lunitor", {"field": {"p": 3}}),
    (2, "bimodules-over-dual-numbers", "assoc", {}),
    (3, "bimodules-over-dual-numbers", "tensor_mor", {}),
    (4, "skew-group-Z2", "lunitor", {}),
]


def _mutated_report(scenario: str, method: str, overrides: dict) -> dict:
    sc = load_scenario(resolve_scenario_path(scenario))
    parts = [dict(part, mutate={"method": method, "seed": 1}, **overrides) for part in sc.parts]
    return run_scenario(dataclasses.replace(sc, parts=parts))


def _witnessed_failure(report: dict):
    axioms = {f"A{i}" for i in range(1, 11)} | {"S1", "S2", "PENT", "TRI", "F1", "F2"}
    for r in report["results"]:
        for f in r["failures"]:
            base = f["check"].split("[")[0]
            if base in axioms and f["objects"] and {"lhs", "rhs"} <= set(f.get("witness", {})):
                return r["check"], f
    return None


def criterion_9() -> tuple[bool, str]:
    details = []
    ok_all = True
    for n, scenario, method, overrides in MUTATIONS:
        baseline = run_scenario(dataclasses.replace(
            load_scenario(resolve_scenario_path(scenario)),
            parts=[dict(part, **overrides) for part in load_scenario(resolve_scenario_path(scenario)).parts]))
        rep = _mutated_report(scenario, method, overrides)
        hit = _witnessed_failure(rep)
        ok = baseline["verdict"] == "pass" and rep["verdict"] == "fail" and hit is not None
        ok_all &= ok
        where = f"{hit[1]['check']} on {', '.join(hit[1]['objects'])}" if hit else "no witnessed axiom failure"
        details.append(f"[{n}] {method}: {where}")
    return ok_all, "; ".join(details)


CRITERIA = {i: globals()[f"criterion_{i}"] for i in range(1, 10)}


@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_criterion(n, acceptance_record):
    ok, detail = CRITERIA[n]()
    acceptance_record(n, ok, detail)
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'}  ({detail})")
    assert ok, detail


if __name__ == "__main__":
    for n, fn in CRITERIA.items():
        ok, detail = fn()
        print(f"criterion {n}: {'PASS' if ok else 'FAIL'}  ({detail})")
