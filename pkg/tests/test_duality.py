from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gvforge.coherence import LD_BATTERY, MutatedModel, PerturbedLD, all_tuples, arity, check
from gvforge.duality import (
    GVData,
    LDData,
    gv_morphism_check,
    gv_to_ld_to_gv,
    identity_functor,
    identity_is_braided,
    is_frobenius_form,
    ld_internal_hom_check,
    roundtrip_upsilon_C,
    tau_l,
    tau_r,
    verify_lifting,
)
from gvforge.graded import gv_structure, svec, vec
from gvforge.modules import BimoduleCategory, bimodule_gv, enumerate_bimodules, forgetful, truncated_polynomial


def _gv(model: str):
    if model == "vec3":
        C = vec(3)
        return GVData(C, C.unit), C.objects_up_to(2)
    if model == "svec-even":
        C = svec(3)
        return GVData(C, C.unit), C.objects_up_to(2)
    C = svec(3)
    return GVData(C, C.super_space(0, 1)), C.objects_up_to(2)


MODELS = ["vec3", "svec-even", "svec-odd"]


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(MODELS), st.integers(0, 2**32 - 1))
def test_d_is_natural(model, seed):
    gv, objs = _gv(model)
    C = gv.C
    rng = np.random.default_rng(seed)
    X, Y = objs[rng.integers(len(objs))], objs[rng.integers(len(objs))]
    f = C.random_mor(rng, X, Y)
    DDf = gv.Dp_mor(gv.D_mor(f))
    assert C.equal(C.compose(DDf, gv.d(X)), C.compose(gv.d(Y), f))
    DDf2 = gv.D_mor(gv.Dp_mor(f))
    assert C.equal(C.compose(DDf2, gv.d_tilde(X)), C.compose(gv.d_tilde(Y), f))


@pytest.mark.parametrize("model", MODELS)
def test_dualizer_and_par_dimensions(model):
    gv, objs = _gv(model)
    assert gv.verify_dualizer(objs).passed
    for X, Y in itertools.product(objs, repeat=2):
        assert gv.par(X, Y).dim == X.dim * Y.dim


def test_failed_dualizer_reports_a_witness():
    C = vec(2)
    gv = GVData(C, C.vec(2))
    rep = gv.verify_dualizer([C.vec(1)])
    assert not rep.passed
    bad = rep.failures()[0]
    assert bad.witness["object"] == "V1" and "carrier" in bad.witness


@pytest.mark.parametrize("model", MODELS)
def test_ld_internal_hom_matches_ev(model):
    gv, objs = _gv(model)
    for X, Y in itertools.product(objs[1:], repeat=2):
        assert ld_internal_hom_check(gv, X, Y).passed


@pytest.mark.parametrize("model", MODELS)
def test_roundtrip_returns_same_duality(model):
    gv, objs = _gv(model)
    rec = gv_to_ld_to_gv(gv)
    assert rec.K == gv.K
    for X in objs:
        assert rec.D(X) == gv.D(X) and rec.Dp(X) == gv.Dp(X)
    for X, Y in itertools.product(objs, repeat=2):
        assert gv.C.inverse(roundtrip_upsilon_C(gv, X, Y)) is not None


@pytest.mark.parametrize("sign", [1, -1])
def test_identity_is_braided_in_svec(sign):
    gv, objs = _gv("svec-even")
    for X, Y in itertools.product(objs[1:], repeat=2):
        assert identity_is_braided(gv, X, Y, sign).passed


@pytest.mark.parametrize("model", MODELS)
def test_ld_battery_small(model):
    gv, objs = _gv(model)
    ld = LDData(gv)
    objs = objs[1:4]
    for ax in LD_BATTERY:
        for tup in all_tuples(objs, arity(ax), lambda X: X.dim, 8):
            assert check(ax, ld, tup).passed, (ax, tup)


def test_identity_functor_comparators_are_identities():
    gv, objs = _gv("svec-odd")
    F = identity_functor(gv)
    C = gv.C
    for X, Y in itertools.product(objs, repeat=2):
        assert tau_l(F, X, Y).data.is_identity()
        assert tau_r(F, X, Y).data.is_identity()
    assert is_frobenius_form(F, objs).passed
    for tup in itertools.product(objs[1:3], repeat=3):
        assert check("F1", F, tup).passed and check("F2", F, tup).passed


def test_identity_transformation_is_gv_morphism():
    gv, objs = _gv("vec3")
    F = identity_functor(gv)
    assert gv_morphism_check(lambda X: gv.C.identity(X), F, F, objs[:3]).passed


@pytest.fixture(scope="module")
def forgetful_dual_numbers():
    C = vec(2)
    gvb = gv_structure(C)
    R = truncated_polynomial(C, 2, "R")
    B = BimoduleCategory(R)
    gv = bimodule_gv(gvb, B)
    return B, gv, forgetful(gv, gvb), enumerate_bimodules(B, [C.vec(1), C.vec(2)])


def test_forgetful_comparators_are_equalizer_inclusions(forgetful_dual_numbers):
    B, gv, U, mods = forgetful_dual_numbers
    D = U.target.C
    for M, N in itertools.product(mods, repeat=2):
        assert D.equal(tau_l(U, M, N), B.incl(M, N))
        assert D.equal(tau_r(U, M, N), B.rincl(N, M))


def test_wrong_form_is_detected(forgetful_dual_numbers):
    B, gv, U, mods = forgetful_dual_numbers
    assert is_frobenius_form(U, mods + [gv.K]).passed
    D = U.target.C
    zero = D.mor(U.ob(gv.K), D.unit, np.zeros((1, gv.K.dim), dtype=np.int64))
    assert not is_frobenius_form(U, [gv.K], zero).passed
    assert not verify_lifting(U.with_form(zero), [gv.K]).passed


@pytest.mark.parametrize("name,axiom", [("distl", "A5"), ("apar", "A7"), ("eps", "S1")])
def test_perturbed_structure_fails_battery(name, axiom):
    gv, objs = _gv("vec3")
    ld = PerturbedLD(LDData(gv), name, seed=3)
    objs = objs[1:3]
    results = [check(axiom, ld, tup) for tup in all_tuples(objs, arity(axiom))]
    assert not all(r.passed for r in results)


def test_mutated_associator_breaks_pentagon():
    C = MutatedModel(vec(3), "assoc", seed=1)
    X = vec(3).vec(2)
    assert not check("PENT", C, (X, X, X, X)).passed
