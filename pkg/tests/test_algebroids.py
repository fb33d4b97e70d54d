from __future__ import annotations

import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gvforge.algebroids import (
    PresentationError,
    RelationViolated,
    TruncatedPolynomialRing,
    algebroid_gv,
    antipode_check,
    dualizing_module_skew,
    evaluate,
    format_poly,
    forgetful_to_base,
    frobenius_forms,
    lie_rinehart_enveloping,
    module_category_of,
    parse_poly,
    poly_add,
    poly_mul,
    scan_modules,
    skew_antipode_formula,
    skew_element,
    skew_free_module,
    skew_group_algebra,
    standard_module,
    takeuchi_check,
    truncated_weyl,
    word,
)
from gvforge.duality import GVData, verify_lifting
from gvforge.linalg import Matrix


# -- polynomials ----------------------------------------------------------------

def test_parse_simple_relation():
    f = parse_poly("d*x - x d - 1", ["x", "d"], 3)
    assert f == {("d", "x"): 1, ("x", "d"): 2, (): 2}


def test_parse_powers_and_brackets():
    f = parse_poly("(x + 1)^2", ["x"], 5)
    assert f == {("x", "x"): 1, ("x",): 2, (): 1}
    assert parse_poly("x^0", ["x"], 5) == {(): 1}


@pytest.mark.parametrize("bad", ["x +", "y", "x^", "(x", "x ** 2", "2 *"])
def test_parse_errors(bad):
    with pytest.raises(PresentationError):
        parse_poly(bad, ["x"], 3)


words = st.lists(st.sampled_from(["x", "y", "g"]), max_size=3).map(tuple)
polys = st.dictionaries(words, st.integers(1, 4), max_size=4)


@settings(max_examples=100, deadline=None)
@given(polys)
def test_format_then_parse_round_trips(f):
    f = poly_add({}, f, 5)
    assert parse_poly(format_poly(f), ["x", "y", "g"], 5) == f


@settings(max_examples=100, deadline=None)
@given(polys, polys, polys)
def test_poly_mul_associative_and_distributive(f, g, h):
    p = 5
    assert poly_mul(poly_mul(f, g, p), h, p) == poly_mul(f, poly_mul(g, h, p), p)
    assert poly_mul(f, poly_add(g, h, p), p) == poly_add(poly_mul(f, g, p), poly_mul(f, h, p), p)


@settings(max_examples=60, deadline=None)
@given(polys, polys, st.integers(0, 2**32 - 1))
def test_evaluate_is_multiplicative(f, g, seed):
    p, n = 5, 2
    rng = np.random.default_rng(seed)
    mats = {v: Matrix(rng.integers(0, p, size=(n, n)), p) for v in "xyg"}
    lhs = evaluate(poly_mul(f, g, p), mats, n, p)
    assert lhs == evaluate(f, mats, n, p) @ evaluate(g, mats, n, p)


# -- base rings -------------------------------------------------------------------

def test_truncated_ring_basics():
    R = TruncatedPolynomialRing(3, [3, 2], ["x", "y"])
    assert R.dim == 6
    x, y = R.var_matrix("x"), R.var_matrix("y")
    assert x @ y == y @ x
    assert (x @ x @ x).is_zero() and (y @ y).is_zero()
    dx = R.derivation_matrix({"x": R.one()})
    assert R.is_derivation(dx)
    assert not R.is_derivation(Matrix.identity(6, 3))
    top = R.top_form()
    assert top.sum() == 1 and top[R.index[(2, 1)]] == 1


def test_automorphism_check():
    R = TruncatedPolynomialRing(3, [2])
    assert R.is_automorphism(Matrix([[1, 0], [0, 2]], 3))
    assert not R.is_automorphism(Matrix([[1, 1], [0, 1]], 3))


# -- skew group algebras -----------------------------------------------------------

@pytest.fixture(scope="module")
def skew():
    R = TruncatedPolynomialRing(3, [2])
    P, B = skew_group_algebra(R, ["e", "g"], [[0, 1], [1, 0]], {"e": np.eye(2, dtype=int), "g": [[1, 0], [0, 2]]})
    cat = module_category_of(B)
    return R, P, B, cat


def test_skew_relations(skew):
    R, P, B, cat = skew
    assert set(P.generators) == {"x", "g"}
    free = skew_free_module(cat)
    assert free.dim == 4
    assert not cat.relation_problems(free)
    mats = cat.generator_matrices(free)
    g, x = mats["g"], mats["x"]
    assert (g @ g).is_identity()
    assert g @ x == x.scale(-1) @ g


def test_skew_counit_and_antipode_formula(skew):
    R, P, B, cat = skew
    assert np.array_equal(B.counit["g"], R.one())
    free = skew_free_module(cat)  # faithful, so equal actions mean equal elements
    for m in R.monomials:
        r = R.monomial_vector(m)
        for g in ("e", "g"):
            S = B.apply_antipode(skew_element(B, r, g))
            assert cat.poly_matrix(free, S) == cat.poly_matrix(free, skew_antipode_formula(B, r, g))
    # S(x#g) = (g⁻¹▷x)#g⁻¹ = (−x)#g = 2x#g over F_3
    lhs = B.apply_antipode(skew_element(B, R.var_vector("x"), "g"))
    rhs = poly_mul({("x",): 2}, word("g"), 3)
    assert cat.poly_matrix(free, lhs) == cat.poly_matrix(free, rhs)


def test_skew_dualizing_module(skew):
    R, P, B, cat = skew
    K = dualizing_module_skew(cat)
    gv = algebroid_gv(cat)
    U = forgetful_to_base(gv)
    assert verify_lifting(U, [cat.unit, K, skew_free_module(cat)]).passed
    assert takeuchi_check(cat, [cat.unit, K]).passed
    assert antipode_check(cat, [cat.unit, K], 2).passed


def test_trivial_group_gives_the_base_ring():
    R = TruncatedPolynomialRing(2, [2])
    P, B = skew_group_algebra(R, ["e"], [[0]], {"e": np.eye(2, dtype=int)})
    assert B.extra == ()
    assert P.same_presentation(skew_group_algebra(R, ["1"], [[0]], {"1": np.eye(2, dtype=int)})[0])
    cat = module_category_of(B)
    # R-modules of dim 1 over F_2[x]/(x^2): only x = 0
    assert len(scan_modules(cat, 1)) == 1


@pytest.mark.parametrize("table,g_action", [
    ([[0, 1], [1, 1]], [[1, 0], [0, 2]]),   # table has no inverse for g
    ([[0, 1], [1, 0]], [[1, 1], [0, 1]]),   # x ↦ x + 1 is not an algebra automorphism
    ([[0, 1], [1, 0]], [[1, 0], [0, 1]]),   # g acts trivially while g ≠ e: allowed
])
def test_skew_input_validation(table, g_action):
    R = TruncatedPolynomialRing(3, [2])
    action = {"e": np.eye(2, dtype=int), "g": g_action}
    if g_action == [[1, 0], [0, 1]]:
        skew_group_algebra(R, ["e", "g"], table, action)
    else:
        with pytest.raises(PresentationError):
            skew_group_algebra(R, ["e", "g"], table, action)


def test_group_action_must_respect_group_law():
    # Z/3 with g, h = g² both acting by x ↦ −x: then g·g would act trivially, not like h
    R = TruncatedPolynomialRing(3, [2])
    table = [[0, 1, 2], [1, 2, 0], [2, 0, 1]]
    act = {"e": np.eye(2, dtype=int), "g": [[1, 0], [0, 2]], "h": [[1, 0], [0, 2]]}
    with pytest.raises(PresentationError):
        skew_group_algebra(R, ["e", "g", "h"], table, act)


# -- Lie-Rinehart algebras and truncated Weyl algebras -----------------------------

def test_zero_lie_algebra_gives_base_ring():
    R = TruncatedPolynomialRing(2, [2])
    P, B = lie_rinehart_enveloping(R, [], {}, {})
    assert P.relation_polys() == [f for f in R.relations()]
    assert B.has_antipode


def test_weyl_agrees_with_lie_rinehart_presentation():
    R = TruncatedPolynomialRing(2, [2])
    P1, _ = truncated_weyl(1, 2)
    P2, _ = lie_rinehart_enveloping(R, ["d"], {}, {"d": {"x": [1, 0]}})
    assert P1.same_presentation(P2)


@pytest.mark.parametrize("p", [2, 3])
def test_standard_module_commutator(p):
    _, B = truncated_weyl(1, p)
    cat = module_category_of(B)
    R = standard_module(cat)
    mats = cat.generator_matrices(R)
    x, d = mats["x"], mats["d"]
    assert (d @ x - x @ d).is_identity()
    assert cat.lhom(R, R).dim == R.dim
    assert cat.rhom(R, R).dim == R.dim
    RR = cat.tensor(R, R)
    assert RR.dim == R.dim and cat.inverse(cat.lunitor(R)) is not None


@pytest.mark.parametrize("p,dims", [(2, [1]), (3, [1, 2])])
def test_no_small_weyl_modules(p, dims):
    # the trace of [d, x] = 1 is dim M, which vanishes mod p only when p | dim M
    _, B = truncated_weyl(1, p)
    cat = module_category_of(B)
    for n in dims:
        assert scan_modules(cat, n) == []


def test_weyl_dim_two_modules_exist():
    _, B = truncated_weyl(1, 2)
    mods = scan_modules(module_category_of(B), 2)
    assert mods and all(M.dim == 2 for M in mods)


@pytest.mark.parametrize("n,p", [(1, 2), (1, 3), (2, 2)])
def test_weyl_frobenius_forms_are_top_degree(n, p):
    _, B = truncated_weyl(n, p)
    cat = module_category_of(B)
    top = tuple(int(v) for v in B.base.top_form())
    assert sorted(frobenius_forms(cat)) == sorted(tuple(c * v % p for v in top) for c in range(1, p))


def test_weyl_dualizer_with_both_candidates():
    _, B = truncated_weyl(1, 2)
    cat = module_category_of(B)
    R = cat.unit
    objs = [R, cat.tensor(R, R), cat.lhom(R, R)]
    assert GVData(cat, R).verify_dualizer(objs).passed
    assert algebroid_gv(cat).verify_dualizer(objs).passed


def test_wrong_antipode_is_detected():
    _, B = truncated_weyl(1, 3)
    cat = module_category_of(B)
    R = cat.unit
    assert antipode_check(cat, [R], 2).passed
    S = dict(B.antipode)
    S["d"] = word("d")
    bad = dataclasses.replace(B, antipode=S, antipode_inv=S)
    bad_cat = module_category_of(bad)
    assert not antipode_check(bad_cat, [bad_cat.unit], 2).passed


def test_lie_rinehart_validation():
    # on F_3[x]/(x^2), D(x) = 1 forces D(x^2) = 2x ≠ 0
    with pytest.raises(PresentationError):
        lie_rinehart_enveloping(TruncatedPolynomialRing(3, [2]), ["d"], {}, {"d": {"x": [1, 0]}})
    R = TruncatedPolynomialRing(3, [3])
    with pytest.raises(PresentationError):
        lie_rinehart_enveloping(R, ["a", "b"], {("a", "b"): {"a": [1, 0, 0]}, ("b", "a"): {"a": [1, 0, 0]}}, {})
    with pytest.raises(PresentationError):
        # [a, b] = a needs ω(a) = [ω(a), ω(b)], false when ω(a) = ∂ and ω(b) = 0
        lie_rinehart_enveloping(R, ["a", "b"], {("a", "b"): {"a": [1, 0, 0]}}, {"a": {"x": [1, 0, 0]}})


def test_antipode_absent_when_obstructed():
    # [a, b] = x·a with ω(a) = ∂ and ω(b) = (x²/2)∂, so that [ω(a), ω(b)] = x∂;
    # then Σ ω(k)(c_ab^k) = ∂(x) = 1 ≠ 0
    R = TruncatedPolynomialRing(3, [3])
    _, B = lie_rinehart_enveloping(R, ["a", "b"], {("a", "b"): {"a": [0, 1, 0]}},
                                   {"a": {"x": [1, 0, 0]}, "b": {"x": [0, 0, 2]}})
    assert not B.has_antipode


def test_invalid_module_rejected():
    _, B = truncated_weyl(1, 2)
    cat = module_category_of(B)
    with pytest.raises((RelationViolated, ValueError)):
        cat.module({"x": Matrix([[0]], 2), "d": Matrix([[0]], 2)})
