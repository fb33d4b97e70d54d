"""Catalogue of scenario checks.

Each entry maps a keyword to a one-line description and a runner that yields
one :class:`CheckReport` per case, so the CLI can time and budget cases
individually.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Iterator

import numpy as np

from .coherence import CATALOGUE as AXIOM_DESCRIPTIONS
from .coherence import LD_BATTERY, all_tuples, arity, check
from .duality import (
    gv_to_ld_to_gv,
    identity_is_braided,
    is_frobenius_form,
    roundtrip_upsilon_C,
    tau_l,
    tau_r,
    verify_lifting,
)
from .reports import CheckReport
from .scenario import Context, ResolutionError, size_of


@dataclass(frozen=True)
class CheckEntry:
    name: str
    description: str
    run: Callable[[Context, dict, np.random.Generator], Iterable[CheckReport]]


_AXIOMS = ("A1", "A2", "A3", "A4", "A5", "A6", "A7", "A8", "A9", "A10", "S1", "S2",
           "PENT", "TRI", "H1", "H2", "HEX1", "HEX2", "F1", "F2")
AXIOM_TEXT = {ax: AXIOM_DESCRIPTIONS[ax] for ax in _AXIOMS}


def _objects(ctx: Context, spec: dict) -> list:
    objs = ctx.select(spec.get("objects"))
    md = spec.get("max_dim")
    if md is not None:
        objs = [X for X in objs if size_of(X) <= int(md)]
    return objs


def _tuples(ctx: Context, spec: dict, k: int, rng: np.random.Generator) -> list[tuple]:
    objs = _objects(ctx, spec)
    mp = spec.get("max_product")
    tups = all_tuples(objs, k, size_of, int(mp) if mp is not None else None)
    sample = spec.get("sample")
    if sample is not None and int(sample) < len(tups):
        idx = sorted(rng.choice(len(tups), size=int(sample), replace=False).tolist())
        tups = [tups[i] for i in idx]
    return tups


def _axiom_runner(ax: str):
    def run(ctx: Context, spec: dict, rng) -> Iterator[CheckReport]:
        opts = {}
        if ax in ("F1", "F2"):
            if ctx.functor is None:
                raise ResolutionError(f"{ctx.part}: {ax} needs a functor (declare a dualizing object D'(A))")
            data = ctx.functor
        else:
            data = ctx.ld
        if "sign" in spec:
            opts["sign"] = int(spec["sign"])
        for tup in _tuples(ctx, spec, arity(ax), rng):
            yield check(ax, data, tup, **opts)
    return run


def _per_object(name: str, fn):
    def run(ctx: Context, spec: dict, rng) -> Iterator[CheckReport]:
        for X in _objects(ctx, spec):
            rep = fn(ctx, X)
            if not rep.objects:
                rep.objects = (ctx.describe(X),)
            yield rep
    return run


def _need_functor(ctx: Context):
    if ctx.functor is None:
        raise ResolutionError(f"{ctx.part}: this check needs the forgetful functor")
    return ctx.functor


def _dualizer(ctx, X):
    return ctx.gv.verify_dualizer([X])


def _lifting(ctx, X):
    return verify_lifting(_need_functor(ctx), [X])


def _frobenius_form(ctx, X):
    return is_frobenius_form(_need_functor(ctx), [X])


def _comparator(ctx: Context, spec: dict, rng) -> Iterator[CheckReport]:
    F = _need_functor(ctx)
    cat = ctx.extras.get("category")
    if cat is None or not hasattr(cat, "incl"):
        raise ResolutionError(f"{ctx.part}: comparator check needs a module category")
    D = F.target.C
    for M, N in _tuples(ctx, spec, 2, rng):
        ok_l = D.equal(tau_l(F, M, N), cat.incl(M, N))
        ok_r = D.equal(tau_r(F, M, N), cat.rincl(N, M))
        yield CheckReport("comparator", (ctx.describe(M), ctx.describe(N)), ok_l and ok_r,
                          "" if ok_l and ok_r else f"left {'ok' if ok_l else 'differs'}, right {'ok' if ok_r else 'differs'}")


def _roundtrip(ctx: Context, spec: dict, rng) -> Iterator[CheckReport]:
    gv = ctx.gv
    rec = gv_to_ld_to_gv(gv)
    yield CheckReport("roundtrip:K", (), rec.K == gv.K)
    for X in _objects(ctx, spec):
        ok = rec.D(X) == gv.D(X) and rec.Dp(X) == gv.Dp(X)
        yield CheckReport("roundtrip:D", (ctx.describe(X),), ok)


def _roundtrip_upsilon(ctx: Context, spec: dict, rng) -> Iterator[CheckReport]:
    C = ctx.gv.C
    for X, Y in _tuples(ctx, spec, 2, rng):
        ok = C.inverse(roundtrip_upsilon_C(ctx.gv, X, Y)) is not None
        yield CheckReport("roundtrip-upsilon", (ctx.describe(X), ctx.describe(Y)), ok)


def _identity_braided(ctx: Context, spec: dict, rng) -> Iterator[CheckReport]:
    sign = int(spec.get("sign", 1))
    for X, Y in _tuples(ctx, spec, 2, rng):
        yield identity_is_braided(ctx.gv, X, Y, sign)


def _commutative(ctx: Context, spec: dict, rng) -> Iterator[CheckReport]:
    alg = ctx.extras.get("algebra")
    if alg is None:
        raise ResolutionError(f"{ctx.part}: no algebra declared")
    yield CheckReport("commutative", (alg.name,), alg.is_commutative(int(spec.get("sign", 1))))


def _dual_local(ctx: Context, spec: dict, rng) -> Iterator[CheckReport]:
    from .modules import is_local

    alg = ctx.extras.get("algebra")
    if alg is None:
        raise ResolutionError(f"{ctx.part}: no algebra declared")
    yield CheckReport("dual-local", ("K",), is_local(alg, ctx.gv.K))


def _algebroid_cat(ctx: Context):
    cat = ctx.extras.get("category")
    if ctx.backend != "algebroid":
        raise ResolutionError(f"{ctx.part}: check needs the algebroid backend")
    return cat


def _relations(ctx, X):
    bad = _algebroid_cat(ctx).relation_problems(X)
    return CheckReport("relations", (), not bad, "; ".join(bad))


def _antipode(ctx: Context, spec: dict, rng) -> Iterator[CheckReport]:
    from .algebroids import antipode_check

    cat = _algebroid_cat(ctx)
    yield from antipode_check(cat, _objects(ctx, spec), int(spec.get("degree", 1))).details


def _takeuchi(ctx: Context, spec: dict, rng) -> Iterator[CheckReport]:
    from .algebroids import takeuchi_check

    cat = _algebroid_cat(ctx)
    yield from takeuchi_check(cat, _objects(ctx, spec), int(spec.get("degree", 2))).details


def _skew_dual(ctx: Context, spec: dict, rng) -> Iterator[CheckReport]:
    from .algebroids import RelationViolated, dualizing_module_skew

    cat = _algebroid_cat(ctx)
    if not cat.B.info.get("elements"):
        raise ResolutionError(f"{ctx.part}: not a skew group algebra")
    try:
        dualizing_module_skew(cat)
        yield CheckReport("skew-dual-formula", ("R*",), True)
    except RelationViolated as exc:
        yield CheckReport("skew-dual-formula", ("R*",), False, str(exc))


def _frobenius_top(ctx: Context, spec: dict, rng) -> Iterator[CheckReport]:
    from .algebroids import frobenius_forms

    cat = _algebroid_cat(ctx)
    forms = frobenius_forms(cat)
    top = tuple(int(v) for v in cat.R.top_form())
    p = cat.p
    expected = sorted(tuple(c * v % p for v in top) for c in range(1, p))
    yield CheckReport("frobenius-top", ("R",), sorted(forms) == expected,
                      f"forms found: {forms}", {"forms": [list(f) for f in forms], "top": list(top)})


def _no_modules(ctx: Context, spec: dict, rng) -> Iterator[CheckReport]:
    from .algebroids import scan_modules

    cat = _algebroid_cat(ctx)
    dim = int(spec.get("dim", 1))
    found = scan_modules(cat, dim)
    yield CheckReport("no-modules", (f"dim {dim}",), not found, f"{len(found)} modules pass validation")


def _order_reversal(ctx: Context, spec: dict, rng) -> Iterator[CheckReport]:
    from . import suplat as sl

    Q = ctx.extras.get("quantale")
    if Q is None:
        raise ResolutionError(f"{ctx.part}: check needs a quantale")
    C = ctx.extras["base"]
    f = sl.duality_map(C, Q.A)
    yield CheckReport("order-reversal:iso", ("Q^op", "K"),
                      sl.is_order_iso(f) and f.target == ctx.gv.K.space)
    op = sl.op_dual(Q.A)
    yield CheckReport("order-reversal:involution", ("Q",),
                      sl.reverses_order(Q.A, op) and sl.op_dual(op) == Q.A)


CATALOGUE: dict[str, CheckEntry] = {}


def _register(name: str, description: str, run):
    CATALOGUE[name] = CheckEntry(name, description, run)


for _ax, _text in AXIOM_TEXT.items():
    _register(_ax, _text, _axiom_runner(_ax))
_register("ld-battery", "expands to " + ", ".join(LD_BATTERY), None)
_register("dualizer", "d and d̃ are invertible on each object", _per_object("dualizer", _dualizer))
_register("lifting", "lifting-theorem mechanism through the declared forgetful functor",
          _per_object("lifting", _lifting))
_register("frobenius-form", "duality transformations of the forgetful functor are invertible",
          _per_object("frobenius-form", _frobenius_form))
_register("comparator", "internal-hom comparators of the forgetful functor equal the equalizer inclusions",
          _comparator)
_register("roundtrip", "GV → LDN → GV returns the same dualizing object and duality functors", _roundtrip)
_register("roundtrip-upsilon", "the round-trip comparison υ^C is invertible", _roundtrip_upsilon)
_register("identity-braided", "the identity functor is braided for the reconstructed ⅋-product",
          _identity_braided)
_register("commutative", "the declared algebra is commutative for the chosen braiding", _commutative)
_register("dual-local", "the dualizing module D'(A) is local", _dual_local)
_register("relations", "all defining relations vanish on each module", _per_object("relations", _relations))
_register("antipode", "antipode identities on sampled words, on modules and tensor products", _antipode)
_register("takeuchi", "Δ of sampled words descends to tensor products over the base", _takeuchi)
_register("skew-dual-formula", "R* action matches f ↦ f(g⁻¹▷(x·−)) for all monomials and group elements",
          _skew_dual)
_register("frobenius-top", "exactly the multiples of the top-monomial coefficient give module isos R → R*",
          _frobenius_top)
_register("no-modules", "no module of the given dimension passes validation", _no_modules)
_register("order-reversal", "D'(Q) is Q with the order reversed, and reversal is an involution",
          _order_reversal)


def expand(spec: dict) -> list[dict]:
    """Replace composite keywords by their members."""
    name = spec["check"]
    if name == "ld-battery":
        return [dict(spec, check=ax) for ax in LD_BATTERY]
    if name not in CATALOGUE:
        raise ResolutionError(f"unknown check {name!r}")
    return [spec]


def list_checks() -> list[tuple[str, str]]:
    return [(e.name, e.description) for e in CATALOGUE.values()]
