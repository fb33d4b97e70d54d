"""Grothendieck–Verdier and linearly distributive structure on a closed model.

Given a closed monoidal model ``C`` and a candidate dualizing object ``K`` this
module computes the double-dualization maps d, d̃, the derived ⅋-product with
its associator, unitors and distributors, LD-duals, braiding lifts, comparators
and duality transformations of lax monoidal functors, Frobenius
comultiplications, and the lifting-theorem verifier.

D = K⟜−  and  D' = −⊸K.  The identifications D'D ≅ id and DD' ≅ id are never
made silently: every use goes through the computed d⁻¹ or d̃⁻¹.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Any, Callable, Iterable

from .kernel import (
    rtranspose,
    transpose,
    ModelCategory,
    Morphism,
    StructureMissing,
    beta,
    beta_bar,
    braid,
    gamma,
    gamma_bar,
    inv,
    iota,
    lh,
    rh,
    rtranspose,
    seq,
    t,
    transpose,
    unit_e,
)
from .reports import CheckReport, combine


class FrobeniusFormRequired(ArithmeticError):
    pass


def _memo(fn):
    """Per-instance cache keyed by positional arguments (objects are hashable)."""
    name = fn.__name__

    def wrapper(self, *args):
        key = (name,) + args
        cache = self._cache
        try:
            return cache[key]
        except KeyError:
            pass
        val = fn(self, *args)
        with self._lock:
            cache.setdefault(key, val)
        return cache[key]

    wrapper.__name__ = name
    wrapper.__doc__ = fn.__doc__
    return wrapper


def _carrier(C: ModelCategory, f: Morphism | None):
    return None if f is None else C.carrier(f)


class GVData:
    """A closed model together with a dualizing candidate K."""

    def __init__(self, C: ModelCategory, K):
        self.C = C
        self.K = K
        self._cache: dict = {}
        self._lock = threading.Lock()

    # -- dualities -------------------------------------------------------
    def D(self, X):
        return self.C.rhom(self.K, X)

    def Dp(self, X):
        return self.C.lhom(X, self.K)

    def D_mor(self, f: Morphism) -> Morphism:
        return rh(self.C, self.K, f)

    def Dp_mor(self, f: Morphism) -> Morphism:
        return lh(self.C, f, self.K)

    @_memo
    def d(self, X) -> Morphism:
        """X → D'D(X), double transpose of id_{DX}."""
        C = self.C
        DX = self.D(X)
        return transpose(C, DX, X, C.rev(X, self.K))

    @_memo
    def d_tilde(self, X) -> Morphism:
        """X → DD'(X), double transpose of id_{D'X}."""
        C = self.C
        DpX = self.Dp(X)
        return rtranspose(C, DpX, X, C.ev(X, self.K))

    @_memo
    def d_inv(self, X) -> Morphism:
        return inv(self.C, self.d(X))

    @_memo
    def d_tilde_inv(self, X) -> Morphism:
        return inv(self.C, self.d_tilde(X))

    def verify_dualizer(self, testset: Iterable) -> CheckReport:
        """Pass iff d_X and d̃_X are invertible for every X in the test set."""
        C = self.C
        reps = []
        for X in testset:
            for label, f in (("d", self.d(X)), ("d_tilde", self.d_tilde(X))):
                ok = C.inverse(f) is not None
                w = {} if ok else {"object": C.describe(X), "map": label, "carrier": _carrier(C, f)}
                reps.append(CheckReport(f"dualizer:{label}", (C.describe(X),), ok,
                                        "" if ok else f"{label} is not invertible", w))
        return combine("verify_dualizer", reps)

    # -- the ⅋-product ---------------------------------------------------
    def par(self, X, Y):
        """X⅋Y = D(D'Y ⊗ D'X)."""
        return self.D(self.C.tensor(self.Dp(Y), self.Dp(X)))

    def par_mor(self, f, g) -> Morphism:
        C = self.C
        from .kernel import as_mor
        f, g = as_mor(C, f), as_mor(C, g)
        return self.D_mor(t(C, self.Dp_mor(g), self.Dp_mor(f)))

    @_memo
    def par_assoc(self, X, Y, Z) -> Morphism:
        """X⅋(Y⅋Z) → (X⅋Y)⅋Z, conjugate of α_{D'Z,D'Y,D'X}."""
        C = self.C
        DZ, DY, DX = self.Dp(Z), self.Dp(Y), self.Dp(X)
        phi = seq(C,
                  t(C, self.d(C.tensor(DZ, DY)), DX),
                  C.assoc(DZ, DY, DX),
                  t(C, DZ, self.d_inv(C.tensor(DY, DX))))
        return self.D_mor(phi)

    @_memo
    def par_assoc_inv(self, X, Y, Z) -> Morphism:
        return inv(self.C, self.par_assoc(X, Y, Z))

    @_memo
    def j(self) -> Morphism:
        """1 → D'K."""
        C = self.C
        return seq(C, inv(C, self.Dp_mor(gamma_bar(C, self.K))), self.d(C.unit))

    @_memo
    def par_lunitor(self, X) -> Morphism:
        """K⅋X → X."""
        C = self.C
        DX = self.Dp(X)
        return seq(C, self.d_tilde_inv(X),
                   self.D_mor(seq(C, t(C, DX, self.j()), C.runitor_inv(DX))))

    @_memo
    def par_runitor(self, X) -> Morphism:
        """X⅋K → X."""
        C = self.C
        DX = self.Dp(X)
        return seq(C, self.d_tilde_inv(X),
                   self.D_mor(seq(C, t(C, self.j(), DX), C.lunitor_inv(DX))))

    @_memo
    def par_lunitor_inv(self, X) -> Morphism:
        return inv(self.C, self.par_lunitor(X))

    @_memo
    def par_runitor_inv(self, X) -> Morphism:
        return inv(self.C, self.par_runitor(X))

    # -- identifications with internal homs ------------------------------
    @_memo
    def rid(self, X, Y) -> Morphism:
        """X⅋Y → X⟜D'Y."""
        C = self.C
        DY, DX = self.Dp(Y), self.Dp(X)
        return seq(C, rh(C, self.d_tilde_inv(X), DY), beta_bar(C, DY, DX, self.K))

    @_memo
    def rid_inv(self, X, Y) -> Morphism:
        return inv(self.C, self.rid(X, Y))

    @_memo
    def lid(self, X, Y) -> Morphism:
        """X⅋Y → DX⊸Y."""
        C = self.C
        DX, DpY = self.D(X), self.Dp(Y)
        return seq(C,
                   lh(C, DX, self.d_tilde_inv(Y)),
                   iota(C, DX, self.K, DpY),
                   rh(C, self.d(X), DpY),
                   self.rid(X, Y))

    @_memo
    def lid_inv(self, X, Y) -> Morphism:
        return inv(self.C, self.lid(X, Y))

    # -- distributors ----------------------------------------------------
    @_memo
    def distl_tilde(self, X, Y, Z) -> Morphism:
        """X⊗(Y⟜Z) → (X⊗Y)⟜Z."""
        C = self.C
        YZ = C.rhom(Y, Z)
        W = C.tensor(X, YZ)
        return rtranspose(C, Z, W, seq(C, t(C, X, C.rev(Z, Y)), C.assoc_inv(X, YZ, Z)))

    @_memo
    def distr_tilde(self, X, Y, Z) -> Morphism:
        """(X⊸Y)⊗Z → X⊸(Y⊗Z)."""
        C = self.C
        XY = C.lhom(X, Y)
        W = C.tensor(XY, Z)
        return transpose(C, X, W, seq(C, t(C, C.ev(X, Y), Z), C.assoc(X, XY, Z)))

    @_memo
    def distl(self, X, Y, Z) -> Morphism:
        """X⊗(Y⅋Z) → (X⊗Y)⅋Z."""
        C = self.C
        return seq(C,
                   self.rid_inv(C.tensor(X, Y), Z),
                   self.distl_tilde(X, Y, self.Dp(Z)),
                   t(C, X, self.rid(Y, Z)))

    @_memo
    def distr(self, X, Y, Z) -> Morphism:
        """(X⅋Y)⊗Z → X⅋(Y⊗Z)."""
        C = self.C
        return seq(C,
                   self.lid_inv(X, C.tensor(Y, Z)),
                   self.distr_tilde(self.D(X), Y, Z),
                   t(C, self.lid(X, Y), Z))

    # -- LD duals --------------------------------------------------------
    def rdual(self, X):
        return self.Dp(X)

    def ldual(self, X):
        return self.D(X)

    def eps(self, X) -> Morphism:
        """X ⊗ D'X → K."""
        return self.C.ev(X, self.K)

    @_memo
    def eta(self, X) -> Morphism:
        """1 → D'X ⅋ X."""
        C = self.C
        Y = self.Dp(X)
        e_bar = rtranspose(C, Y, C.unit, C.lunitor(Y))
        return seq(C, self.rid_inv(Y, X), e_bar)

    @_memo
    def eta_via_lid(self, X) -> Morphism:
        """Second route to η^X through lid and the internal unit."""
        C = self.C
        Y = self.Dp(X)
        e = unit_e(C, self.D(Y))                               # 1 → DD'X ⊸ DD'X
        e = seq(C, lh(C, self.D(Y), self.d_tilde_inv(X)), e)   # 1 → DD'X ⊸ X
        return seq(C, self.lid_inv(Y, X), e)

    def eps_l(self, X) -> Morphism:
        """DX ⊗ X → K."""
        return self.C.rev(X, self.K)

    @_memo
    def eta_l(self, X) -> Morphism:
        """1 → X ⅋ DX."""
        C = self.C
        return seq(C, self.lid_inv(X, self.D(X)), unit_e(C, self.D(X)))

    def ld_duals(self, X) -> dict[str, Any]:
        return {"right_dual": self.rdual(X), "eps": self.eps(X), "eta": self.eta(X),
                "left_dual": self.ldual(X), "eps_l": self.eps_l(X), "eta_l": self.eta_l(X)}

    # -- braidings -------------------------------------------------------
    def _need_braiding(self):
        if not getattr(self.C, "braided", False):
            raise StructureMissing("model has no braiding")

    @_memo
    def cbar(self, X, Y, sign: int = 1) -> Morphism:
        """⅋-braiding X⅋Y → Y⅋X, D(c^±_{D'X,D'Y})."""
        self._need_braiding()
        return self.D_mor(braid(self.C, self.Dp(X), self.Dp(Y), sign))

    @_memo
    def cbar_inv(self, X, Y, sign: int = 1) -> Morphism:
        return inv(self.C, self.cbar(X, Y, sign))

    @_memo
    def c_tilde(self, X, Y, sign: int = 1) -> Morphism:
        """X⊸Y → Y⟜X."""
        self._need_braiding()
        C = self.C
        XY = C.lhom(X, Y)
        return rtranspose(C, X, XY, seq(C, C.ev(X, Y), braid(C, XY, X, sign)))

    def phi_pm(self, X, sign: int = 1) -> Morphism:
        """D'X → DX."""
        return self.c_tilde(X, self.K, sign)

    # -- pivotal structures ----------------------------------------------
    def pivotal_check(self, pi: Callable[[Any], Morphism], testset: Iterable) -> CheckReport:
        """PIV1 on pairs from the test set, PIV2 and PIV3 once."""
        C, K = self.C, self.K
        reps = []
        objs = list(testset)
        for X in objs:
            for Y in objs:
                lhs = seq(C, beta(C, X, Y, K), pi(C.tensor(X, Y)))
                rhs = seq(C, lh(C, Y, pi(X)), iota(C, Y, K, X), rh(C, pi(Y), X), beta_bar(C, X, Y, K))
                reps.append(_eq_report(C, "PIV1", (X, Y), lhs, rhs))
        one = C.unit
        reps.append(_eq_report(C, "PIV2", (), seq(C, gamma(C, K), pi(one)), gamma_bar(C, K)))
        lhs = seq(C, inv(C, self.Dp_mor(gamma_bar(C, K))), self.d(one))
        rhs = seq(C, pi(K), inv(C, self.D_mor(gamma(C, K))), self.d_tilde(one))
        reps.append(_eq_report(C, "PIV3", (), lhs, rhs))
        return combine("pivotal", reps)


def _eq_report(C: ModelCategory, name: str, objs: tuple, lhs: Morphism, rhs: Morphism) -> CheckReport:
    labels = tuple(C.describe(o) for o in objs)
    if lhs.source != rhs.source or lhs.target != rhs.target:
        return CheckReport(name, labels, False, "endpoint mismatch between the two sides",
                           {"lhs_endpoints": [C.describe(lhs.source), C.describe(lhs.target)],
                            "rhs_endpoints": [C.describe(rhs.source), C.describe(rhs.target)]})
    ok = C.equal(lhs, rhs)
    w = {} if ok else {"lhs": C.carrier(lhs), "rhs": C.carrier(rhs)}
    return CheckReport(name, labels, ok, "" if ok else "sides differ", w)


def eq_report(C, name, objs, lhs, rhs) -> CheckReport:
    return _eq_report(C, name, objs, lhs, rhs)


class LDData:
    """The linearly distributive structure derived from verified GV data."""

    def __init__(self, gv: GVData):
        self.gv = gv
        self.C = gv.C
        self.K = gv.K

    @property
    def unit(self):
        return self.C.unit

    @property
    def par_unit(self):
        return self.K

    def tensor(self, X, Y):
        return self.C.tensor(X, Y)

    def par(self, X, Y):
        return self.gv.par(X, Y)

    def tensor_mor(self, f, g):
        return t(self.C, f, g)

    def par_mor(self, f, g):
        return self.gv.par_mor(f, g)

    def rdual(self, X):
        return self.gv.rdual(X)

    def ldual(self, X):
        return self.gv.ldual(X)

    def structure(self, name: str, *objs) -> Morphism:
        C, gv = self.C, self.gv
        table: dict[str, Callable[..., Morphism]] = {
            "alpha": C.assoc, "alpha_inv": C.assoc_inv,
            "lam": C.lunitor, "lam_inv": C.lunitor_inv,
            "rho": C.runitor, "rho_inv": C.runitor_inv,
            "apar": gv.par_assoc, "apar_inv": gv.par_assoc_inv,
            "lampar": gv.par_lunitor, "lampar_inv": gv.par_lunitor_inv,
            "rhopar": gv.par_runitor, "rhopar_inv": gv.par_runitor_inv,
            "distl": gv.distl, "distr": gv.distr,
            "eps": gv.eps, "eta": gv.eta, "eps_l": gv.eps_l, "eta_l": gv.eta_l,
            "c": lambda X, Y: braid(C, X, Y, 1), "c_minus": lambda X, Y: braid(C, X, Y, -1),
            "cbar": lambda X, Y: gv.cbar(X, Y, 1), "cbar_inv": lambda X, Y: gv.cbar_inv(X, Y, 1),
            "cbar_minus": lambda X, Y: gv.cbar(X, Y, -1),
            "cbar_minus_inv": lambda X, Y: gv.cbar_inv(X, Y, -1),
        }
        if name not in table:
            raise KeyError(f"unknown structure morphism {name!r}")
        return table[name](*objs)


def ld_from_gv(gv: GVData) -> LDData:
    return LDData(gv)


# ---------------------------------------------------------------------------
# functors


@dataclass
class FunctorData:
    """A lax monoidal functor F: C → D between closed models.

    ``phi2(X, Y)``: F(X)⊗F(Y) → F(X⊗Y);  ``phi0``: 1 → F(1);
    ``upsilon0``: F(K) → k, optional Frobenius form.
    """

    source: GVData
    target: GVData
    ob: Callable[[Any], Any]
    mor: Callable[[Morphism], Morphism]
    phi2: Callable[[Any, Any], Morphism]
    phi0: Morphism
    upsilon0: Morphism | None = None
    conservative: bool = False
    name: str = "F"

    def with_form(self, upsilon0: Morphism | None) -> "FunctorData":
        return FunctorData(self.source, self.target, self.ob, self.mor, self.phi2, self.phi0,
                           upsilon0, self.conservative, self.name)


def identity_functor(gv: GVData) -> FunctorData:
    C = gv.C
    return FunctorData(gv, gv, lambda X: X, lambda f: f,
                       lambda X, Y: C.identity(C.tensor(X, Y)), C.identity(C.unit),
                       C.identity(gv.K), True, "id")


def tau_l(F: FunctorData, X, Y) -> Morphism:
    """F(X⊸Y) → FX⊸FY."""
    C, D = F.source.C, F.target.C
    FX = F.ob(X)
    XY = C.lhom(X, Y)
    h = seq(D, F.mor(C.ev(X, Y)), F.phi2(X, XY))
    return transpose(D, FX, F.ob(XY), h)


def tau_r(F: FunctorData, X, Y) -> Morphism:
    """F(Y⟜X) → FY⟜FX."""
    C, D = F.source.C, F.target.C
    FX = F.ob(X)
    YX = C.rhom(Y, X)
    h = seq(D, F.mor(C.rev(X, Y)), F.phi2(YX, X))
    return rtranspose(D, FX, F.ob(YX), h)


def comparators(F: FunctorData, X, Y) -> tuple[Morphism, Morphism]:
    return tau_l(F, X, Y), tau_r(F, X, Y)


def _form(F: FunctorData, upsilon0: Morphism | None) -> Morphism:
    u = F.upsilon0 if upsilon0 is None else upsilon0
    if u is None:
        raise FrobeniusFormRequired(f"functor {F.name} has no Frobenius form")
    return u


def xi_l(F: FunctorData, X, upsilon0: Morphism | None = None) -> Morphism:
    """F(X⊸K) → FX⊸k."""
    D = F.target.C
    u = _form(F, upsilon0)
    return seq(D, lh(D, F.ob(X), u), tau_l(F, X, F.source.K))


def xi_r(F: FunctorData, X, upsilon0: Morphism | None = None) -> Morphism:
    """F(K⟜X) → k⟜FX."""
    D = F.target.C
    u = _form(F, upsilon0)
    return seq(D, rh(D, u, F.ob(X)), tau_r(F, X, F.source.K))


def duality_transformations(F: FunctorData, X, upsilon0: Morphism | None = None):
    return xi_l(F, X, upsilon0), xi_r(F, X, upsilon0)


def is_frobenius_form(F: FunctorData, testset: Iterable, upsilon0: Morphism | None = None) -> CheckReport:
    D = F.target.C
    reps = []
    for X in testset:
        for label, f in (("xi_l", xi_l(F, X, upsilon0)), ("xi_r", xi_r(F, X, upsilon0))):
            ok = D.inverse(f) is not None
            reps.append(CheckReport(f"frobenius:{label}", (F.source.C.describe(X),), ok,
                                    "" if ok else f"{label} is not invertible",
                                    {} if ok else {"carrier": D.carrier(f)}))
    return combine("is_frobenius_form", reps)


def derive_ld_comultiplication(F: FunctorData, X, Y, upsilon0: Morphism | None = None) -> Morphism:
    """υ²_{X,Y}: F(X⅋Y) → FX⅋FY."""
    src, tgt = F.source, F.target
    C, D = src.C, tgt.C
    DpX, DpY = src.Dp(X), src.Dp(Y)
    xl_X = D.inverse(xi_l(F, X, upsilon0))
    xl_Y = D.inverse(xi_l(F, Y, upsilon0))
    if xl_X is None or xl_Y is None:
        raise FrobeniusFormRequired("ξ^l is not invertible on the requested objects")
    return seq(D,
               tgt.D_mor(t(D, xl_Y, xl_X)),
               tgt.D_mor(F.phi2(DpY, DpX)),
               xi_r(F, C.tensor(DpY, DpX), upsilon0))


def frobenius_relations(F: FunctorData, X, Y, Z, upsilon0: Morphism | None = None,
                        phi2: Callable | None = None) -> tuple[CheckReport, CheckReport]:
    """F1 and F2 for the derived υ²."""
    src, tgt = F.source, F.target
    C, D = src.C, tgt.C
    p2 = phi2 or F.phi2
    FX, FY, FZ = F.ob(X), F.ob(Y), F.ob(Z)
    u2 = lambda A, B: derive_ld_comultiplication(F, A, B, upsilon0)  # noqa: E731
    lhs1 = seq(D, u2(C.tensor(X, Y), Z), F.mor(src.distl(X, Y, Z)), p2(X, src.par(Y, Z)))
    rhs1 = seq(D, tgt.par_mor(p2(X, Y), FZ), tgt.distl(FX, FY, FZ), t(D, FX, u2(Y, Z)))
    lhs2 = seq(D, u2(X, C.tensor(Y, Z)), F.mor(src.distr(X, Y, Z)), p2(src.par(X, Y), Z))
    rhs2 = seq(D, tgt.par_mor(FX, p2(Y, Z)), tgt.distr(FX, FY, FZ), t(D, u2(X, Y), FZ))
    objs = (X, Y, Z)
    return _eq_report(C, "F1", objs, lhs1, rhs1), _eq_report(C, "F2", objs, lhs2, rhs2)


def verify_lifting(U: FunctorData, testset: Iterable, upsilon0: Morphism | None = None) -> CheckReport:
    """Dualizer check in the source plus the mechanism behind it.

    For each X: d_X and d̃_X are invertible, and U(d̃_X), U(d_X) coincide with
    the composites through the duality transformations and the double duals of
    U(X) in the target.
    """
    src, tgt = U.source, U.target
    C, D = src.C, tgt.C
    k = tgt.K
    reps = []
    if not U.conservative:
        reps.append(CheckReport("lifting:conservative", (), False, "functor not declared conservative"))
    for X in testset:
        label = (C.describe(X),)
        dual = src.verify_dualizer([X])
        reps.append(CheckReport("lifting:dualizer", label, dual.passed, dual.message,
                                details=dual.details))
        UX = U.ob(X)
        # d̃ route
        xr = xi_r(U, src.Dp(X), upsilon0)
        xl = xi_l(U, X, upsilon0)
        xr_inv = D.inverse(xr)
        if xr_inv is None:
            reps.append(CheckReport("lifting:mechanism_d_tilde", label, False,
                                    "ξ^r is not invertible", {"xi_r": D.carrier(xr)}))
        else:
            bottom = seq(D, xr_inv, rh(D, k, xl), tgt.d_tilde(UX))
            reps.append(_eq_report(D, "lifting:mechanism_d_tilde", (X,), U.mor(src.d_tilde(X)), bottom))
        # d route
        xl2 = xi_l(U, src.D(X), upsilon0)
        xr2 = xi_r(U, X, upsilon0)
        xl2_inv = D.inverse(xl2)
        if xl2_inv is None:
            reps.append(CheckReport("lifting:mechanism_d", label, False,
                                    "ξ^l is not invertible", {"xi_l": D.carrier(xl2)}))
        else:
            bottom = seq(D, xl2_inv, lh(D, xr2, k), tgt.d(UX))
            reps.append(_eq_report(D, "lifting:mechanism_d", (X,), U.mor(src.d(X)), bottom))
    return combine("verify_lifting", reps)


def gv_morphism_check(f: Callable[[Any], Morphism], F: FunctorData, G: FunctorData,
                      testset: Iterable) -> CheckReport:
    """Monoidality, naturality on structure maps, counit condition and the
    ξ^r intertwining for a transformation f: F → G of GV-functors."""
    src, tgt = F.source, F.target
    C, D = src.C, tgt.C
    objs = list(testset)
    reps = []
    for X in objs:
        for Y in objs:
            lhs = seq(D, f(C.tensor(X, Y)), F.phi2(X, Y))
            rhs = seq(D, G.phi2(X, Y), t(D, f(X), f(Y)))
            reps.append(_eq_report(D, "GVMOR:monoidal", (X, Y), lhs, rhs))
            # naturality on the evaluation X⊗(X⊸Y) → Y
            e = C.ev(X, Y)
            reps.append(_eq_report(D, "GVMOR:natural", (X, Y),
                                   seq(D, f(Y), F.mor(e)), seq(D, G.mor(e), f(C.tensor(X, C.lhom(X, Y)))))
                        )
    reps.append(_eq_report(D, "GVMOR:unit", (), seq(D, f(C.unit), F.phi0), G.phi0))
    reps.append(_eq_report(D, "GVMOR", (), F.upsilon0, seq(D, G.upsilon0, f(src.K))))
    for X in objs:
        lhs = xi_r(F, X)
        rhs = seq(D, tgt.D_mor(f(X)), xi_r(G, X), f(src.D(X)))
        reps.append(_eq_report(D, "GVMOR:xi_r", (X,), lhs, rhs))
        ok = D.inverse(f(X)) is not None
        reps.append(CheckReport("GVMOR:invertible", (C.describe(X),), ok,
                                "" if ok else "component not invertible"))
    return combine("gv_morphism_check", reps)


# ---------------------------------------------------------------------------
# round trips


def eps_par(gv: GVData, X, Y) -> Morphism:
    """ε^{X⅋Y}: (X⅋Y) ⊗ (D'Y⊗D'X) → K."""
    C = gv.C
    DY, DX = gv.Dp(Y), gv.Dp(X)
    inner = seq(C, gv.par_runitor(X), gv.par_mor(X, gv.eps(Y)), gv.distr(X, Y, DY))
    return seq(C, gv.eps(X), t(C, inner, DX), C.assoc(gv.par(X, Y), DY, DX))


def roundtrip_upsilon_C(gv: GVData, X, Y) -> Morphism:
    """υ^C_{X,Y}: X⅋Y → X ⅋̃ Y through ε^{X⅋Y} and the left LD-dual of D'Y⊗D'X."""
    C = gv.C
    P = gv.par(X, Y)
    W = C.tensor(gv.Dp(Y), gv.Dp(X))
    DW = gv.D(W)
    return seq(C,
               gv.par_lunitor(DW),
               gv.par_mor(eps_par(gv, X, Y), DW),
               gv.distl(P, W, DW),
               t(C, P, gv.eta_l(W)),
               C.runitor_inv(P))


def identity_is_braided(gv: GVData, X, Y, sign: int = 1) -> CheckReport:
    C = gv.C
    lhs = seq(C, roundtrip_upsilon_C(gv, Y, X), gv.cbar(X, Y, sign))
    rhs = seq(C, gv.D_mor(braid(C, gv.Dp(X), gv.Dp(Y), sign)), roundtrip_upsilon_C(gv, X, Y))
    return _eq_report(C, "identity_is_braided", (X, Y), lhs, rhs)


@dataclass
class ReconstructedGV:
    K: Any
    D: Callable[[Any], Any]
    Dp: Callable[[Any], Any]


def gv_to_ld_to_gv(gv: GVData) -> ReconstructedGV:
    """GV → LDN → GV on objects: K is the ⅋-unit, D the left LD-dual, D' the right one."""
    ld = LDData(gv)
    return ReconstructedGV(ld.par_unit, ld.ldual, ld.rdual)


def ld_internal_hom_check(gv: GVData, X, Y) -> CheckReport:
    """The evaluation rebuilt from LD data, λ⅋∘(ε⅋Y)∘distl: X⊗(D'X⅋Y) → Y,
    matches ev^X_Y under the identification (d̃_X⊸Y)∘lid: D'X⅋Y ≅ X⊸Y."""
    C = gv.C
    DX = gv.Dp(X)
    ev_ld = seq(C, gv.par_lunitor(Y), gv.par_mor(gv.eps(X), Y), gv.distl(X, DX, Y))
    ident = seq(C, lh(C, gv.d_tilde(X), Y), gv.lid(DX, Y))
    rhs = seq(C, C.ev(X, Y), t(C, X, ident))
    return _eq_report(C, "ld_internal_hom", (X, Y), ev_ld, rhs)
