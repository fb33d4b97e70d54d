"""Coherence axioms as data, and a uniform checker.

Each axiom is a pair of composition trees over named structure morphisms.
Trees are evaluated against a structure provider (an :class:`LDData`, a bare
model, or a functor between two LD structures) and the two resulting
morphisms are compared exactly.
"""
from __future__ import annotations

import enum
import itertools
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Sequence

import numpy as np

from .duality import FunctorData, GVData, LDData, derive_ld_comultiplication, eq_report
from .kernel import ModelCategory, Morphism, StructureMissing, as_mor, seq, t
from .linalg import Matrix, try_invert
from .reports import CheckReport, combine


class AxiomId(str, enum.Enum):
    A1 = "A1"
    A2 = "A2"
    A3 = "A3"
    A4 = "A4"
    A5 = "A5"
    A6 = "A6"
    A7 = "A7"
    A8 = "A8"
    A9 = "A9"
    A10 = "A10"
    S1 = "S1"
    S2 = "S2"
    F1 = "F1"
    F2 = "F2"
    H1 = "H1"
    H2 = "H2"
    PENT = "PENT"
    TRI = "TRI"
    HEX1 = "HEX1"
    HEX2 = "HEX2"
    GVMOR = "GVMOR"
    PIV1 = "PIV1"
    PIV2 = "PIV2"
    PIV3 = "PIV3"


# ---------------------------------------------------------------------------
# expression trees

@dataclass(frozen=True)
class V:
    name: str


@dataclass(frozen=True)
class Const:
    which: str          # "1" or "K"


ONE = Const("1")
KOB = Const("K")


@dataclass(frozen=True)
class Ten:
    a: Any
    b: Any


@dataclass(frozen=True)
class Par:
    a: Any
    b: Any


@dataclass(frozen=True)
class RDual:
    a: Any


@dataclass(frozen=True)
class LDual:
    a: Any


@dataclass(frozen=True)
class FOb:
    a: Any


@dataclass(frozen=True)
class S:
    name: str
    args: tuple

    def __init__(self, name, *args):
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "args", args)


@dataclass(frozen=True)
class SF:
    name: str
    args: tuple

    def __init__(self, name, *args):
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "args", args)


@dataclass(frozen=True)
class I:
    obj: Any


@dataclass(frozen=True)
class Cmp:
    parts: tuple

    def __init__(self, *parts):
        object.__setattr__(self, "parts", parts)


@dataclass(frozen=True)
class TM:
    a: Any
    b: Any


@dataclass(frozen=True)
class PM:
    a: Any
    b: Any


@dataclass(frozen=True)
class FM:
    m: Any


@dataclass(frozen=True)
class Equation:
    axiom: str
    variables: tuple[str, ...]
    lhs: Any
    rhs: Any
    needs: str = "ld"            # "model", "ld", "braided", "functor"
    about: str = ""
    variant: str = ""


W_, X_, Y_, Z_ = V("W"), V("X"), V("Y"), V("Z")


def _templates() -> dict[str, list[Equation]]:
    X, Y, Z, W = X_, Y_, Z_, W_
    T: dict[str, list[Equation]] = {}

    def add(eq: Equation):
        T.setdefault(eq.axiom, []).append(eq)

    add(Equation("PENT", ("W", "X", "Y", "Z"),
                 Cmp(S("alpha", Ten(W, X), Y, Z), S("alpha", W, X, Ten(Y, Z))),
                 Cmp(TM(S("alpha", W, X, Y), I(Z)), S("alpha", W, Ten(X, Y), Z), TM(I(W), S("alpha", X, Y, Z))),
                 "model", "pentagon for the tensor associator"))
    add(Equation("TRI", ("X", "Y"),
                 Cmp(TM(S("rho", X), I(Y)), S("alpha", X, ONE, Y)),
                 TM(I(X), S("lam", Y)),
                 "model", "triangle for associator and unitors"))
    add(Equation("HEX1", ("X", "Y", "Z"),
                 Cmp(S("alpha_inv", Y, Z, X), S("c", X, Ten(Y, Z)), S("alpha_inv", X, Y, Z)),
                 Cmp(TM(I(Y), S("c", X, Z)), S("alpha_inv", Y, X, Z), TM(S("c", X, Y), I(Z))),
                 "braided_model", "hexagon, braiding past a tensor on the right"))
    add(Equation("HEX2", ("X", "Y", "Z"),
                 Cmp(S("alpha", Z, X, Y), S("c", Ten(X, Y), Z), S("alpha", X, Y, Z)),
                 Cmp(TM(S("c", X, Z), I(Y)), S("alpha", X, Z, Y), TM(I(X), S("c", Y, Z))),
                 "braided_model", "hexagon, braiding a tensor past an object"))

    add(Equation("A1", ("X", "Y"),
                 Cmp(PM(S("lam", X), I(Y)), S("distl", ONE, X, Y)), S("lam", Par(X, Y)),
                 about="left distributor against the tensor left unitor"))
    add(Equation("A2", ("X", "Y"),
                 Cmp(PM(I(X), S("rho", Y)), S("distr", X, Y, ONE)), S("rho", Par(X, Y)),
                 about="right distributor against the tensor right unitor"))
    add(Equation("A3", ("X", "Y"),
                 Cmp(S("lampar", Ten(X, Y)), S("distr", KOB, X, Y)), TM(S("lampar", X), I(Y)),
                 about="right distributor against the par left unitor"))
    add(Equation("A4", ("X", "Y"),
                 Cmp(S("rhopar", Ten(X, Y)), S("distl", X, Y, KOB)), TM(I(X), S("rhopar", Y)),
                 about="left distributor against the par right unitor"))
    add(Equation("A5", ("W", "X", "Y", "Z"),
                 Cmp(S("distl", Ten(W, X), Y, Z), S("alpha", W, X, Par(Y, Z))),
                 Cmp(PM(S("alpha", W, X, Y), I(Z)), S("distl", W, Ten(X, Y), Z), TM(I(W), S("distl", X, Y, Z))),
                 about="left distributor against the tensor associator"))
    add(Equation("A6", ("W", "X", "Y", "Z"),
                 Cmp(PM(I(W), S("alpha", X, Y, Z)), S("distr", W, X, Ten(Y, Z))),
                 Cmp(S("distr", W, Ten(X, Y), Z), TM(S("distr", W, X, Y), I(Z)), S("alpha", Par(W, X), Y, Z)),
                 about="right distributor against the tensor associator"))
    add(Equation("A7", ("W", "X", "Y", "Z"),
                 Cmp(S("distr", Par(W, X), Y, Z), TM(S("apar", W, X, Y), I(Z))),
                 Cmp(S("apar", W, X, Ten(Y, Z)), PM(I(W), S("distr", X, Y, Z)), S("distr", W, Par(X, Y), Z)),
                 about="right distributor against the par associator"))
    add(Equation("A8", ("W", "X", "Y", "Z"),
                 Cmp(S("apar", Ten(W, X), Y, Z), S("distl", W, X, Par(Y, Z))),
                 Cmp(PM(S("distl", W, X, Y), I(Z)), S("distl", W, Par(X, Y), Z), TM(I(W), S("apar", X, Y, Z))),
                 about="left distributor against the par associator"))
    add(Equation("A9", ("W", "X", "Y", "Z"),
                 Cmp(S("distl", W, X, Ten(Y, Z)), TM(I(W), S("distr", X, Y, Z))),
                 Cmp(S("distr", Ten(W, X), Y, Z), TM(S("distl", W, X, Y), I(Z)), S("alpha", W, Par(X, Y), Z)),
                 about="left and right distributors, tensor on both sides"))
    add(Equation("A10", ("W", "X", "Y", "Z"),
                 Cmp(PM(S("distr", W, X, Y), I(Z)), S("distl", Par(W, X), Y, Z)),
                 Cmp(S("apar", W, Ten(X, Y), Z), PM(I(W), S("distl", X, Y, Z)), S("distr", W, X, Par(Y, Z))),
                 about="left and right distributors, par on both sides"))

    # Snake equations: printed form (left LD-dual) and its mirror (right LD-dual).
    LX, RX = LDual(X), RDual(X)
    add(Equation("S1", ("X",),
                 Cmp(PM(S("eps_l", X), I(LX)), S("distl", LX, X, LX), TM(I(LX), S("eta_l", X))),
                 Cmp(S("lampar_inv", LX), S("rho", LX)),
                 about="first snake equation", variant="left"))
    add(Equation("S1", ("X",),
                 Cmp(PM(S("eps", X), I(X)), S("distl", X, RX, X), TM(I(X), S("eta", X))),
                 Cmp(S("lampar_inv", X), S("rho", X)),
                 about="first snake equation", variant="right"))
    add(Equation("S2", ("X",),
                 Cmp(PM(I(X), S("eps_l", X)), S("distr", X, LX, X), TM(S("eta_l", X), I(X))),
                 Cmp(S("rhopar_inv", X), S("lam", X)),
                 about="second snake equation", variant="left"))
    add(Equation("S2", ("X",),
                 Cmp(PM(I(RX), S("eps", X)), S("distr", RX, X, RX), TM(S("eta", X), I(RX))),
                 Cmp(S("rhopar_inv", RX), S("lam", RX)),
                 about="second snake equation", variant="right"))

    add(Equation("H1", ("X", "Y", "Z"),
                 Cmp(PM(S("c", X, Y), I(Z)), S("distl", X, Y, Z), TM(I(X), S("cbar_inv", Y, Z))),
                 Cmp(S("cbar_inv", Ten(Y, X), Z), S("distr", Z, Y, X), S("c", X, Par(Z, Y))),
                 "braided", "first hexagon linking the two braidings"))
    add(Equation("H2", ("X", "Y", "Z"),
                 Cmp(PM(I(X), S("c", Y, Z)), S("distr", X, Y, Z), TM(S("cbar_inv", X, Y), I(Z))),
                 Cmp(S("cbar_inv", X, Ten(Z, Y)), S("distl", Z, Y, X), S("c", Par(Y, X), Z)),
                 "braided", "second hexagon linking the two braidings"))

    FX, FY, FZ = FOb(X), FOb(Y), FOb(Z)
    add(Equation("F1", ("X", "Y", "Z"),
                 Cmp(SF("ups2", Ten(X, Y), Z), FM(S("distl", X, Y, Z)), SF("phi2", X, Par(Y, Z))),
                 Cmp(PM(SF("phi2", X, Y), I(FZ)), S("distl", FX, FY, FZ), TM(I(FX), SF("ups2", Y, Z))),
                 "functor", "Frobenius relation for the left distributor"))
    add(Equation("F2", ("X", "Y", "Z"),
                 Cmp(SF("ups2", X, Ten(Y, Z)), FM(S("distr", X, Y, Z)), SF("phi2", Par(X, Y), Z)),
                 Cmp(PM(I(FX), SF("phi2", Y, Z)), S("distr", FX, FY, FZ), TM(SF("ups2", X, Y), I(FZ))),
                 "functor", "Frobenius relation for the right distributor"))
    return T


TEMPLATES = _templates()

CATALOGUE: dict[str, str] = {
    "A1": "left distributor vs tensor left unitor (triangle)",
    "A2": "right distributor vs tensor right unitor (triangle)",
    "A3": "right distributor vs par left unitor (triangle)",
    "A4": "left distributor vs par right unitor (triangle)",
    "A5": "left distributor vs tensor associator (pentagon)",
    "A6": "right distributor vs tensor associator (pentagon)",
    "A7": "right distributor vs par associator (pentagon)",
    "A8": "left distributor vs par associator (pentagon)",
    "A9": "mixed distributors, tensor associator (pentagon)",
    "A10": "mixed distributors, par associator (pentagon)",
    "S1": "first snake equation for LD-duals (both sides)",
    "S2": "second snake equation for LD-duals (both sides)",
    "F1": "Frobenius relation: comultiplication and left distributor",
    "F2": "Frobenius relation: comultiplication and right distributor",
    "H1": "braided LD hexagon, tensor braiding left of the par braiding",
    "H2": "braided LD hexagon, tensor braiding right of the par braiding",
    "PENT": "monoidal pentagon for the tensor associator",
    "TRI": "monoidal triangle for associator and unitors",
    "HEX1": "braiding hexagon (object past a tensor)",
    "HEX2": "braiding hexagon (tensor past an object)",
    "GVMOR": "morphism of GV-functors: monoidal, natural, counit compatible",
    "PIV1": "pivotal structure: compatibility with the tensor",
    "PIV2": "pivotal structure: compatibility at the unit",
    "PIV3": "pivotal structure: compatibility with the Frobenius forms",
}


# ---------------------------------------------------------------------------
# evaluation

class _ModelWorld:
    """Structure provider for model-level axioms (PENT, TRI, HEX)."""

    def __init__(self, C: ModelCategory):
        self.C = C
        self.K = None

    def tensor(self, X, Y):
        return self.C.tensor(X, Y)

    def par(self, X, Y):
        raise StructureMissing("par product not available on a bare model")

    def par_mor(self, f, g):
        raise StructureMissing("par product not available on a bare model")

    def rdual(self, X):
        raise StructureMissing("duals not available on a bare model")

    ldual = rdual

    def structure(self, name, *objs):
        C = self.C
        table = {"alpha": C.assoc, "alpha_inv": C.assoc_inv, "lam": C.lunitor, "lam_inv": C.lunitor_inv,
                 "rho": C.runitor, "rho_inv": C.runitor_inv, "c": C.braiding}
        if name not in table:
            raise StructureMissing(f"{name} not available on a bare model")
        return table[name](*objs)


@dataclass
class _Env:
    world: Any                     # target-side structure provider
    src: Any = None                # source-side provider (functor axioms)
    functor: FunctorData | None = None
    upsilon0: Morphism | None = None
    env: dict = field(default_factory=dict)


def _ob(e: _Env, node, side: str = "tgt"):
    w = e.world if side == "tgt" else e.src
    if isinstance(node, V):
        return e.env[node.name]
    if isinstance(node, Const):
        return w.C.unit if node.which == "1" else w.K
    if isinstance(node, Ten):
        return w.tensor(_ob(e, node.a, side), _ob(e, node.b, side))
    if isinstance(node, Par):
        return w.par(_ob(e, node.a, side), _ob(e, node.b, side))
    if isinstance(node, RDual):
        return w.rdual(_ob(e, node.a, side))
    if isinstance(node, LDual):
        return w.ldual(_ob(e, node.a, side))
    if isinstance(node, FOb):
        return e.functor.ob(_ob(e, node.a, "src"))
    raise TypeError(f"not an object node: {node!r}")


def _mor(e: _Env, node, side: str = "tgt") -> Morphism:
    w = e.world if side == "tgt" else e.src
    C = w.C
    if isinstance(node, S):
        return w.structure(node.name, *[_ob(e, a, side) for a in node.args])
    if isinstance(node, I):
        return C.identity(_ob(e, node.obj, side))
    if isinstance(node, Cmp):
        return seq(C, *[_mor(e, p, side) for p in node.parts])
    if isinstance(node, TM):
        return t(C, _mor(e, node.a, side), _mor(e, node.b, side))
    if isinstance(node, PM):
        return w.par_mor(_mor(e, node.a, side), _mor(e, node.b, side))
    if isinstance(node, FM):
        return e.functor.mor(_mor(e, node.m, "src"))
    if isinstance(node, SF):
        objs = [_ob(e, a, "src") for a in node.args]
        if node.name == "phi2":
            return e.functor.phi2(*objs)
        if node.name == "ups2":
            return derive_ld_comultiplication(e.functor, *objs, upsilon0=e.upsilon0)
        raise KeyError(node.name)
    raise TypeError(f"not a morphism node: {node!r}")


class _SignedWorld:
    """Routes c / cbar_inv to the chosen sign of the braidings."""

    def __init__(self, inner, sign: int):
        self.inner = inner
        self.sign = sign
        self.C = inner.C
        self.K = inner.K

    def __getattr__(self, item):
        return getattr(self.inner, item)

    def structure(self, name, *objs):
        if self.sign < 0 and name in ("c", "cbar_inv"):
            name = {"c": "c_minus", "cbar_inv": "cbar_minus_inv"}[name]
        return self.inner.structure(name, *objs)


def check(axiom: AxiomId | str, data, objects: Sequence, *, sign: int = 1,
          upsilon0: Morphism | None = None, pi: Callable | None = None) -> CheckReport:
    """Evaluate both sides of the named axiom on the given objects.

    ``data`` is an :class:`LDData` (or :class:`GVData`) for A*/S*/H*, a model
    or LD data for PENT/TRI/HEX*, a :class:`FunctorData` for F1/F2, and GV
    data plus ``pi`` for PIV*.
    """
    ax = AxiomId(axiom).value
    if ax in ("PIV1", "PIV2", "PIV3"):
        gv = data if isinstance(data, GVData) else data.gv
        if pi is None:
            raise StructureMissing("pivotal checks need a candidate pi")
        rep = gv.pivotal_check(pi, objects)
        sub = [d for d in rep.details if d.check == ax]
        return combine(ax, sub)
    if ax == "GVMOR":
        raise StructureMissing("GVMOR is checked through duality.gv_morphism_check")
    eqs = TEMPLATES[ax]
    reps = []
    for eq in eqs:
        world, e = _world_for(eq, data, sign, upsilon0)
        if len(objects) != len(eq.variables):
            raise ValueError(f"{ax} expects {len(eq.variables)} objects, got {len(objects)}")
        e.env = dict(zip(eq.variables, objects))
        C = world.C
        label_C = e.src.C if e.src is not None else C
        name = ax + (f"[{eq.variant}]" if eq.variant else "") + ("" if sign > 0 else "[c-]")
        try:
            lhs = _mor(e, eq.lhs)
            rhs = _mor(e, eq.rhs)
        except ArithmeticError as exc:
            reps.append(CheckReport(name, tuple(label_C.describe(o) for o in objects), False,
                                    f"not computable: {exc}"))
            continue
        rep = eq_report(C, name, (), lhs, rhs)
        rep.objects = tuple(label_C.describe(o) for o in objects)
        reps.append(rep)
    if len(reps) == 1:
        return reps[0]
    out = combine(ax, reps, reps[0].objects)
    return out


def _world_for(eq: Equation, data, sign, upsilon0):
    if eq.needs == "functor":
        if not isinstance(data, FunctorData):
            raise StructureMissing(f"{eq.axiom} needs a functor")
        tgt = LDData(data.target)
        return tgt, _Env(tgt, LDData(data.source), data, upsilon0 if upsilon0 is not None else data.upsilon0)
    if eq.needs in ("model", "braided_model"):
        if isinstance(data, (LDData, GVData)):
            w = _ModelWorld(data.C)
        elif isinstance(data, ModelCategory) or hasattr(data, "tensor_mor"):
            w = _ModelWorld(data)
        else:
            w = data
        if eq.needs == "braided_model" and not getattr(w.C, "braided", False):
            raise StructureMissing(f"{eq.axiom} needs a braiding")
        return w, _Env(w)
    if isinstance(data, GVData):
        data = LDData(data)
    if eq.needs == "braided":
        if not getattr(data.C, "braided", False):
            raise StructureMissing(f"{eq.axiom} needs a braiding")
        data = _SignedWorld(data, sign)
    return data, _Env(data)


# ---------------------------------------------------------------------------
# mutation (checker power)

class PerturbedLD:
    """LD data with one structure morphism replaced by f∘P for an invertible,
    non-identity matrix P on its source."""

    def __init__(self, ld, name: str, seed: int = 0):
        self.inner = ld
        self.name = name
        self.C = ld.C
        self.K = ld.K
        self.seed = seed

    def __getattr__(self, item):
        return getattr(self.inner, item)

    def structure(self, name, *objs):
        f = self.inner.structure(name, *objs)
        if name != self.name:
            return f
        return perturb(self.C, f, self.seed)


def random_invertible(n: int, p: int, rng: np.random.Generator) -> Matrix | None:
    if n == 0 or (n == 1 and p == 2):
        return None
    for _ in range(200):
        M = Matrix(rng.integers(0, p, size=(n, n)), p)
        if not M.is_identity() and try_invert(M) is not None:
            return M
    return None


def perturb(C, f: Morphism, seed: int = 0) -> Morphism:
    """Precompose the carrier of a linear morphism with a random invertible
    non-identity matrix (identity if the source admits none)."""
    rng = np.random.default_rng(seed)
    n = f.data.cols
    P = random_invertible(n, f.data.p, rng)
    if P is None:
        return f
    return Morphism(f.source, f.target, f.data @ P)


class MutatedModel:
    """Proxy over a model in which one primitive structure method is perturbed."""

    def __init__(self, C, method: str, seed: int = 0):
        self._C = C
        self._method = method
        self._seed = seed

    def __getattr__(self, item):
        attr = getattr(self._C, item)
        if item != self._method:
            return attr

        def wrapped(*args):
            return perturb(self._C, attr(*args), self._seed)

        return wrapped


# ---------------------------------------------------------------------------
# batches

@dataclass
class PlanItem:
    axiom: str
    sampler: Callable[[np.random.Generator], Iterable[tuple]]
    data: Any
    options: dict = field(default_factory=dict)


def batch(plan: Sequence[PlanItem], seed: int = 0, budget_ms: float | None = None,
          fail_fast: bool = False) -> list[CheckReport]:
    """Run each plan item on the tuples drawn by its sampler.

    The random generator is derived from the seed and the item position, so
    results do not depend on execution order.  A check whose wall time exceeds
    ``budget_ms`` is reported as failed.
    """
    out: list[CheckReport] = []
    for k, item in enumerate(plan):
        rng = np.random.default_rng([seed, k])
        for objs in item.sampler(rng):
            t0 = time.perf_counter()
            try:
                rep = check(item.axiom, item.data, objs, **item.options)
            except StructureMissing as exc:
                rep = CheckReport(str(item.axiom), (), False, f"structure missing: {exc}")
            elapsed = (time.perf_counter() - t0) * 1000
            if budget_ms is not None and elapsed > budget_ms:
                rep.passed = False
                rep.message = (rep.message + "; " if rep.message else "") + f"budget exceeded ({elapsed:.0f} ms)"
            out.append(rep)
            if fail_fast and not rep.passed:
                return out
    return out


def all_tuples(objects: Sequence, arity: int, size: Callable[[Any], int] | None = None,
               max_product: int | None = None) -> list[tuple]:
    """Every arity-tuple of the given objects, optionally bounded by the
    product of their sizes."""
    out = []
    for tup in itertools.product(objects, repeat=arity):
        if max_product is not None and size is not None:
            prod = 1
            for o in tup:
                prod *= max(size(o), 1)
            if prod > max_product:
                continue
        out.append(tup)
    return out


def arity(axiom: AxiomId | str) -> int:
    ax = AxiomId(axiom).value
    if ax in TEMPLATES:
        return len(TEMPLATES[ax][0].variables)
    return {"PIV1": 2, "PIV2": 0, "PIV3": 0, "GVMOR": 1}[ax]


LD_BATTERY = ("A1", "A2", "A3", "A4", "A5", "A6", "A7", "A8", "A9", "A10", "S1", "S2", "PENT", "TRI")
