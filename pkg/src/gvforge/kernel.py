"""Backend-agnostic closed monoidal interface and the canonical maps it implies.

A backend supplies the primitive data (tensor, unit, associator, unitors,
left/right internal homs with their evaluations and coevaluations, optional
braiding).  Everything else, including beta, gamma, iota, internal composition
and tensorality, is computed here from that data by evaluating adjunction
bijections on identities.  One implementation therefore serves every backend.

Conventions:
  assoc(X, Y, Z):   X⊗(Y⊗Z) → (X⊗Y)⊗Z
  ev(X, Y):         X⊗(X⊸Y) → Y        coev(X, W): W → X⊸(X⊗W)
  rev(X, Y):        (Y⟜X)⊗X → Y        rcoev(X, W): W → (W⊗X)⟜X
  lhom_mor(f, g):   X⊸Y → X'⊸Y'  for f: X'→X, g: Y→Y'
  rhom_mor(g, f):   Y⟜X → Y'⟜X'  for g: Y→Y', f: X'→X
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Hashable


class EndpointMismatch(ValueError):
    pass


class StructureMissing(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class Morphism:
    source: Hashable
    target: Hashable
    data: Any

    def __repr__(self) -> str:
        return f"Morphism({self.source!r} -> {self.target!r})"


class ModelCategory:
    """Interface every backend implements.  Objects must be hashable values
    compared by payload; morphisms are :class:`Morphism` instances."""

    name = "abstract"
    unit: Hashable
    braided = False

    # -- category ---------------------------------------------------------
    def identity(self, X) -> Morphism:
        raise NotImplementedError

    def compose(self, g: Morphism, f: Morphism) -> Morphism:
        raise NotImplementedError

    def equal(self, f: Morphism, g: Morphism) -> bool:
        raise NotImplementedError

    def inverse(self, f: Morphism) -> Morphism | None:
        raise NotImplementedError

    def describe(self, X) -> str:
        return repr(X)

    def carrier(self, f: Morphism):
        """JSON-friendly rendering of a morphism's data (for reports)."""
        return repr(f.data)

    # -- monoidal ---------------------------------------------------------
    def tensor(self, X, Y):
        raise NotImplementedError

    def tensor_mor(self, f: Morphism, g: Morphism) -> Morphism:
        raise NotImplementedError

    def assoc(self, X, Y, Z) -> Morphism:
        raise NotImplementedError

    def assoc_inv(self, X, Y, Z) -> Morphism:
        return self.inverse(self.assoc(X, Y, Z))

    def lunitor(self, X) -> Morphism:
        raise NotImplementedError

    def lunitor_inv(self, X) -> Morphism:
        return self.inverse(self.lunitor(X))

    def runitor(self, X) -> Morphism:
        raise NotImplementedError

    def runitor_inv(self, X) -> Morphism:
        return self.inverse(self.runitor(X))

    # -- closed -----------------------------------------------------------
    def lhom(self, X, Y):
        raise NotImplementedError

    def lhom_mor(self, f: Morphism, g: Morphism) -> Morphism:
        raise NotImplementedError

    def ev(self, X, Y) -> Morphism:
        raise NotImplementedError

    def coev(self, X, W) -> Morphism:
        raise NotImplementedError

    def rhom(self, Y, X):
        raise NotImplementedError

    def rhom_mor(self, g: Morphism, f: Morphism) -> Morphism:
        raise NotImplementedError

    def rev(self, X, Y) -> Morphism:
        raise NotImplementedError

    def rcoev(self, X, W) -> Morphism:
        raise NotImplementedError

    # -- braiding ---------------------------------------------------------
    def braiding(self, X, Y) -> Morphism:
        raise StructureMissing(f"{self.name} carries no braiding")


# ---------------------------------------------------------------------------
# small combinators


def is_mor(a) -> bool:
    return isinstance(a, Morphism)


def as_mor(C: ModelCategory, a) -> Morphism:
    return a if is_mor(a) else C.identity(a)


def seq(C: ModelCategory, *fs) -> Morphism:
    """Composite written in math order: seq(C, h, g, f) = h∘g∘f."""
    fs = [as_mor(C, f) for f in fs]
    out = fs[-1]
    for g in reversed(fs[:-1]):
        if g.source != out.target:
            raise EndpointMismatch(
                f"cannot compose: {C.describe(out.target)} vs {C.describe(g.source)}")
        out = C.compose(g, out)
    return out


def t(C: ModelCategory, a, b) -> Morphism:
    """Tensor of morphisms; plain objects stand for their identities."""
    return C.tensor_mor(as_mor(C, a), as_mor(C, b))


def lh(C: ModelCategory, a, b) -> Morphism:
    """a⊸b on morphisms, objects standing for identities (a contravariant)."""
    return C.lhom_mor(as_mor(C, a), as_mor(C, b))


def rh(C: ModelCategory, b, a) -> Morphism:
    """b⟜a on morphisms, objects standing for identities (a contravariant)."""
    return C.rhom_mor(as_mor(C, b), as_mor(C, a))


def inv(C: ModelCategory, f: Morphism) -> Morphism:
    g = C.inverse(f)
    if g is None:
        raise ArithmeticError(f"morphism {C.describe(f.source)} -> {C.describe(f.target)} is not invertible")
    return g


def braid(C: ModelCategory, X, Y, sign: int = 1) -> Morphism:
    """c⁺_{X,Y} = c_{X,Y};  c⁻_{X,Y} = c_{Y,X}⁻¹."""
    if sign > 0:
        return C.braiding(X, Y)
    return inv(C, C.braiding(Y, X))


# ---------------------------------------------------------------------------
# hom transposition


def hom_transpose(C: ModelCategory, X, Y, Z, f: Morphism) -> Morphism:
    """f: X⊗Y → Z  ↦  Y → X⊸Z."""
    if f.source != C.tensor(X, Y) or f.target != Z:
        raise EndpointMismatch("hom_transpose: endpoints do not match X⊗Y → Z")
    return transpose(C, X, Y, f)


def hom_untranspose(C: ModelCategory, X, Y, Z, g: Morphism) -> Morphism:
    """g: Y → X⊸Z  ↦  X⊗Y → Z."""
    if g.source != Y or g.target != C.lhom(X, Z):
        raise EndpointMismatch("hom_untranspose: endpoints do not match Y → X⊸Z")
    return untranspose(C, X, Z, g)


def rhom_transpose(C: ModelCategory, X, Y, Z, f: Morphism) -> Morphism:
    """f: Y⊗X → Z  ↦  Y → Z⟜X."""
    if f.source != C.tensor(Y, X) or f.target != Z:
        raise EndpointMismatch("rhom_transpose: endpoints do not match Y⊗X → Z")
    return rtranspose(C, X, Y, f)


def rhom_untranspose(C: ModelCategory, X, Y, Z, g: Morphism) -> Morphism:
    """g: Y → Z⟜X  ↦  Y⊗X → Z."""
    if g.source != Y or g.target != C.rhom(Z, X):
        raise EndpointMismatch("rhom_untranspose: endpoints do not match Y → Z⟜X")
    return runtranspose(C, X, Z, g)


def transpose(C, X, W, h: Morphism, generic: bool = False) -> Morphism:
    """Explicit-factor form of :func:`hom_transpose` (h: X⊗W → Z).

    Backends may supply ``closed_transpose`` to avoid materialising the
    intermediate X⊸(X⊗W); ``generic=True`` forces the route through coev.
    """
    if not generic and hasattr(C, "closed_transpose"):
        return C.closed_transpose(X, W, h)
    return seq(C, C.lhom_mor(C.identity(X), h), C.coev(X, W))


def untranspose(C, X, Z, g: Morphism) -> Morphism:
    """Explicit-factor form of :func:`hom_untranspose` (g: W → X⊸Z)."""
    return seq(C, C.ev(X, Z), t(C, X, g))


def rtranspose(C, X, W, h: Morphism, generic: bool = False) -> Morphism:
    """h: W⊗X → Z  ↦  W → Z⟜X (``closed_rtranspose`` dispatch as above)."""
    if not generic and hasattr(C, "closed_rtranspose"):
        return C.closed_rtranspose(X, W, h)
    return seq(C, C.rhom_mor(h, C.identity(X)), C.rcoev(X, W))


def runtranspose(C, X, Z, g: Morphism) -> Morphism:
    """g: W → Z⟜X  ↦  W⊗X → Z."""
    return seq(C, C.rev(X, Z), t(C, g, X))


# ---------------------------------------------------------------------------
# canonical isomorphisms


def beta(C: ModelCategory, X, Y, Z, generic: bool = False) -> Morphism:
    """(X⊗Y)⊸Z → Y⊸(X⊸Z)  (``closed_beta`` dispatch unless ``generic``)."""
    if not generic and hasattr(C, "closed_beta"):
        return C.closed_beta(X, Y, Z)
    XY = C.tensor(X, Y)
    W = C.lhom(XY, Z)
    h = seq(C, C.ev(XY, Z), C.assoc(X, Y, W))        # X⊗(Y⊗W) → Z
    g = transpose(C, X, C.tensor(Y, W), h)           # Y⊗W → X⊸Z
    return transpose(C, Y, W, g)


def beta_bar(C: ModelCategory, X, Y, Z, generic: bool = False) -> Morphism:
    """Z⟜(X⊗Y) → (Z⟜Y)⟜X  (``closed_beta_bar`` dispatch unless ``generic``)."""
    if not generic and hasattr(C, "closed_beta_bar"):
        return C.closed_beta_bar(X, Y, Z)
    XY = C.tensor(X, Y)
    W = C.rhom(Z, XY)
    h = seq(C, C.rev(XY, Z), C.assoc_inv(W, X, Y))   # (W⊗X)⊗Y → Z
    g = rtranspose(C, Y, C.tensor(W, X), h)          # W⊗X → Z⟜Y
    return rtranspose(C, X, W, g)


def gamma(C: ModelCategory, X) -> Morphism:
    """1⊸X → X."""
    one = C.unit
    return seq(C, C.ev(one, X), C.lunitor_inv(C.lhom(one, X)))


def gamma_bar(C: ModelCategory, X) -> Morphism:
    """X⟜1 → X."""
    one = C.unit
    return seq(C, C.rev(one, X), C.runitor_inv(C.rhom(X, one)))


def iota(C: ModelCategory, X, Y, Z, generic: bool = False) -> Morphism:
    """(X⊸Y)⟜Z → X⊸(Y⟜Z)  (``closed_iota`` dispatch unless ``generic``)."""
    if not generic and hasattr(C, "closed_iota"):
        return C.closed_iota(X, Y, Z)
    XY = C.lhom(X, Y)
    W = C.rhom(XY, Z)
    e = C.rev(Z, XY)                                   # W⊗Z → X⊸Y
    u = untranspose(C, X, Y, e)                        # X⊗(W⊗Z) → Y
    u = seq(C, u, C.assoc_inv(X, W, Z))                # (X⊗W)⊗Z → Y
    v = rtranspose(C, Z, C.tensor(X, W), u)            # X⊗W → Y⟜Z
    return transpose(C, X, W, v)


def comp_l(C: ModelCategory, X, Y, Z, generic: bool = False) -> Morphism:
    """Internal composition (X⊸Y)⊗(Y⊸Z) → X⊸Z.

    A backend may supply a closed form ``closed_comp_l``; ``generic=True``
    forces the derivation from ev and coev.
    """
    if not generic and hasattr(C, "closed_comp_l"):
        return C.closed_comp_l(X, Y, Z)
    XY, YZ = C.lhom(X, Y), C.lhom(Y, Z)
    W = C.tensor(XY, YZ)
    h = seq(C, C.ev(Y, Z), t(C, C.ev(X, Y), YZ), C.assoc(X, XY, YZ))
    return transpose(C, X, W, h)


def comp_r(C: ModelCategory, X, Y, Z, generic: bool = False) -> Morphism:
    """Right internal composition (Z⟜Y)⊗(Y⟜X) → Z⟜X (closed form if the
    backend has ``closed_comp_r``, unless ``generic``)."""
    if not generic and hasattr(C, "closed_comp_r"):
        return C.closed_comp_r(X, Y, Z)
    ZY, YX = C.rhom(Z, Y), C.rhom(Y, X)
    W = C.tensor(ZY, YX)
    h = seq(C, C.rev(Y, Z), t(C, ZY, C.rev(X, Y)), C.assoc_inv(ZY, YX, X))
    return rtranspose(C, X, W, h)


def unit_e(C: ModelCategory, X) -> Morphism:
    """Internal unit 1 → X⊸X."""
    return transpose(C, X, C.unit, C.runitor(X))


def unit_e_bar(C: ModelCategory, X) -> Morphism:
    """Internal unit 1 → X⟜X."""
    return rtranspose(C, X, C.unit, C.lunitor(X))


def tensorality(C: ModelCategory, X, Y, Z, generic: bool = False) -> Morphism:
    """(Y⊸Z) → (X⊗Y)⊸(X⊗Z), the transpose of (X⊗ev)∘α⁻¹."""
    if not generic and hasattr(C, "closed_tensorality"):
        return C.closed_tensorality(X, Y, Z)
    W = C.lhom(Y, Z)
    XY = C.tensor(X, Y)
    h = seq(C, t(C, X, C.ev(Y, Z)), C.assoc_inv(X, Y, W))
    return transpose(C, XY, W, h)


def rtensorality(C: ModelCategory, X, Y, Z, generic: bool = False) -> Morphism:
    """(Z⟜Y) → (Z⊗X)⟜(Y⊗X), the transpose of (ēv⊗X)∘α."""
    if not generic and hasattr(C, "closed_rtensorality"):
        return C.closed_rtensorality(X, Y, Z)
    W = C.rhom(Z, Y)
    YX = C.tensor(Y, X)
    h = seq(C, t(C, C.rev(Y, Z), X), C.assoc(W, Y, X))
    return rtranspose(C, YX, W, h)


def r_underline(C: ModelCategory, M, A, r: Morphism) -> Morphism:
    """Transpose A → M⊸M of a right action r: M⊗A → M."""
    return transpose(C, M, A, r)


def l_underline(C: ModelCategory, M, A, l: Morphism) -> Morphism:
    """Transpose A → M⟜M of a left action l: A⊗M → M."""
    return rtranspose(C, M, A, l)
