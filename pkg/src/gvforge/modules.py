"""Bimodules, left modules and local modules over an algebra in a graded base.

Objects are :class:`Bimodule` values (carrier plus action matrices); a
morphism stores the matrix of its underlying base map.  Tensor products over
A are cokernels of r⊗N − (M⊗l)∘α⁻¹, internal homs are equalizers, and every
induced action is obtained by descending or restricting a base morphism
through the canonical projection or inclusion.  Descent uses the
deterministic section of the projection and is asserted, not assumed.
"""
from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable

import numpy as np

from .duality import FunctorData, GVData
from .graded import GradedSpace, GradedVec
from .kernel import (
    rtranspose,
    transpose,
    EndpointMismatch,
    ModelCategory,
    Morphism,
    StructureMissing,
    beta,
    beta_bar,
    braid,
    comp_l,
    comp_r,
    gamma,
    gamma_bar,
    inv,
    iota,
    l_underline,
    lh,
    r_underline,
    rh,
    rtensorality,
    seq,
    t,
    tensorality,
)
from .linalg import Matrix, try_invert
from .reports import CheckReport, combine


class DescentFailed(ArithmeticError):
    """An induced map did not factor through the canonical projection/inclusion."""


class ComultiplicativityFailed(ArithmeticError):
    pass


# ---------------------------------------------------------------------------
# algebras


@dataclass(frozen=True, eq=False)
class AlgebraDatum:
    C: GradedVec
    A: GradedSpace
    mu: Morphism
    eta: Morphism
    name: str = "A"

    def __post_init__(self):
        C, A = self.C, self.A
        if self.mu.source != C.tensor(A, A) or self.mu.target != A:
            raise EndpointMismatch("multiplication must be A⊗A → A")
        if self.eta.source != C.unit or self.eta.target != A:
            raise EndpointMismatch("unit must be 1 → A")
        mu = self.mu
        lhs = seq(C, mu, t(C, mu, A), C.assoc(A, A, A))
        rhs = seq(C, mu, t(C, A, mu))
        if not C.equal(lhs, rhs):
            raise ValueError(f"{self.name}: multiplication is not associative")
        if not C.equal(seq(C, mu, t(C, self.eta, A)), C.lunitor(A)):
            raise ValueError(f"{self.name}: left unit law fails")
        if not C.equal(seq(C, mu, t(C, A, self.eta)), C.runitor(A)):
            raise ValueError(f"{self.name}: right unit law fails")

    def is_commutative(self, sign: int = 1) -> bool:
        C = self.C
        return C.equal(seq(C, self.mu, braid(C, self.A, self.A, sign)), self.mu)


def algebra_from_table(C: GradedVec, A: GradedSpace, table: dict[tuple[int, int], dict[int, int]] | Callable,
                       unit: Iterable[int], name: str = "A") -> AlgebraDatum:
    """Algebra from structure constants: ``table[(i, j)] = {k: c}`` means
    e_i·e_j = Σ c e_k (missing products are zero)."""
    n = A.dim
    M = np.zeros((n, n * n), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            prod = table(i, j) if callable(table) else table.get((i, j), {})
            for k, c in prod.items():
                M[k, i * n + j] = c
    mu = C.mor(C.tensor(A, A), A, Matrix(M, C.p))
    eta = C.mor(C.unit, A, Matrix(np.asarray(list(unit), dtype=np.int64).reshape(n, 1), C.p))
    return AlgebraDatum(C, A, mu, eta, name)


def truncated_polynomial(C: GradedVec, n: int, name: str | None = None) -> AlgebraDatum:
    """F_p[x]/(x^n) with basis 1, x, ..., x^{n-1}."""
    A = C.vec(n)
    return algebra_from_table(C, A, lambda i, j: {i + j: 1} if i + j < n else {},
                              [1] + [0] * (n - 1), name or f"F_{C.p}[x]/(x^{n})")


def exterior_algebra(C: GradedVec, name: str = "Λ[θ]") -> AlgebraDatum:
    """Λ[θ] = k ⊕ kθ with θ odd and θ² = 0, in super vector spaces."""
    A = C.super_space(1, 1)
    return algebra_from_table(C, A, lambda i, j: {i + j: 1} if i + j < 2 else {}, [1, 0], name)


def ground_algebra(C: GradedVec) -> AlgebraDatum:
    one = C.unit
    return AlgebraDatum(C, one, C.lunitor(one), C.identity(one), "k")


# ---------------------------------------------------------------------------
# bimodules


@dataclass(frozen=True)
class Bimodule:
    space: GradedSpace
    l: Matrix            # A⊗M → M
    r: Matrix            # M⊗A → M
    label: str = field(default="", compare=False, hash=False)

    @property
    def dim(self) -> int:
        return self.space.dim

    def __repr__(self) -> str:
        return self.label or f"Bimod({self.space!r})"


def _memo(fn):
    name = fn.__name__

    def wrapper(self, *args):
        key = (name,) + args
        try:
            return self._cache[key]
        except KeyError:
            pass
        val = fn(self, *args)
        with self._lock:
            self._cache.setdefault(key, val)
        return self._cache[key]

    wrapper.__name__ = name
    wrapper.__doc__ = fn.__doc__
    return wrapper


class BimoduleCategory(ModelCategory):
    """A-bimodules in a graded base, closed monoidal under ⊗_A, ⊸_A, ⟜_A."""

    braided = False

    def __init__(self, alg: AlgebraDatum, name: str | None = None, validate: bool = True):
        self.alg = alg
        self.base: GradedVec = alg.C
        self.p = getattr(self.base, "p", None)
        self.name = name or f"{alg.name}-bimod"
        self.validate = validate
        self._cache: dict = {}
        self._lock = threading.Lock()
        A = alg.A
        self.unit = Bimodule(A, alg.mu.data, alg.mu.data, alg.name)

    # -- construction helpers --------------------------------------------
    def bimodule(self, space: GradedSpace, l, r, label: str = "") -> Bimodule:
        l = l.data if isinstance(l, Morphism) else l
        r = r.data if isinstance(r, Morphism) else r
        M = Bimodule(space, l, r, label)
        if self.validate:
            problems = self.bimodule_problems(M)
            if problems:
                raise ValueError(f"not a bimodule ({', '.join(problems)})")
        return M

    def adopt(self, M: Bimodule) -> Bimodule:
        """Convert a bimodule given by action maps into this category's payload."""
        return M

    def lact(self, M: Bimodule) -> Morphism:
        return Morphism(self.base.tensor(self.alg.A, M.space), M.space, M.l)

    def ract(self, M: Bimodule) -> Morphism:
        return Morphism(self.base.tensor(M.space, self.alg.A), M.space, M.r)

    def bimodule_problems(self, M: Bimodule) -> list[str]:
        C, A, mu, eta = self.base, self.alg.A, self.alg.mu, self.alg.eta
        X = M.space
        out = []
        l, r = self.lact(M), self.ract(M)
        for f, name in ((l, "left action"), (r, "right action")):
            if hasattr(C, "is_homogeneous") and not C.is_homogeneous(f):
                out.append(f"{name} not homogeneous")
        if out:
            return out
        if not C.equal(seq(C, l, t(C, mu, X), C.assoc(A, A, X)), seq(C, l, t(C, A, l))):
            out.append("left action not associative")
        if not C.equal(seq(C, l, t(C, eta, X)), C.lunitor(X)):
            out.append("left action not unital")
        if not C.equal(seq(C, r, t(C, r, A), C.assoc(X, A, A)), seq(C, r, t(C, X, mu))):
            out.append("right action not associative")
        if not C.equal(seq(C, r, t(C, X, eta)), C.runitor(X)):
            out.append("right action not unital")
        lhs = seq(C, r, t(C, l, A), C.assoc(A, X, A))
        rhs = seq(C, l, t(C, A, r))
        if not C.equal(lhs, rhs):
            out.append("actions do not commute")
        return out

    def is_morphism(self, f: Morphism) -> bool:
        C, A = self.base, self.alg.A
        M, N = f.source, f.target
        u = self.under(f)
        return ((not hasattr(C, "is_homogeneous") or C.is_homogeneous(u))
                and C.equal(seq(C, u, self.lact(M)), seq(C, self.lact(N), t(C, A, u)))
                and C.equal(seq(C, u, self.ract(M)), seq(C, self.ract(N), t(C, u, A))))

    def under(self, f: Morphism) -> Morphism:
        """The underlying base morphism."""
        return Morphism(f.source.space, f.target.space, f.data)

    def lift(self, M: Bimodule, N: Bimodule, g: Morphism) -> Morphism:
        if g.source != M.space or g.target != N.space:
            raise EndpointMismatch("lift: base morphism does not match carriers")
        return Morphism(M, N, g.data)

    def mor(self, M: Bimodule, N: Bimodule, mat) -> Morphism:
        g = self.base.mor(M.space, N.space, mat)
        f = Morphism(M, N, g.data)
        if self.validate and not self.is_morphism(f):
            raise ValueError("matrix is not a bimodule morphism")
        return f

    # -- category --------------------------------------------------------
    def identity(self, X) -> Morphism:
        return Morphism(X, X, self.base.identity(X.space).data)

    def compose(self, g: Morphism, f: Morphism) -> Morphism:
        if g.source != f.target:
            raise EndpointMismatch("cannot compose bimodule maps with mismatched endpoints")
        return Morphism(f.source, g.target, self.base.compose(self.under(g), self.under(f)).data)

    def equal(self, f: Morphism, g: Morphism) -> bool:
        return f.source == g.source and f.target == g.target and f.data == g.data

    def inverse(self, f: Morphism) -> Morphism | None:
        h = self.base.inverse(self.under(f))
        return None if h is None else Morphism(f.target, f.source, h.data)

    def describe(self, X) -> str:
        return repr(X) if X.label else f"Bimod[{X.space!r}]"

    def carrier(self, f: Morphism):
        return self.base.carrier(self.under(f))

    # -- tensor over A ----------------------------------------------------
    @_memo
    def tensor_data(self, M: Bimodule, N: Bimodule) -> tuple[Bimodule, Morphism, Morphism]:
        """(M⊗_A N, projection p: M⊗N → M⊗_A N, section s) in the base."""
        C, A = self.base, self.alg.A
        X, Y = M.space, N.space
        p, s = C.coequalizer(t(C, self.ract(M), Y), seq(C, t(C, X, self.lact(N)), C.assoc_inv(X, A, Y)))
        Q = p.target
        lift_l = seq(C, p, t(C, self.lact(M), Y), C.assoc(A, X, Y))          # A⊗(M⊗N) → Q
        lift_r = seq(C, p, t(C, X, self.ract(N)), C.assoc_inv(X, Y, A))      # (M⊗N)⊗A → Q
        l = self._descend_through(lift_l, t(C, A, p))
        r = self._descend_through(lift_r, t(C, p, A))
        label = f"({self.describe(M)}⊗{self.describe(N)})" if (M.label and N.label) else ""
        return self._make(Q, l, r, label), p, s

    def _descend_through(self, g: Morphism, e: Morphism) -> Morphism:
        """The unique h with h∘e = g, for a surjection e; asserted."""
        C = self.base
        h = seq(C, g, C.section(e))
        if not C.equal(seq(C, h, e), g):
            raise DescentFailed("map does not descend along the projection")
        return h

    def _make(self, space, l: Morphism, r: Morphism, label: str) -> Bimodule:
        return Bimodule(space, l.data, r.data, label)

    def tensor(self, X, Y):
        return self.tensor_data(X, Y)[0]

    def proj(self, M, N) -> Morphism:
        return self.tensor_data(M, N)[1]

    def _descend(self, src: Bimodule, tgt: Bimodule, s: Morphism, g: Morphism) -> Morphism:
        return Morphism(src, tgt, seq(self.base, g, s).data)

    def tensor_mor(self, f: Morphism, g: Morphism) -> Morphism:
        C = self.base
        S, p_src, s_src = self.tensor_data(f.source, g.source)
        T, p_tgt, _ = self.tensor_data(f.target, g.target)
        return self._descend(S, T, s_src, seq(C, p_tgt, t(C, self.under(f), self.under(g))))

    @_memo
    def assoc(self, M, N, P) -> Morphism:
        C = self.base
        NP, p_np, _ = self.tensor_data(N, P)
        src, p_outer, _ = self.tensor_data(M, NP)
        MN, p_mn, _ = self.tensor_data(M, N)
        tgt, p_out, _ = self.tensor_data(MN, P)
        phi = seq(C, p_out, t(C, p_mn, P.space), C.assoc(M.space, N.space, P.space))
        g = self._descend_through(phi, seq(C, p_outer, t(C, M.space, p_np)))
        return Morphism(src, tgt, g.data)

    @_memo
    def assoc_inv(self, M, N, P) -> Morphism:
        return inv(self, self.assoc(M, N, P))

    @_memo
    def lunitor(self, M) -> Morphism:
        src, _, s = self.tensor_data(self.unit, M)
        return Morphism(src, M, seq(self.base, self.lact(M), s).data)

    @_memo
    def lunitor_inv(self, M) -> Morphism:
        return inv(self, self.lunitor(M))

    @_memo
    def runitor(self, M) -> Morphism:
        src, _, s = self.tensor_data(M, self.unit)
        return Morphism(src, M, seq(self.base, self.ract(M), s).data)

    @_memo
    def runitor_inv(self, M) -> Morphism:
        return inv(self, self.runitor(M))

    # -- induced actions on base internal homs ----------------------------
    def _slices(self, mat: Matrix, m: int, left: bool) -> list[np.ndarray]:
        """Matrices of v ↦ a_k·v (left) or v ↦ v·a_k (right), one per basis a_k."""
        n = self.alg.A.dim
        a = mat.a
        if left:
            return [a[:, k * m:(k + 1) * m] for k in range(n)]
        return [a[:, k::n] for k in range(n)]

    def _interleave(self, blocks: list[np.ndarray], h: int, hom_first: bool) -> Matrix:
        """Assemble an action A⊗H → H (or H⊗A → H) from per-basis blocks."""
        n = len(blocks)
        out = np.zeros((h, n * h), dtype=np.int64)
        for k, b in enumerate(blocks):
            if hom_first:
                out[:, k::n] = b
            else:
                out[:, k * h:(k + 1) * h] = b
        return Matrix._wrap(out, self.p)

    def lhom_actions(self, M: Bimodule, N: Bimodule, generic: bool = False) -> tuple[Morphism, Morphism]:
        """Left and right A-actions on the base hom M⊸N, induced by r^M and r^N
        through internal composition: (a·f) = f∘r(−⊗a), (f·a) = r(−⊗a)∘f.

        The graded base has sign-free transposition, so the composites reduce
        to Kronecker products; ``generic=True`` evaluates them through comp_l.
        """
        C, A = self.base, self.alg.A
        X, Y = M.space, N.space
        H = C.lhom(X, Y)
        if not generic and isinstance(C, GradedVec):
            m, n_ = X.dim, Y.dim
            h = m * n_
            # basis (i, j) of X⊸Y is the column-major vectorization of F
            lb = [np.kron(R.T, np.eye(n_, dtype=np.int64)) for R in self._slices(M.r, m, False)]
            rb = [np.kron(np.eye(m, dtype=np.int64), R) for R in self._slices(N.r, n_, False)]
            return (Morphism(C.tensor(A, H), H, self._interleave(lb, h, False)),
                    Morphism(C.tensor(H, A), H, self._interleave(rb, h, True)))
        l = seq(C, comp_l(C, X, X, Y), t(C, r_underline(C, X, A, self.ract(M)), H))
        r = seq(C, comp_l(C, X, Y, Y), t(C, H, r_underline(C, Y, A, self.ract(N))))
        return l, r

    def lhom_left_action_rewritten(self, M: Bimodule, N: Bimodule) -> Morphism:
        """Second formula for the left action on M⊸N, through β and ev^A."""
        C, A = self.base, self.alg.A
        X, Y = M.space, N.space
        H = C.lhom(X, Y)
        return seq(C, C.ev(A, H), t(C, A, beta(C, X, A, Y)), t(C, A, lh(C, self.ract(M), Y)))

    def rhom_actions(self, N: Bimodule, M: Bimodule, generic: bool = False) -> tuple[Morphism, Morphism]:
        """Left and right A-actions on the base hom N⟜M, induced by l^N and l^M:
        (a·h) = l(a⊗−)∘h, (h·a) = h∘l(a⊗−)."""
        C, A = self.base, self.alg.A
        X, Y = M.space, N.space
        H = C.rhom(Y, X)
        if not generic and isinstance(C, GradedVec):
            m, n_ = X.dim, Y.dim
            h = m * n_
            # basis (j, i) of Y⟜X is the row-major vectorization of F
            lb = [np.kron(L, np.eye(m, dtype=np.int64)) for L in self._slices(N.l, n_, True)]
            rb = [np.kron(np.eye(n_, dtype=np.int64), L.T) for L in self._slices(M.l, m, True)]
            return (Morphism(C.tensor(A, H), H, self._interleave(lb, h, False)),
                    Morphism(C.tensor(H, A), H, self._interleave(rb, h, True)))
        l = seq(C, comp_r(C, X, Y, Y), t(C, l_underline(C, Y, A, self.lact(N)), H))
        r = seq(C, comp_r(C, X, X, Y), t(C, H, l_underline(C, X, A, self.lact(M))))
        return l, r

    def _restrict(self, i: Morphism, l: Morphism, r: Morphism, label: str) -> Bimodule:
        C, A = self.base, self.alg.A
        H = i.source
        lr = C.factor_through(i, seq(C, l, t(C, A, i)))
        rr = C.factor_through(i, seq(C, r, t(C, i, A)))
        if lr is None or rr is None:
            raise DescentFailed("induced actions do not restrict to the equalizer")
        return self._make(H, lr, rr, label)

    # -- left internal hom -------------------------------------------------
    @_memo
    def lhom_data(self, M: Bimodule, N: Bimodule) -> tuple[Bimodule, Morphism]:
        """(M⊸_A N, inclusion i: M⊸_A N → M⊸N)."""
        C, A = self.base, self.alg.A
        X, Y = M.space, N.space
        u1 = lh(C, self.lact(M), Y)
        u2 = seq(C, lh(C, C.tensor(A, X), self.lact(N)), tensorality(C, A, X, Y))
        i = C.equalizer(u1, u2)
        l, r = self.lhom_actions(M, N)
        label = f"({self.describe(M)}⊸{self.describe(N)})" if (M.label and N.label) else ""
        return self._restrict(i, l, r, label), i

    def lhom(self, X, Y):
        return self.lhom_data(X, Y)[0]

    def incl(self, M, N) -> Morphism:
        return self.lhom_data(M, N)[1]

    def lhom_mor(self, f: Morphism, g: Morphism) -> Morphism:
        C = self.base
        src, i_src = self.lhom_data(f.target, g.source)
        tgt, i_tgt = self.lhom_data(f.source, g.target)
        h = C.factor_through(i_tgt, seq(C, C.lhom_mor(self.under(f), self.under(g)), i_src))
        if h is None:
            raise DescentFailed("hom functor does not restrict to equalizers")
        return Morphism(src, tgt, h.data)

    @_memo
    def ev(self, M, N) -> Morphism:
        C = self.base
        H, i = self.lhom_data(M, N)
        src, _, s = self.tensor_data(M, H)
        return Morphism(src, N, seq(C, C.ev(M.space, N.space), t(C, M.space, i), s).data)

    @_memo
    def coev(self, M, W) -> Morphism:
        C = self.base
        MW, p, _ = self.tensor_data(M, W)
        tgt, i = self.lhom_data(M, MW)
        h = C.factor_through(i, transpose(C, M.space, W.space, p))
        if h is None:
            raise DescentFailed("coevaluation does not factor through the equalizer")
        return Morphism(W, tgt, h.data)

    def closed_transpose(self, M, W, h: Morphism) -> Morphism:
        """h: M⊗_A W → Z  ↦  W → M⊸_A Z, computed in the base and restricted."""
        C = self.base
        _, p, _ = self.tensor_data(M, W)
        tgt, i = self.lhom_data(M, h.target)
        g = C.factor_through(i, transpose(C, M.space, W.space, seq(C, self.under(h), p)))
        if g is None:
            raise DescentFailed("transpose does not factor through the equalizer")
        return Morphism(W, tgt, g.data)

    def closed_rtranspose(self, M, W, h: Morphism) -> Morphism:
        """h: W⊗_A M → Z  ↦  W → Z⟜_A M."""
        C = self.base
        _, p, _ = self.tensor_data(W, M)
        tgt, i = self.rhom_data(h.target, M)
        g = C.factor_through(i, rtranspose(C, M.space, W.space, seq(C, self.under(h), p)))
        if g is None:
            raise DescentFailed("transpose does not factor through the equalizer")
        return Morphism(W, tgt, g.data)

    # -- right internal hom ------------------------------------------------
    @_memo
    def rhom_data(self, N: Bimodule, M: Bimodule) -> tuple[Bimodule, Morphism]:
        """(N⟜_A M, inclusion into N⟜M)."""
        C, A = self.base, self.alg.A
        X, Y = M.space, N.space
        u1 = rh(C, Y, self.ract(M))
        u2 = seq(C, rh(C, self.ract(N), C.tensor(X, A)), rtensorality(C, A, X, Y))
        i = C.equalizer(u1, u2)
        l, r = self.rhom_actions(N, M)
        label = f"({self.describe(N)}⟜{self.describe(M)})" if (M.label and N.label) else ""
        return self._restrict(i, l, r, label), i

    def rhom(self, Y, X):
        return self.rhom_data(Y, X)[0]

    def rincl(self, N, M) -> Morphism:
        return self.rhom_data(N, M)[1]

    def rhom_mor(self, g: Morphism, f: Morphism) -> Morphism:
        C = self.base
        src, i_src = self.rhom_data(g.source, f.target)
        tgt, i_tgt = self.rhom_data(g.target, f.source)
        h = C.factor_through(i_tgt, seq(C, C.rhom_mor(self.under(g), self.under(f)), i_src))
        if h is None:
            raise DescentFailed("right hom functor does not restrict to equalizers")
        return Morphism(src, tgt, h.data)

    @_memo
    def rev(self, M, N) -> Morphism:
        C = self.base
        H, i = self.rhom_data(N, M)
        src, _, s = self.tensor_data(H, M)
        return Morphism(src, N, seq(C, C.rev(M.space, N.space), t(C, i, M.space), s).data)

    @_memo
    def rcoev(self, M, W) -> Morphism:
        C = self.base
        WM, p, _ = self.tensor_data(W, M)
        tgt, i = self.rhom_data(WM, M)
        h = C.factor_through(i, rtranspose(C, M.space, W.space, p))
        if h is None:
            raise DescentFailed("right coevaluation does not factor through the equalizer")
        return Morphism(W, tgt, h.data)

    # -- sampling ----------------------------------------------------------
    def free(self, X: GradedSpace, label: str = "") -> Bimodule:
        """The free bimodule A⊗X⊗A."""
        C, A, mu = self.base, self.alg.A, self.alg.mu
        AX = C.tensor(A, X)
        F = C.tensor(AX, A)
        # a·(b⊗x⊗c) = ab⊗x⊗c and (b⊗x⊗c)·a = b⊗x⊗ca; carriers are flattened so
        # the associator is an identity matrix in the graded base
        l = seq(C, t(C, t(C, mu, X), A), t(C, C.assoc(A, A, X), A), C.assoc(A, AX, A))
        r = seq(C, t(C, AX, mu), C.assoc_inv(AX, A, A))
        return Bimodule(F, l.data, r.data, label)

    def regular(self) -> Bimodule:
        return self.unit


# ---------------------------------------------------------------------------
# left and local modules over commutative algebras


class LeftModuleCategory(BimoduleCategory):
    """Left A-modules over a commutative A, embedded as bimodules through B^±:
    the right action is l∘c^±_{M,A}."""

    def __init__(self, alg: AlgebraDatum, sign: int = 1, name: str | None = None, validate: bool = True):
        if not alg.is_commutative(sign):
            raise ValueError(f"{alg.name} is not commutative for the chosen braiding")
        super().__init__(alg, name or f"{alg.name}-mod{'+' if sign > 0 else '-'}", validate)
        self.sign = sign

    def right_from_left(self, X: GradedSpace, l: Morphism) -> Morphism:
        C = self.base
        return seq(C, l, braid(C, X, self.alg.A, self.sign))

    def module(self, space: GradedSpace, l, label: str = "") -> Bimodule:
        l = l if isinstance(l, Morphism) else Morphism(self.base.tensor(self.alg.A, space), space, l)
        return self.bimodule(space, l, self.right_from_left(space, l), label)

    def is_embedded(self, M: Bimodule) -> bool:
        C = self.base
        return C.equal(self.ract(M), self.right_from_left(M.space, self.lact(M)))


def is_local(alg: AlgebraDatum, M: Bimodule | tuple[GradedSpace, Morphism]) -> bool:
    """l = l∘c_{M,A}∘c_{A,M}."""
    C, A = alg.C, alg.A
    if isinstance(M, Bimodule):
        X, l = M.space, Morphism(C.tensor(A, M.space), M.space, M.l)
    else:
        X, l = M
    return C.equal(l, seq(C, l, C.braiding(X, A), C.braiding(A, X)))


class LocalModuleCategory(LeftModuleCategory):
    """Local modules over a commutative algebra, braided by descent of c."""

    braided = True

    def __init__(self, alg: AlgebraDatum, name: str | None = None, validate: bool = True):
        super().__init__(alg, 1, name or f"{alg.name}-loc", validate)

    def module(self, space, l, label: str = "") -> Bimodule:
        M = super().module(space, l, label)
        if self.validate and not is_local(self.alg, M):
            raise ValueError("module is not local")
        return M

    @_memo
    def braiding(self, M, N) -> Morphism:
        C = self.base
        src, _, s = self.tensor_data(M, N)
        tgt, p, _ = self.tensor_data(N, M)
        g = seq(C, p, C.braiding(M.space, N.space), s)
        # well-definedness: p_{N,M}∘c must vanish on the balancing relations
        if not C.equal(seq(C, g, self.proj(M, N)), seq(C, p, C.braiding(M.space, N.space))):
            raise DescentFailed("braiding does not descend to the tensor over A")
        return Morphism(src, tgt, g.data)


# ---------------------------------------------------------------------------
# duals of an algebra


def dual_algebra_coalgebra(gv: GVData, alg: AlgebraDatum) -> dict[str, Morphism]:
    """GV-coalgebra structures on D(A) and D'(A).

    ``Delta_D: DA → DA⅋DA`` and ``eps_D: DA → K``; ``Delta_Dp``, ``eps_Dp``
    likewise for D'A.  The ⅋-products are reached from β̄∘D(μ) and β∘D'(μ)
    through the identifications rid and lid.
    """
    C, K, A = gv.C, gv.K, alg.A
    DA, DpA = gv.D(A), gv.Dp(A)
    raw = seq(C, beta_bar(C, A, A, K), gv.D_mor(alg.mu))                    # DA → DA⟜A
    Delta_D = seq(C, gv.rid_inv(DA, DA), rh(C, DA, gv.d_inv(A)), raw)
    eps_D = seq(C, gamma_bar(C, K), gv.D_mor(alg.eta))
    raw_p = seq(C, beta(C, A, A, K), gv.Dp_mor(alg.mu))                      # D'A → A⊸D'A
    Delta_Dp = seq(C, gv.lid_inv(DpA, DpA), inv(C, lh(C, gv.d_tilde(A), DpA)), raw_p)
    eps_Dp = seq(C, gamma(C, K), gv.Dp_mor(alg.eta))
    return {"Delta_D": Delta_D, "eps_D": eps_D, "Delta_Dp": Delta_Dp, "eps_Dp": eps_Dp}


def coalgebra_laws(gv: GVData, X, Delta: Morphism, eps: Morphism) -> CheckReport:
    """Coassociativity and both counit laws for Δ: X → X⅋X, ε: X → K."""
    C = gv.C
    reps = []
    lhs = seq(C, gv.par_assoc(X, X, X), gv.par_mor(X, Delta), Delta)
    rhs = seq(C, gv.par_mor(Delta, X), Delta)
    reps.append(_eq(C, "coassociative", lhs, rhs))
    reps.append(_eq(C, "left counit", seq(C, gv.par_lunitor(X), gv.par_mor(eps, X), Delta), C.identity(X)))
    reps.append(_eq(C, "right counit", seq(C, gv.par_runitor(X), gv.par_mor(X, eps), Delta), C.identity(X)))
    return combine("coalgebra_laws", reps)


def _eq(C, name, lhs, rhs) -> CheckReport:
    ok = lhs.source == rhs.source and lhs.target == rhs.target and C.equal(lhs, rhs)
    return CheckReport(name, (), ok, "" if ok else "sides differ",
                       {} if ok else {"lhs": C.carrier(lhs), "rhs": C.carrier(rhs)})


def coalgebra_iso_check(gv: GVData, alg: AlgebraDatum, g: Morphism) -> CheckReport:
    """Comultiplicativity and counitality of g: D(A) → D'(A)."""
    C, K, A = gv.C, gv.K, alg.A
    lhs = seq(C, beta(C, A, A, K), gv.Dp_mor(alg.mu), g)
    rhs = seq(C, lh(C, A, g), iota(C, A, K, A), rh(C, g, A), beta_bar(C, A, A, K), gv.D_mor(alg.mu))
    r1 = _eq(C, "comultiplicative", lhs, rhs)
    lhs = seq(C, gamma(C, K), gv.Dp_mor(alg.eta), g)
    rhs = seq(C, gamma_bar(C, K), gv.D_mor(alg.eta))
    r2 = _eq(C, "counital", lhs, rhs)
    return combine("coalgebra_iso", [r1, r2])


def dual_actions(gv: GVData, alg: AlgebraDatum) -> tuple[Morphism, Morphism]:
    """Left action on D'A = A⊸K induced by μ, right action on DA = K⟜A."""
    C, K, A = gv.C, gv.K, alg.A
    lp = seq(C, comp_l(C, A, A, K), t(C, r_underline(C, A, A, alg.mu), gv.Dp(A)))
    rd = seq(C, comp_r(C, A, A, K), t(C, gv.D(A), l_underline(C, A, A, alg.mu)))
    return lp, rd


def default_coalgebra_iso(gv: GVData, alg: AlgebraDatum, sign: int = 1) -> Morphism:
    """φ^±_A: D'A → DA from the braiding of the base."""
    return gv.phi_pm(alg.A, sign)


def bimodule_from_coalgebra_iso(gv: GVData, alg: AlgebraDatum, f: Morphism,
                                check: bool = True) -> Bimodule:
    """Bimodule structure on D(A) from a ⅋-comultiplicative iso f: D'(A) → D(A)."""
    C, A = gv.C, alg.A
    f_inv = C.inverse(f)
    if f_inv is None:
        raise ComultiplicativityFailed("f is not invertible")
    if check:
        rep = coalgebra_iso_check(gv, alg, f_inv)
        if not rep.passed:
            raise ComultiplicativityFailed(rep.failures()[0].check)
    lp, rd = dual_actions(gv, alg)
    l = seq(C, f, lp, t(C, A, f_inv))
    return Bimodule(gv.D(A), l.data, rd.data, f"D({alg.name})")


def dualizing_bimodule(gv: GVData, alg: AlgebraDatum, f: Morphism | None = None,
                       check: bool = True) -> Bimodule:
    """D'(A) with its induced left action and the right action transported
    from D(A) along f (default φ⁺_A)."""
    C, A = gv.C, alg.A
    f = default_coalgebra_iso(gv, alg) if f is None else f
    f_inv = C.inverse(f)
    if f_inv is None:
        raise ComultiplicativityFailed("f is not invertible")
    if check:
        rep = coalgebra_iso_check(gv, alg, f_inv)
        if not rep.passed:
            raise ComultiplicativityFailed(rep.failures()[0].check)
    lp, rd = dual_actions(gv, alg)
    r = seq(C, f_inv, rd, t(C, f, A))
    return Bimodule(gv.Dp(A), lp.data, r.data, f"D'({alg.name})")


def phi_pm_algebra(gv: GVData, alg: AlgebraDatum, sign: int = 1) -> dict[str, Any]:
    """φ^±_A together with the right actions it intertwines."""
    C, A = gv.C, alg.A
    phi = gv.phi_pm(A, sign)
    lp, rd = dual_actions(gv, alg)
    r_dp = seq(C, lp, braid(C, gv.Dp(A), A, sign))
    ok = C.equal(seq(C, phi, r_dp), seq(C, rd, t(C, phi, A)))
    return {"phi": phi, "right_action_Dp": r_dp, "right_action_D": rd, "intertwines": ok}


def bimodule_gv(gv: GVData, cat: BimoduleCategory, f: Morphism | None = None, check: bool = True) -> GVData:
    """GV data on the bimodule (or module) category with dualizing object D'(A)."""
    if isinstance(cat, LeftModuleCategory):
        C, A = gv.C, cat.alg.A
        lp, _ = dual_actions(gv, cat.alg)
        K = cat.module(gv.Dp(A), lp, f"D'({cat.alg.name})")
    else:
        K = cat.adopt(dualizing_bimodule(gv, cat.alg, f, check))
        if cat.validate:
            probs = cat.bimodule_problems(K)
            if probs:
                raise ValueError(f"dualizing candidate is not a bimodule: {probs}")
    return GVData(cat, K)


def forgetful(gv_cat: GVData, gv_base: GVData, name: str = "U") -> FunctorData:
    """U: bimodules → base, lax monoidal through p and η, with υ⁰ = γ_K∘D'(η)
    when the dualizing object of the source is carried by D'(A)."""
    cat: BimoduleCategory = gv_cat.C
    C = gv_base.C
    alg = cat.alg

    def ob(M):
        return M.space

    def mor(f):
        return Morphism(f.source.space, f.target.space, f.data)

    def phi2(M, N):
        T, p, _ = cat.tensor_data(M, N)
        return p

    u0 = None
    if gv_cat.K.space == gv_base.Dp(alg.A):
        u0 = seq(C, gamma(C, gv_base.K), gv_base.Dp_mor(alg.eta))
    return FunctorData(gv_cat, gv_base, ob, mor, phi2, alg.eta, u0, True, name)


def lift_functor(gv_src: GVData, gv_tgt: GVData, ob: Callable, name: str = "B") -> FunctorData:
    """Strict monoidal functor between two module categories sharing carriers."""
    tgt = gv_tgt.C

    def mor(f):
        return Morphism(ob(f.source), ob(f.target), f.data)

    def phi2(M, N):
        return tgt.identity(tgt.tensor(ob(M), ob(N)))

    return FunctorData(gv_src, gv_tgt, ob, mor, phi2, tgt.identity(tgt.unit), None, True, name)


# ---------------------------------------------------------------------------
# enumeration


def enumerate_bimodules(cat: BimoduleCategory, spaces: Iterable[GradedSpace],
                        generators: list[int] | None = None, up_to_iso: bool = True) -> list[Bimodule]:
    """All bimodule structures on the given carriers, by brute force over the
    action matrices of algebra generators.

    ``generators`` lists basis indices of A generating it as an algebra;
    the actions of the other basis elements are reconstructed by
    multiplication.  Exhaustive, so only for tiny carriers.
    """
    C, A, mu, p = cat.base, cat.alg.A, cat.alg.mu, cat.p
    n = A.dim
    gens = generators if generators is not None else _algebra_generators(cat.alg)
    words = _basis_words(cat.alg, gens)
    out: list[Bimodule] = []
    seen: set = set()
    for X in spaces:
        m = X.dim
        candidates = _homogeneous_matrices(C, X, [A.degrees[g] for g in gens])
        for Ls in itertools.product(*candidates):
            lmats = _actions_from_gens(p, m, n, gens, words, Ls, left=True)
            if lmats is None:
                continue
            for Rs in itertools.product(*candidates):
                rmats = _actions_from_gens(p, m, n, gens, words, Rs, left=False)
                if rmats is None:
                    continue
                M = Bimodule(X, lmats, rmats)
                if cat.bimodule_problems(M):
                    continue
                key = _iso_key(C, M, gens, n) if up_to_iso else M
                if key in seen:
                    continue
                seen.add(key)
                out.append(M)
    return out


def enumerate_left_modules(cat: LeftModuleCategory, spaces: Iterable[GradedSpace],
                           generators: list[int] | None = None, local_only: bool = False,
                           up_to_iso: bool = True) -> list[Bimodule]:
    C, A, p = cat.base, cat.alg.A, cat.p
    n = A.dim
    gens = generators if generators is not None else _algebra_generators(cat.alg)
    words = _basis_words(cat.alg, gens)
    out, seen = [], set()
    for X in spaces:
        m = X.dim
        candidates = _homogeneous_matrices(C, X, [A.degrees[g] for g in gens])
        for Ls in itertools.product(*candidates):
            lmat = _actions_from_gens(p, m, n, gens, words, Ls, left=True)
            if lmat is None:
                continue
            l = Morphism(C.tensor(A, X), X, lmat)
            if not C.is_homogeneous(l):
                continue
            M = Bimodule(X, lmat, cat.right_from_left(X, l).data)
            if cat.bimodule_problems(M):
                continue
            if local_only and not is_local(cat.alg, M):
                continue
            key = _iso_key(C, M, gens, n) if up_to_iso else M
            if key in seen:
                continue
            seen.add(key)
            out.append(M)
    return out


def _algebra_generators(alg: AlgebraDatum) -> list[int]:
    """A small set of basis indices generating A (greedy, deterministic)."""
    n = alg.A.dim
    for k in range(0, n + 1):
        for gens in itertools.combinations(range(n), k):
            if _span_closure(alg, list(gens)) == n:
                return list(gens)
    return list(range(n))


def _span_closure(alg: AlgebraDatum, gens: list[int]) -> int:
    from .linalg import rank
    n, p = alg.A.dim, alg.C.p
    mu = alg.mu.data.a
    vecs = [alg.eta.data.a[:, 0] % p]
    for g in gens:
        e = np.zeros(n, dtype=np.int64)
        e[g] = 1
        vecs.append(e)
    basis = list(vecs)
    for _ in range(n):
        new = []
        for u in basis:
            for g in gens:
                e = np.zeros(n, dtype=np.int64)
                e[g] = 1
                new.append((mu @ np.kron(u, e)) % p)
        basis = basis + new
        r = rank(Matrix(np.stack(basis, axis=1), p))
        if r == n:
            return n
    return rank(Matrix(np.stack(basis, axis=1), p))


def _basis_words(alg, gens):
    """Expansion of each basis vector of A as a polynomial in the generators:
    list of (coefficient, word) pairs per basis index."""
    n, p = alg.A.dim, alg.C.p
    mu = alg.mu.data.a
    # BFS over words, row-reduce to express basis vectors
    words = [()]
    vecs = [alg.eta.data.a[:, 0] % p]
    frontier = [((), vecs[0])]
    for _ in range(n):
        nxt = []
        for w, v in frontier:
            for g in gens:
                e = np.zeros(n, dtype=np.int64)
                e[g] = 1
                nxt.append((w + (g,), (mu @ np.kron(v, e)) % p))
        for w, v in nxt:
            words.append(w)
            vecs.append(v)
        frontier = nxt
    from .linalg import solve
    B = Matrix(np.stack(vecs, axis=1), p)
    sol = solve(B, Matrix.identity(n, p))
    if sol is None:
        raise ValueError("generators do not generate the algebra")
    out = []
    for k in range(n):
        out.append([(int(sol.a[j, k]), words[j]) for j in range(len(words)) if sol.a[j, k]])
    return out


def _homogeneous_matrices(C, X, degs):
    out = []
    for d in degs:
        allowed = [(i, j) for i in range(X.dim) for j in range(X.dim)
                   if X.degrees[i] == C.add(X.degrees[j], d)]
        mats = []
        for vals in itertools.product(range(C.p), repeat=len(allowed)):
            M = np.zeros((X.dim, X.dim), dtype=np.int64)
            for (i, j), v in zip(allowed, vals):
                M[i, j] = v
            mats.append(M)
        out.append(mats)
    return out


def _actions_from_gens(p, m, n, gens, words, mats, left: bool):
    act = dict(zip(gens, mats))
    out = np.zeros((m, n * m), dtype=np.int64)
    for k in range(n):
        tot = np.zeros((m, m), dtype=np.int64)
        for c, w in words[k]:
            P = np.eye(m, dtype=np.int64)
            for g in w:
                # left: a·(b·v) so the word g1 g2 acts as L(g1) L(g2); right reverses
                P = (P @ act[g]) % p if left else (act[g] @ P) % p
            tot = (tot + c * P) % p
        for i in range(m):
            col = tot[:, i]
            if left:
                out[:, k * m + i] = col
            else:
                out[:, i * n + k] = col
    return Matrix(out, p)


def _iso_key(C, M: Bimodule, gens, n):
    """Canonical representative of the isomorphism class: the lexicographically
    least action data over all homogeneous changes of basis (brute force)."""
    X = M.space
    m = X.dim
    p = C.p
    best = None
    l = M.l.a.reshape(m, n, m)          # l[:, k, i] = e_k · v_i
    r = M.r.a.reshape(m, m, n)          # r[:, i, k] = v_i · e_k
    for P in _graded_invertibles(C, X):
        Pinv = try_invert(Matrix(P, p)).a
        key = []
        for g in gens:
            L = l[:, g, :]
            R = r[:, :, g]
            key.append(tuple(((Pinv @ L @ P) % p).ravel()))
            key.append(tuple(((Pinv @ R @ P) % p).ravel()))
        key = (X, tuple(key))
        if best is None or key < best:
            best = key
    return best


_GL_CACHE: dict = {}


def _graded_invertibles(C, X):
    key = (C.p, X)
    if key in _GL_CACHE:
        return _GL_CACHE[key]
    m = X.dim
    allowed = [(i, j) for i in range(m) for j in range(m) if X.degrees[i] == X.degrees[j]]
    out = []
    for vals in itertools.product(range(C.p), repeat=len(allowed)):
        P = np.zeros((m, m), dtype=np.int64)
        for (i, j), v in zip(allowed, vals):
            P[i, j] = v
        if try_invert(Matrix(P, C.p)) is not None:
            out.append(P)
    _GL_CACHE[key] = out
    return out
