"""Finite-dimensional G-graded vector spaces over F_p.

A graded space is a tuple of degrees, one per basis vector; tensor products
flatten lexicographically (left factor major), which makes the associator and
unitors identity matrices.  Internal homs are X⊸Y = X*⊗Y with basis (i, j)
standing for the map e_i ↦ e_j, and Y⟜X = Y⊗X* with basis (j, i).

G is a finite abelian group given by its cyclic orders; degrees are tuples of
residues.  A bicharacter χ: G×G → F_p^× supplies the braiding.  G = () gives
Vec, G = (2,) with χ(1,1) = −1 gives super vector spaces.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .kernel import EndpointMismatch, ModelCategory, Morphism
from .linalg import Matrix, PrimeField, cokernel, kernel_basis, kronecker, solve, try_invert

Degree = tuple[int, ...]


@dataclass(frozen=True)
class GradedSpace:
    group: tuple[int, ...]
    degrees: tuple[Degree, ...]

    @property
    def dim(self) -> int:
        return len(self.degrees)

    def graded_dims(self) -> dict[Degree, int]:
        out: dict[Degree, int] = {}
        for d in self.degrees:
            out[d] = out.get(d, 0) + 1
        return out

    def __repr__(self) -> str:
        if not self.group:
            return f"V{self.dim}"
        return "V[" + ",".join("".join(map(str, d)) for d in self.degrees) + "]"


class Bicharacter:
    """χ: G×G → F_p^× given on generators of the cyclic factors.

    ``gens[a][b]`` is χ(e_a, e_b) for generators e_a, e_b; values on other
    elements follow from multiplicativity in each slot.
    """

    def __init__(self, group: tuple[int, ...], p: int, gens: Sequence[Sequence[int]] | None = None):
        self.group = group
        self.p = p
        n = len(group)
        self.gens = [[1] * n for _ in range(n)] if gens is None else [[int(v) % p for v in row] for row in gens]
        for a in range(n):
            for b in range(n):
                v = self.gens[a][b]
                if v == 0:
                    raise ValueError("bicharacter values must be units")
                # χ(e_a, ·) must respect the order of e_b, and symmetrically
                if pow(v, group[b], p) != 1 or pow(v, group[a], p) != 1:
                    raise ValueError(f"χ(e{a},e{b}) = {v} incompatible with the group orders")

    def __call__(self, g: Degree, h: Degree) -> int:
        v = 1
        for a, ga in enumerate(g):
            for b, hb in enumerate(h):
                if ga and hb:
                    v = v * pow(self.gens[a][b], ga * hb, self.p) % self.p
        return v

    def is_symmetric(self) -> bool:
        els = list(itertools.product(*[range(n) for n in self.group]))
        return all(self(g, h) * self(h, g) % self.p == 1 for g in els for h in els)

    def table(self) -> dict[tuple[Degree, Degree], int]:
        els = list(itertools.product(*[range(n) for n in self.group]))
        return {(g, h): self(g, h) for g in els for h in els}


class GradedVec(ModelCategory):
    """The category of finite-dimensional G-graded F_p-vector spaces."""

    def __init__(self, p: int, group: tuple[int, ...] = (), chi: Bicharacter | None = None, name: str | None = None):
        self.field = PrimeField(p)
        self.p = p
        self.group = tuple(group)
        self.chi = chi if chi is not None else Bicharacter(self.group, p)
        if self.chi.group != self.group or self.chi.p != p:
            raise ValueError("bicharacter does not match grading group or field")
        self.braided = True
        self.zero_degree: Degree = tuple(0 for _ in self.group)
        self.unit = GradedSpace(self.group, (self.zero_degree,))
        self.name = name or (f"Vec(F_{p})" if not self.group else f"Vec_{self.group}(F_{p})")

    # -- objects ---------------------------------------------------------
    def space(self, degrees: Iterable) -> GradedSpace:
        degs = []
        for d in degrees:
            d = (d,) if isinstance(d, int) else tuple(d)
            if len(d) != len(self.group):
                raise ValueError(f"degree {d} not in group {self.group}")
            degs.append(tuple(int(x) % n for x, n in zip(d, self.group)))
        return GradedSpace(self.group, tuple(degs))

    def vec(self, n: int) -> GradedSpace:
        return GradedSpace(self.group, tuple(self.zero_degree for _ in range(n)))

    def super_space(self, even: int, odd: int) -> GradedSpace:
        if self.group != (2,):
            raise ValueError("super spaces need the group Z/2")
        return self.space([0] * even + [1] * odd)

    def _check(self, *objs: GradedSpace) -> None:
        for X in objs:
            if not isinstance(X, GradedSpace) or X.group != self.group:
                raise EndpointMismatch(f"object {X!r} is not a {self.name} object")

    def add(self, g: Degree, h: Degree) -> Degree:
        return tuple((a + b) % n for a, b, n in zip(g, h, self.group))

    def neg(self, g: Degree) -> Degree:
        return tuple((-a) % n for a, n in zip(g, self.group))

    def describe(self, X) -> str:
        return repr(X)

    # -- morphisms -------------------------------------------------------
    def mor(self, X: GradedSpace, Y: GradedSpace, M) -> Morphism:
        if not isinstance(M, Matrix):
            M = Matrix(np.asarray(M, dtype=np.int64).reshape(Y.dim, X.dim), self.p)
        if M.shape != (Y.dim, X.dim):
            raise EndpointMismatch(f"matrix shape {M.shape} does not match {Y.dim}x{X.dim}")
        return Morphism(X, Y, M)

    def is_homogeneous(self, f: Morphism) -> bool:
        X, Y = f.source, f.target
        a = f.data.a
        for i, dy in enumerate(Y.degrees):
            for j, dx in enumerate(X.degrees):
                if a[i, j] and dx != dy:
                    return False
        return True

    def identity(self, X) -> Morphism:
        self._check(X)
        return Morphism(X, X, Matrix.identity(X.dim, self.p))

    def zero(self, X, Y) -> Morphism:
        return Morphism(X, Y, Matrix.zeros(Y.dim, X.dim, self.p))

    def compose(self, g: Morphism, f: Morphism) -> Morphism:
        if g.source != f.target:
            raise EndpointMismatch(f"cannot compose {f.target!r} with {g.source!r}")
        return Morphism(f.source, g.target, g.data @ f.data)

    def add_mor(self, f: Morphism, g: Morphism) -> Morphism:
        if (f.source, f.target) != (g.source, g.target):
            raise EndpointMismatch("cannot add morphisms with different endpoints")
        return Morphism(f.source, f.target, f.data + g.data)

    def sub_mor(self, f: Morphism, g: Morphism) -> Morphism:
        if (f.source, f.target) != (g.source, g.target):
            raise EndpointMismatch("cannot subtract morphisms with different endpoints")
        return Morphism(f.source, f.target, f.data - g.data)

    def scale_mor(self, f: Morphism, c: int) -> Morphism:
        return Morphism(f.source, f.target, f.data.scale(c))

    def equal(self, f: Morphism, g: Morphism) -> bool:
        return f.source == g.source and f.target == g.target and f.data == g.data

    def inverse(self, f: Morphism) -> Morphism | None:
        m = try_invert(f.data)
        return None if m is None else Morphism(f.target, f.source, m)

    def carrier(self, f: Morphism):
        return f.data.tolist()

    # -- monoidal --------------------------------------------------------
    def tensor(self, X, Y) -> GradedSpace:
        self._check(X, Y)
        return GradedSpace(self.group, tuple(self.add(a, b) for a in X.degrees for b in Y.degrees))

    def tensor_mor(self, f: Morphism, g: Morphism) -> Morphism:
        return Morphism(self.tensor(f.source, g.source), self.tensor(f.target, g.target),
                        kronecker(f.data, g.data))

    def _eye(self, X, Y) -> Morphism:
        if X.dim != Y.dim:
            raise EndpointMismatch("identity-matrix structure map between unequal dimensions")
        return Morphism(X, Y, Matrix.identity(X.dim, self.p))

    def assoc(self, X, Y, Z) -> Morphism:
        return self._eye(self.tensor(X, self.tensor(Y, Z)), self.tensor(self.tensor(X, Y), Z))

    def assoc_inv(self, X, Y, Z) -> Morphism:
        return self._eye(self.tensor(self.tensor(X, Y), Z), self.tensor(X, self.tensor(Y, Z)))

    def lunitor(self, X) -> Morphism:
        return self._eye(self.tensor(self.unit, X), X)

    def lunitor_inv(self, X) -> Morphism:
        return self._eye(X, self.tensor(self.unit, X))

    def runitor(self, X) -> Morphism:
        return self._eye(self.tensor(X, self.unit), X)

    def runitor_inv(self, X) -> Morphism:
        return self._eye(X, self.tensor(X, self.unit))

    # -- closed ----------------------------------------------------------
    def lhom(self, X, Y) -> GradedSpace:
        self._check(X, Y)
        return GradedSpace(self.group, tuple(self.add(self.neg(a), b) for a in X.degrees for b in Y.degrees))

    def rhom(self, Y, X) -> GradedSpace:
        self._check(X, Y)
        return GradedSpace(self.group, tuple(self.add(b, self.neg(a)) for b in Y.degrees for a in X.degrees))

    def lhom_mor(self, f: Morphism, g: Morphism) -> Morphism:
        # (i, j) ↦ coefficient of g∘E_ji∘f
        return Morphism(self.lhom(f.target, g.source), self.lhom(f.source, g.target),
                        kronecker(f.data.T, g.data))

    def rhom_mor(self, g: Morphism, f: Morphism) -> Morphism:
        return Morphism(self.rhom(g.source, f.target), self.rhom(g.target, f.source),
                        kronecker(g.data, f.data.T))

    def ev(self, X, Y) -> Morphism:
        nx, ny = X.dim, Y.dim
        src = self.tensor(X, self.lhom(X, Y))
        M = np.zeros((ny, nx * nx * ny), dtype=np.int64)
        for k in range(nx):
            for j in range(ny):
                M[j, k * nx * ny + k * ny + j] = 1
        return Morphism(src, Y, Matrix._wrap(M, self.p))

    def coev(self, X, W) -> Morphism:
        nx, nw = X.dim, W.dim
        tgt = self.lhom(X, self.tensor(X, W))
        M = np.zeros((nx * nx * nw, nw), dtype=np.int64)
        for w in range(nw):
            for i in range(nx):
                M[i * nx * nw + i * nw + w, w] = 1
        return Morphism(W, tgt, Matrix._wrap(M, self.p))

    def rev(self, X, Y) -> Morphism:
        nx, ny = X.dim, Y.dim
        src = self.tensor(self.rhom(Y, X), X)
        M = np.zeros((ny, ny * nx * nx), dtype=np.int64)
        for j in range(ny):
            for i in range(nx):
                M[j, (j * nx + i) * nx + i] = 1
        return Morphism(src, Y, Matrix._wrap(M, self.p))

    def rcoev(self, X, W) -> Morphism:
        nx, nw = X.dim, W.dim
        tgt = self.rhom(self.tensor(W, X), X)
        M = np.zeros((nw * nx * nx, nw), dtype=np.int64)
        for w in range(nw):
            for i in range(nx):
                M[(w * nx + i) * nx + i, w] = 1
        return Morphism(W, tgt, Matrix._wrap(M, self.p))

    # -- closed forms for derived maps --------------------------------------
    def closed_comp_l(self, X, Y, Z) -> Morphism:
        """(X⊸Y)⊗(Y⊸Z) → X⊸Z on basis elements: (i,j)⊗(j,k) ↦ (i,k)."""
        nx, ny, nz = X.dim, Y.dim, Z.dim
        M = np.zeros((nx * nz, nx * ny * ny * nz), dtype=np.int64)
        for i in range(nx):
            for j in range(ny):
                for k in range(nz):
                    M[i * nz + k, (i * ny + j) * ny * nz + j * nz + k] = 1
        src = self.tensor(self.lhom(X, Y), self.lhom(Y, Z))
        return Morphism(src, self.lhom(X, Z), Matrix._wrap(M, self.p))

    def closed_comp_r(self, X, Y, Z) -> Morphism:
        """(Z⟜Y)⊗(Y⟜X) → Z⟜X on basis elements: (k,j)⊗(j,i) ↦ (k,i)."""
        nx, ny, nz = X.dim, Y.dim, Z.dim
        M = np.zeros((nz * nx, nz * ny * ny * nx), dtype=np.int64)
        for k in range(nz):
            for j in range(ny):
                for i in range(nx):
                    M[k * nx + i, (k * ny + j) * ny * nx + j * nx + i] = 1
        src = self.tensor(self.rhom(Z, Y), self.rhom(Y, X))
        return Morphism(src, self.rhom(Z, X), Matrix._wrap(M, self.p))

    def closed_tensorality(self, X, Y, Z) -> Morphism:
        """(Y⊸Z) → (X⊗Y)⊸(X⊗Z), f ↦ id_X⊗f."""
        nx, ny, nz = X.dim, Y.dim, Z.dim
        M = np.zeros((nx * ny * nx * nz, ny * nz), dtype=np.int64)
        for j in range(ny):
            for k in range(nz):
                for i in range(nx):
                    M[(i * ny + j) * nx * nz + i * nz + k, j * nz + k] = 1
        tgt = self.lhom(self.tensor(X, Y), self.tensor(X, Z))
        return Morphism(self.lhom(Y, Z), tgt, Matrix._wrap(M, self.p))

    def closed_rtensorality(self, X, Y, Z) -> Morphism:
        """(Z⟜Y) → (Z⊗X)⟜(Y⊗X), f ↦ f⊗id_X."""
        nx, ny, nz = X.dim, Y.dim, Z.dim
        M = np.zeros((nz * nx * ny * nx, nz * ny), dtype=np.int64)
        for k in range(nz):
            for j in range(ny):
                for i in range(nx):
                    M[(k * nx + i) * ny * nx + j * nx + i, k * ny + j] = 1
        tgt = self.rhom(self.tensor(Z, X), self.tensor(Y, X))
        return Morphism(self.rhom(Z, Y), tgt, Matrix._wrap(M, self.p))

    # -- braiding --------------------------------------------------------
    def braiding(self, X, Y) -> Morphism:
        nx, ny = X.dim, Y.dim
        M = np.zeros((nx * ny, nx * ny), dtype=np.int64)
        for a in range(nx):
            for b in range(ny):
                M[b * nx + a, a * ny + b] = self.chi(X.degrees[a], Y.degrees[b])
        return Morphism(self.tensor(X, Y), self.tensor(Y, X), Matrix._wrap(M, self.p))

    # -- kernels, cokernels, factorization ---------------------------------
    def _blocks(self, X: GradedSpace) -> dict[Degree, list[int]]:
        out: dict[Degree, list[int]] = {}
        for i, d in enumerate(X.degrees):
            out.setdefault(d, []).append(i)
        return out

    def kernel(self, f: Morphism) -> Morphism:
        """Inclusion of the kernel of a homogeneous map, computed degreewise."""
        X, Y = f.source, f.target
        a = f.data.a
        yb = self._blocks(Y)
        degs: list[Degree] = []
        cols: list[np.ndarray] = []
        for g, xi in sorted(self._blocks(X).items()):
            yi = yb.get(g, [])
            sub = Matrix._wrap(a[np.ix_(yi, xi)] if yi else np.zeros((0, len(xi)), dtype=np.int64), self.p)
            kb = kernel_basis(sub).a
            for j in range(kb.shape[1]):
                v = np.zeros(X.dim, dtype=np.int64)
                v[xi] = kb[:, j]
                cols.append(v)
                degs.append(g)
        Kr = GradedSpace(self.group, tuple(degs))
        M = np.stack(cols, axis=1) if cols else np.zeros((X.dim, 0), dtype=np.int64)
        return Morphism(Kr, X, Matrix._wrap(M, self.p))

    def cokernel(self, f: Morphism) -> tuple[Morphism, Morphism]:
        """Projection Y → coker f and a homogeneous section of it."""
        X, Y = f.source, f.target
        a = f.data.a
        xb = self._blocks(X)
        degs: list[Degree] = []
        rows: list[np.ndarray] = []
        scols: list[np.ndarray] = []
        for g, yi in sorted(self._blocks(Y).items()):
            xi = xb.get(g, [])
            sub = Matrix._wrap(a[np.ix_(yi, xi)] if xi else np.zeros((len(yi), 0), dtype=np.int64), self.p)
            ck = cokernel(sub)
            for k in range(ck.dim):
                r = np.zeros(Y.dim, dtype=np.int64)
                r[yi] = ck.proj.a[k]
                s = np.zeros(Y.dim, dtype=np.int64)
                s[yi] = ck.section.a[:, k]
                rows.append(r)
                scols.append(s)
                degs.append(g)
        Q = GradedSpace(self.group, tuple(degs))
        P = np.stack(rows, axis=0) if rows else np.zeros((0, Y.dim), dtype=np.int64)
        S_ = np.stack(scols, axis=1) if scols else np.zeros((Y.dim, 0), dtype=np.int64)
        return Morphism(Y, Q, Matrix._wrap(P, self.p)), Morphism(Q, Y, Matrix._wrap(S_, self.p))

    def coequalizer(self, f: Morphism, g: Morphism) -> tuple[Morphism, Morphism]:
        return self.cokernel(self.sub_mor(f, g))

    def equalizer(self, f: Morphism, g: Morphism) -> Morphism:
        return self.kernel(self.sub_mor(f, g))

    def section(self, e: Morphism) -> Morphism:
        """A homogeneous right inverse of a surjection."""
        s = self.factor_through(e, self.identity(e.target))
        if s is None:
            raise ValueError("section requested for a non-surjective map")
        return s

    def factor_through(self, a: Morphism, b: Morphism) -> Morphism | None:
        """A homogeneous x with a∘x = b, or None if b does not factor through a."""
        if a.target != b.target:
            raise EndpointMismatch("factor_through: targets differ")
        W, X = b.source, a.source
        out = np.zeros((X.dim, W.dim), dtype=np.int64)
        xb = self._blocks(X)
        for g, wi in self._blocks(W).items():
            xi = xb.get(g, [])
            if not xi:
                if b.data.a[:, wi].any():
                    return None
                continue
            sol = solve(Matrix._wrap(a.data.a[:, xi], self.p), Matrix._wrap(b.data.a[:, wi], self.p))
            if sol is None:
                return None
            out[np.ix_(xi, wi)] = sol.a
        return Morphism(W, X, Matrix._wrap(out, self.p))

    # -- sampling --------------------------------------------------------
    def random_mor(self, rng: np.random.Generator, X, Y) -> Morphism:
        """Uniform random degree-preserving map X → Y."""
        M = rng.integers(0, self.p, size=(Y.dim, X.dim))
        for i, dy in enumerate(Y.degrees):
            for j, dx in enumerate(X.degrees):
                if dx != dy:
                    M[i, j] = 0
        return Morphism(X, Y, Matrix(M, self.p))

    def objects_up_to(self, max_dim: int, min_dim: int = 0) -> list[GradedSpace]:
        """All spaces with sorted degrees and min_dim ≤ total dim ≤ max_dim."""
        els = list(itertools.product(*[range(n) for n in self.group]))
        out = []
        for n in range(min_dim, max_dim + 1):
            for combo in itertools.combinations_with_replacement(els, n):
                out.append(GradedSpace(self.group, tuple(combo)))
        return out


def vec(p: int) -> GradedVec:
    """Plain finite-dimensional vector spaces over F_p."""
    return GradedVec(p)


def svec(p: int) -> GradedVec:
    """Super vector spaces over F_p (p odd) with the Koszul sign braiding."""
    if p == 2:
        raise ValueError("super vector spaces need p odd so that -1 != 1")
    return GradedVec(p, (2,), Bicharacter((2,), p, [[p - 1]]), name=f"sVec(F_{p})")


def gv_structure(C: GradedVec, K: GradedSpace | None = None):
    """GV data with dualizing candidate K (default: the unit, an r-category)."""
    from .duality import GVData

    return GVData(C, C.unit if K is None else K)


def gv_tensor(C: GradedVec, X, Y) -> GradedSpace:
    return C.tensor(X, Y)


def gv_hom_left(C: GradedVec, X, Y) -> GradedSpace:
    return C.lhom(X, Y)
