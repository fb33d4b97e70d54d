"""Hopf algebroids over commutative truncated polynomial bases, by presentation.

Algebras are given by generators and noncommutative relations and are never
materialized; only their finite-dimensional modules are, as one matrix per
generator.  The base R = F_p[x_1..x_n]/(x_i^{e_i}) acts through the x_i, and
source and target coincide (s = t), so B-modules sit over left R-modules and
the monoidal structure is the one of R-modules with generator actions added
through Δ.  Internal homs get their actions from the antipode:

* on X⊸Y (adjoint to X⊗−):  (b·f)(m) = Σ b₍₂₎ f(S⁻¹(b₍₁₎) m)
* on Y⟜X (adjoint to −⊗X):  (b·f)(m) = Σ b₍₁₎ f(S(b₍₂₎) m)

Both are restricted to the R-linear homs and validated by the relation check
and, downstream, by the adjunction and snake batteries.
"""
from __future__ import annotations

import itertools
import re
import threading
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .duality import FunctorData, GVData
from .graded import GradedVec, gv_structure, vec
from .kernel import EndpointMismatch, ModelCategory, Morphism, StructureMissing, seq, t, transpose, rtranspose
from .linalg import Matrix, kronecker, rank
from .modules import (
    AlgebraDatum,
    Bimodule,
    DescentFailed,
    LeftModuleCategory,
    _memo,
    algebra_from_table,
    bimodule_gv,
)
from .reports import CheckReport, combine

Word = tuple  # tuple[str, ...]
Poly = dict   # dict[Word, int]


class PresentationError(ValueError):
    pass


class RelationViolated(ValueError):
    """A generator assignment does not satisfy the defining relations."""


# ---------------------------------------------------------------------------
# noncommutative polynomials


def poly_clean(f: Mapping, p: int) -> dict:
    return {w: c % p for w, c in f.items() if c % p}


def poly_add(f: Mapping, g: Mapping, p: int, scale: int = 1) -> dict:
    out = dict(f)
    for w, c in g.items():
        out[w] = out.get(w, 0) + scale * c
    return poly_clean(out, p)


def poly_mul(f: Mapping, g: Mapping, p: int) -> dict:
    out: dict = {}
    for w1, c1 in f.items():
        for w2, c2 in g.items():
            w = tuple(w1) + tuple(w2)
            out[w] = out.get(w, 0) + c1 * c2
    return poly_clean(out, p)


def poly_scale(f: Mapping, c: int, p: int) -> dict:
    return poly_clean({w: c * v for w, v in f.items()}, p)


def word(*names: str) -> dict:
    return {tuple(names): 1}


def format_poly(f: Mapping) -> str:
    if not f:
        return "0"
    terms = []
    for w, c in sorted(f.items(), key=lambda kv: (len(kv[0]), kv[0])):
        mono = "*".join(w) if w else "1"
        terms.append(mono if c == 1 and w else f"{c}*{mono}" if w else str(c))
    return " + ".join(terms)


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(.))")


def parse_poly(text: str, generators: Sequence[str], p: int) -> dict:
    """Parse ``"d*x - x*d - 1"`` style input.

    Grammar: sums of products of integers, generator names (optionally
    raised to a nonnegative integer power with ``^``) and parenthesized
    sums.  Juxtaposition multiplies.
    """
    toks = []
    for num, name, other in _TOKEN.findall(text):
        if num:
            toks.append(("num", int(num)))
        elif name:
            if name not in generators:
                raise PresentationError(f"unknown generator {name!r} in {text!r}")
            toks.append(("gen", name))
        elif other.strip():
            toks.append(("op", other))
    pos = 0

    def peek():
        return toks[pos] if pos < len(toks) else (None, None)

    def take():
        nonlocal pos
        pos += 1
        return toks[pos - 1]

    def expr():
        sign = 1
        if peek() == ("op", "-"):
            take()
            sign = -1
        elif peek() == ("op", "+"):
            take()
        acc = poly_scale(product(), sign, p)
        while peek() in (("op", "+"), ("op", "-")):
            sign = 1 if take()[1] == "+" else -1
            acc = poly_add(acc, product(), p, sign)
        return acc

    def product():
        acc = factor()
        while True:
            kind, val = peek()
            if (kind, val) == ("op", "*"):
                take()
                acc = poly_mul(acc, factor(), p)
            elif kind in ("num", "gen") or (kind, val) == ("op", "("):
                acc = poly_mul(acc, factor(), p)
            else:
                return acc

    def factor():
        kind, val = take() if pos < len(toks) else (None, None)
        if kind == "num":
            base = {(): val % p} if val % p else {}
        elif kind == "gen":
            base = word(val)
        elif (kind, val) == ("op", "("):
            base = expr()
            if take() != ("op", ")"):
                raise PresentationError(f"unbalanced parentheses in {text!r}")
        else:
            raise PresentationError(f"unexpected token {val!r} in {text!r}")
        if peek() == ("op", "^"):
            take()
            k, e = take()
            if k != "num":
                raise PresentationError(f"exponent must be an integer in {text!r}")
            out = {(): 1}
            for _ in range(e):
                out = poly_mul(out, base, p)
            return out
        return base

    try:
        out = expr()
    except IndexError:
        raise PresentationError(f"truncated expression {text!r}") from None
    if pos != len(toks):
        raise PresentationError(f"trailing input in {text!r}")
    return out


def evaluate(f: Mapping, mats: Mapping[str, Matrix], n: int, p: int) -> Matrix:
    """The operator of a polynomial under a generator assignment."""
    acc = np.zeros((n, n), dtype=np.int64)
    cache: dict = {(): np.eye(n, dtype=np.int64)}
    for w, c in f.items():
        key = ()
        m = cache[()]
        for g in w:
            key = key + (g,)
            if key not in cache:
                cache[key] = (m @ mats[g].a) % p
            m = cache[key]
        acc = (acc + c * m) % p
    return Matrix._wrap(acc, p)


@dataclass(frozen=True)
class PresentedAlgebra:
    """A finitely presented F_p-algebra; relations are read as ``= 0``."""

    p: int
    generators: tuple
    relations: tuple          # tuple of polynomials as sorted item tuples
    degrees: tuple = ()
    name: str = field(default="B", compare=False)

    @classmethod
    def build(cls, p: int, generators: Sequence[str], relations: Iterable, degrees: Sequence[int] = (),
              name: str = "B") -> "PresentedAlgebra":
        gens = tuple(generators)
        if len(set(gens)) != len(gens):
            raise PresentationError("duplicate generator names")
        rels = []
        for r in relations:
            f = parse_poly(r, gens, p) if isinstance(r, str) else poly_clean(r, p)
            for w in f:
                if any(g not in gens for g in w):
                    raise PresentationError(f"relation uses an unknown generator: {format_poly(f)}")
            if f:
                rels.append(tuple(sorted(f.items())))
        if degrees and len(degrees) != len(gens):
            raise PresentationError("one degree per generator expected")
        return cls(p, gens, tuple(rels), tuple(degrees), name)

    def relation_polys(self) -> list[dict]:
        return [dict(r) for r in self.relations]

    def failing_relations(self, mats: Mapping[str, Matrix]) -> list[str]:
        dims = {m.shape for m in mats.values()}
        if len(dims) != 1 or set(mats) != set(self.generators):
            raise RelationViolated("need one square matrix of a common size per generator")
        (n, m), = dims
        if n != m:
            raise RelationViolated("generator matrices must be square")
        return [format_poly(f) for f in self.relation_polys()
                if evaluate(f, mats, n, self.p).a.any()]

    def same_presentation(self, other: "PresentedAlgebra") -> bool:
        return (self.p == other.p and set(self.generators) == set(other.generators)
                and set(self.relations) == set(other.relations))


# ---------------------------------------------------------------------------
# commutative truncated polynomial bases


class TruncatedPolynomialRing:
    """R = F_p[x_1..x_n]/(x_i^{e_i}) with the monomial basis in lexicographic
    exponent order (for one variable: 1, x, ..., x^{e-1})."""

    def __init__(self, p: int, exponents: Sequence[int], names: Sequence[str] | None = None,
                 C: GradedVec | None = None, name: str | None = None):
        exponents = tuple(int(e) for e in exponents)
        if not exponents or min(exponents) < 1:
            raise ValueError("exponents must be positive")
        self.p = p
        self.exponents = exponents
        if names is None:
            names = ("x",) if len(exponents) == 1 else tuple(f"x{i + 1}" for i in range(len(exponents)))
        self.names = tuple(names)
        if len(self.names) != len(exponents):
            raise ValueError("one name per variable expected")
        self.C = C or vec(p)
        self.monomials = list(itertools.product(*(range(e) for e in exponents)))
        self.index = {m: i for i, m in enumerate(self.monomials)}
        N = len(self.monomials)

        def table(i, j):
            s = tuple(a + b for a, b in zip(self.monomials[i], self.monomials[j]))
            return {self.index[s]: 1} if s in self.index else {}

        unit = [1] + [0] * (N - 1)
        label = name or f"F_{p}[{','.join(self.names)}]/({','.join(f'{v}^{e}' for v, e in zip(self.names, exponents))})"
        self.alg: AlgebraDatum = algebra_from_table(self.C, self.C.vec(N), table, unit, label)
        self.name = label

    @property
    def dim(self) -> int:
        return len(self.monomials)

    def monomial_vector(self, exps: Sequence[int]) -> np.ndarray:
        v = np.zeros(self.dim, dtype=np.int64)
        exps = tuple(exps)
        if exps in self.index:
            v[self.index[exps]] = 1
        return v

    def var_vector(self, name: str) -> np.ndarray:
        i = self.names.index(name)
        return self.monomial_vector(tuple(1 if k == i else 0 for k in range(len(self.names))))

    def one(self) -> np.ndarray:
        return self.monomial_vector((0,) * len(self.names))

    def mult_matrix(self, r: Sequence[int]) -> Matrix:
        """Multiplication by the element with coordinates r."""
        mu = self.alg.mu.data.a
        N = self.dim
        r = np.asarray(r, dtype=np.int64)
        # column j: Σ_k r_k e_k e_j
        M = sum(r[k] * mu[:, k * N:(k + 1) * N] for k in range(N))
        return Matrix(M, self.p)

    def var_matrix(self, name: str) -> Matrix:
        return self.mult_matrix(self.var_vector(name))

    def monomial_word(self, exps: Sequence[int]) -> tuple:
        return tuple(itertools.chain.from_iterable([v] * e for v, e in zip(self.names, exps)))

    def to_poly(self, r: Sequence[int]) -> dict:
        return poly_clean({self.monomial_word(m): int(c) for m, c in zip(self.monomials, r)}, self.p)

    def relations(self) -> list[dict]:
        out = [word(*([v] * e)) for v, e in zip(self.names, self.exponents)]
        for a, b in itertools.combinations(self.names, 2):
            out.append(poly_add(word(a, b), word(b, a), self.p, -1))
        return out

    def derivation_matrix(self, images: Mapping[str, Sequence[int]]) -> Matrix:
        """The derivation with D(x_i) = images[x_i], by the Leibniz rule on monomials."""
        p, N = self.p, self.dim
        D = np.zeros((N, N), dtype=np.int64)
        for j, m in enumerate(self.monomials):
            for i, v in enumerate(self.names):
                if m[i] == 0:
                    continue
                lower = list(m)
                lower[i] -= 1
                img = np.asarray(images.get(v, np.zeros(N)), dtype=np.int64)
                D[:, j] += m[i] * (self.mult_matrix(self.monomial_vector(lower)).a @ img)
        return Matrix(D % p, p)

    def is_derivation(self, D: Matrix) -> bool:
        mu = self.alg.mu.data
        I = Matrix.identity(self.dim, self.p)
        return D @ mu == mu @ (kronecker(D, I) + kronecker(I, D))

    def is_automorphism(self, A: Matrix) -> bool:
        mu = self.alg.mu.data
        return (A @ mu == mu @ kronecker(A, A)) and bool(np.array_equal((A.a @ self.one()) % self.p, self.one()))

    def top_form(self) -> np.ndarray:
        """Coefficient of the top monomial x_1^{e_1-1}...x_n^{e_n-1}, as a row."""
        return self.monomial_vector(tuple(e - 1 for e in self.exponents))

    def module_action(self, space_dim: int, var_mats: Mapping[str, Matrix]) -> Matrix:
        """The action R⊗V → V determined by commuting variable matrices."""
        p = self.p
        cols = []
        for m in self.monomials:
            op = np.eye(space_dim, dtype=np.int64)
            for v, e in zip(self.names, m):
                for _ in range(e):
                    op = (op @ var_mats[v].a) % p
            cols.append(op)
        return Matrix(np.hstack(cols) if cols else np.zeros((space_dim, 0), dtype=np.int64), p)


# ---------------------------------------------------------------------------
# algebroid data


@dataclass(eq=False)
class AlgebroidStructure:
    """A ×_R-bialgebra with s = t over a truncated polynomial base, by generators.

    ``delta[b]`` lists terms (c, w1, w2) of Δ(b) = Σ c w1⊠w2; ``counit[b]`` is
    ε(b) ∈ R; ``base_action[b]`` is the operator b▷ on R.  Base variables have
    Δ(x) = x⊠1, ε(x) = x and act by multiplication.  ``antipode`` and
    ``antipode_inv`` map every generator to a polynomial, or are None.
    """

    presentation: PresentedAlgebra
    base: TruncatedPolynomialRing
    extra: tuple
    delta: dict
    counit: dict
    base_action: dict
    antipode: dict | None = None
    antipode_inv: dict | None = None
    name: str = "B"
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        gens = set(self.presentation.generators)
        if set(self.base.names) | set(self.extra) != gens or set(self.base.names) & set(self.extra):
            raise PresentationError("generators must be the base variables plus the extra generators")
        for b in self.extra:
            for key in ("delta", "counit", "base_action"):
                if b not in getattr(self, key):
                    raise PresentationError(f"{key} missing for generator {b}")
        problems = self.problems()
        if problems:
            raise PresentationError(f"{self.name}: {'; '.join(problems)}")

    @property
    def p(self) -> int:
        return self.base.p

    @property
    def has_antipode(self) -> bool:
        return self.antipode is not None and self.antipode_inv is not None

    def unit_matrices(self) -> dict[str, Matrix]:
        mats = {v: self.base.var_matrix(v) for v in self.base.names}
        mats.update(self.base_action)
        return mats

    def act_on_base(self, f: Mapping) -> Matrix:
        return evaluate(f, self.unit_matrices(), self.base.dim, self.p)

    def problems(self) -> list[str]:
        out = []
        bad = self.presentation.failing_relations(self.unit_matrices())
        if bad:
            out.append(f"the base action violates {bad}")
        one = self.base.one()
        for b in self.extra:
            img = (self.base_action[b].a @ one) % self.p
            if not np.array_equal(img, np.asarray(self.counit[b]) % self.p):
                out.append(f"ε({b}) differs from {b}▷1")
        if self.has_antipode:
            for b in self.presentation.generators:
                for key in ("antipode", "antipode_inv"):
                    if b not in getattr(self, key):
                        out.append(f"{key} missing for {b}")
        return out

    # -- comultiplication and antipode on words ----------------------------
    def coproduct(self, w: Sequence[str]) -> list[tuple[int, tuple, tuple]]:
        terms = [(1, (), ())]
        for g in w:
            dg = [(1, (g,), ())] if g in self.base.names else self.delta[g]
            terms = [(c1 * c2 % self.p, a1 + a2, b1 + b2) for c1, a1, b1 in terms for c2, a2, b2 in dg]
        return [tm for tm in terms if tm[0]]

    def coproduct_poly(self, f: Mapping) -> list[tuple[int, tuple, tuple]]:
        out = []
        for w, c in f.items():
            out.extend((c * d % self.p, a, b) for d, a, b in self.coproduct(w))
        return [tm for tm in out if tm[0]]

    def apply_antipode(self, f: Mapping, inverse: bool = False) -> dict:
        S = self.antipode_inv if inverse else self.antipode
        if S is None:
            raise StructureMissing(f"{self.name} carries no antipode")
        out: dict = {}
        for w, c in f.items():
            img = {(): c}
            for g in reversed(w):
                img = poly_mul(img, S[g], self.p)
            out = poly_add(out, img, self.p)
        return out


@dataclass(frozen=True)
class AlgebroidModule:
    """A finite-dimensional B-module: an R-module plus one matrix per extra generator."""

    module: Bimodule
    acts: tuple
    label: str = field(default="", compare=False, hash=False)

    @property
    def space(self):
        return self.module.space

    @property
    def dim(self) -> int:
        return self.module.dim

    def __repr__(self) -> str:
        return self.label or f"BMod(dim {self.dim})"


class AlgebroidModuleCategory(ModelCategory):
    """Finite-dimensional modules over an algebroid, monoidal over ⊗_R."""

    braided = False

    def __init__(self, B: AlgebroidStructure, validate: bool = True, name: str | None = None):
        self.B = B
        self.R = B.base
        self.p = B.p
        self.base_cat = LeftModuleCategory(self.R.alg, name=f"{self.R.name}-mod")
        self.base: GradedVec = self.R.C
        self.validate = validate
        self.name = name or f"{B.name}-mod"
        self._cache: dict = {}
        self._lock = threading.Lock()
        Cb = self.base_cat
        self.unit = self._checked(Cb.unit, tuple(B.base_action[b] for b in B.extra), "R")

    # -- objects -----------------------------------------------------------
    def generator_matrices(self, M: AlgebroidModule) -> dict[str, Matrix]:
        n = M.dim
        l = M.module.l.a
        mats = {}
        for i, v in enumerate(self.R.names):
            k = self.R.index.get(tuple(1 if j == i else 0 for j in range(len(self.R.names))))
            mats[v] = (Matrix.zeros(n, n, self.p) if k is None
                       else Matrix._wrap(l[:, k * n:(k + 1) * n].copy(), self.p))
        for b, A in zip(self.B.extra, M.acts):
            mats[b] = A
        return mats

    def poly_matrix(self, M: AlgebroidModule, f: Mapping) -> Matrix:
        return evaluate(f, self.generator_matrices(M), M.dim, self.p)

    def word_matrix(self, M: AlgebroidModule, w: Sequence[str]) -> Matrix:
        return self.poly_matrix(M, {tuple(w): 1})

    def relation_problems(self, M: AlgebroidModule) -> list[str]:
        return self.B.presentation.failing_relations(self.generator_matrices(M))

    def _checked(self, Mb: Bimodule, acts: tuple, label: str = "") -> AlgebroidModule:
        if len(acts) != len(self.B.extra):
            raise RelationViolated("one matrix per extra generator expected")
        for A in acts:
            if A.shape != (Mb.dim, Mb.dim):
                raise RelationViolated("action matrix has the wrong size")
        M = AlgebroidModule(Mb, tuple(acts), label)
        if self.validate:
            bad = self.relation_problems(M)
            if bad:
                raise RelationViolated(f"relations fail: {bad}")
        return M

    def module(self, mats: Mapping[str, object], label: str = "") -> AlgebroidModule:
        """A module from one square matrix per generator."""
        mats = {g: m if isinstance(m, Matrix) else Matrix(m, self.p) for g, m in mats.items()}
        if set(mats) != set(self.B.presentation.generators):
            raise RelationViolated("one matrix per generator expected")
        n = next(iter(mats.values())).rows
        if self.validate:
            bad = self.B.presentation.failing_relations(mats)
            if bad:
                raise RelationViolated(f"relations fail: {bad}")
        space = self.base.vec(n)
        l = self.R.module_action(n, {v: mats[v] for v in self.R.names})
        Mb = self.base_cat.module(space, l, label)
        return self._checked(Mb, tuple(mats[b] for b in self.B.extra), label)

    def from_base(self, Mb: Bimodule, acts: Sequence, label: str = "") -> AlgebroidModule:
        acts = tuple(a if isinstance(a, Matrix) else Matrix(a, self.p) for a in acts)
        return self._checked(Mb, acts, label)

    # -- morphisms ---------------------------------------------------------
    def under(self, f: Morphism) -> Morphism:
        return Morphism(f.source.module, f.target.module, f.data)

    def _lift(self, M, N, g: Morphism) -> Morphism:
        return Morphism(M, N, g.data)

    def is_morphism(self, f: Morphism) -> bool:
        M, N = f.source, f.target
        if not self.base_cat.is_morphism(self.under(f)):
            return False
        return all(f.data @ A == B_ @ f.data for A, B_ in zip(M.acts, N.acts))

    def mor(self, M: AlgebroidModule, N: AlgebroidModule, mat) -> Morphism:
        g = self.base.mor(M.space, N.space, mat)
        f = Morphism(M, N, g.data)
        if self.validate and not self.is_morphism(f):
            raise ValueError("matrix is not a module morphism")
        return f

    def identity(self, X) -> Morphism:
        return Morphism(X, X, Matrix.identity(X.dim, self.p))

    def compose(self, g: Morphism, f: Morphism) -> Morphism:
        if g.source != f.target:
            raise EndpointMismatch("cannot compose module maps with mismatched endpoints")
        return Morphism(f.source, g.target, g.data @ f.data)

    def equal(self, f: Morphism, g: Morphism) -> bool:
        return f.source == g.source and f.target == g.target and f.data == g.data

    def inverse(self, f: Morphism) -> Morphism | None:
        h = self.base.inverse(Morphism(f.source.space, f.target.space, f.data))
        return None if h is None else Morphism(f.target, f.source, h.data)

    def describe(self, X) -> str:
        return repr(X)

    def carrier(self, f: Morphism):
        return self.base.carrier(Morphism(f.source.space, f.target.space, f.data))

    # -- tensor over R -------------------------------------------------------
    def _descend_op(self, op: Matrix, p: Morphism, s: Morphism) -> Matrix:
        act = p.data @ op @ s.data
        if act @ p.data != p.data @ op:
            raise DescentFailed("generator action does not descend to the tensor over R")
        return act

    @_memo
    def tensor_data(self, M: AlgebroidModule, N: AlgebroidModule):
        Tb, p, s = self.base_cat.tensor_data(M.module, N.module)
        mM, mN = self.generator_matrices(M), self.generator_matrices(N)
        acts = []
        for b in self.B.extra:
            op = sum((kronecker(evaluate({w1: 1}, mM, M.dim, self.p),
                                evaluate({w2: 1}, mN, N.dim, self.p)).scale(c)
                      for c, w1, w2 in self.B.delta[b]), Matrix.zeros(M.dim * N.dim, M.dim * N.dim, self.p))
            acts.append(self._descend_op(op, p, s))
        label = f"({M!r}⊗{N!r})" if (M.label and N.label) else ""
        T = self._checked(Tb, tuple(acts), label)
        return T, p, s

    def tensor(self, X, Y):
        return self.tensor_data(X, Y)[0]

    def tensor_mor(self, f: Morphism, g: Morphism) -> Morphism:
        h = self.base_cat.tensor_mor(self.under(f), self.under(g))
        return Morphism(self.tensor(f.source, g.source), self.tensor(f.target, g.target), h.data)

    def _wrap(self, src, tgt, g: Morphism) -> Morphism:
        if g.source != src.module or g.target != tgt.module:
            raise EndpointMismatch("base structure map does not match the module carriers")
        return Morphism(src, tgt, g.data)

    @_memo
    def assoc(self, X, Y, Z) -> Morphism:
        return self._wrap(self.tensor(X, self.tensor(Y, Z)), self.tensor(self.tensor(X, Y), Z),
                          self.base_cat.assoc(X.module, Y.module, Z.module))

    @_memo
    def assoc_inv(self, X, Y, Z) -> Morphism:
        return self._wrap(self.tensor(self.tensor(X, Y), Z), self.tensor(X, self.tensor(Y, Z)),
                          self.base_cat.assoc_inv(X.module, Y.module, Z.module))

    def lunitor(self, X) -> Morphism:
        return self._wrap(self.tensor(self.unit, X), X, self.base_cat.lunitor(X.module))

    def lunitor_inv(self, X) -> Morphism:
        return self._wrap(X, self.tensor(self.unit, X), self.base_cat.lunitor_inv(X.module))

    def runitor(self, X) -> Morphism:
        return self._wrap(self.tensor(X, self.unit), X, self.base_cat.runitor(X.module))

    def runitor_inv(self, X) -> Morphism:
        return self._wrap(X, self.tensor(X, self.unit), self.base_cat.runitor_inv(X.module))

    # -- internal homs --------------------------------------------------------
    def _need_antipode(self):
        if not self.B.has_antipode:
            raise StructureMissing(f"{self.B.name} has no antipode, so internal homs are unavailable")

    def _restrict(self, i: Morphism, op: Matrix) -> Matrix:
        h = self.base.factor_through(i, Morphism(i.source, i.target, op @ i.data))
        if h is None:
            raise DescentFailed("generator action does not preserve R-linear maps")
        return h.data

    @_memo
    def lhom_data(self, M: AlgebroidModule, N: AlgebroidModule):
        """(M⊸N, inclusion into the base hom of carriers)."""
        self._need_antipode()
        Hb, i = self.base_cat.lhom_data(M.module, N.module)
        mM, mN = self.generator_matrices(M), self.generator_matrices(N)
        size = M.dim * N.dim
        acts = []
        for b in self.B.extra:
            # F ↦ Σ c A_{w2} F A_{S⁻¹(w1)}, F stored column-major
            op = Matrix.zeros(size, size, self.p)
            for c, w1, w2 in self.B.delta[b]:
                left = evaluate(self.B.apply_antipode({w1: 1}, inverse=True), mM, M.dim, self.p)
                right = evaluate({w2: 1}, mN, N.dim, self.p)
                op = op + kronecker(left.T, right).scale(c)
            acts.append(self._restrict(i, op))
        label = f"({M!r}⊸{N!r})" if (M.label and N.label) else ""
        return self._checked(Hb, tuple(acts), label), i

    def lhom(self, X, Y):
        return self.lhom_data(X, Y)[0]

    def lhom_mor(self, f: Morphism, g: Morphism) -> Morphism:
        h = self.base_cat.lhom_mor(self.under(f), self.under(g))
        return Morphism(self.lhom(f.target, g.source), self.lhom(f.source, g.target), h.data)

    def ev(self, X, Y) -> Morphism:
        return self._wrap(self.tensor(X, self.lhom(X, Y)), Y, self.base_cat.ev(X.module, Y.module))

    def coev(self, X, W) -> Morphism:
        return self._wrap(W, self.lhom(X, self.tensor(X, W)), self.base_cat.coev(X.module, W.module))

    @_memo
    def rhom_data(self, N: AlgebroidModule, M: AlgebroidModule):
        """(N⟜M, inclusion into the base hom of carriers)."""
        self._need_antipode()
        Hb, i = self.base_cat.rhom_data(N.module, M.module)
        mM, mN = self.generator_matrices(M), self.generator_matrices(N)
        size = M.dim * N.dim
        acts = []
        for b in self.B.extra:
            # F ↦ Σ c A_{w1} F A_{S(w2)}, F stored row-major
            op = Matrix.zeros(size, size, self.p)
            for c, w1, w2 in self.B.delta[b]:
                left = evaluate({w1: 1}, mN, N.dim, self.p)
                right = evaluate(self.B.apply_antipode({w2: 1}), mM, M.dim, self.p)
                op = op + kronecker(left, right.T).scale(c)
            acts.append(self._restrict(i, op))
        label = f"({N!r}⟜{M!r})" if (M.label and N.label) else ""
        return self._checked(Hb, tuple(acts), label), i

    def rhom(self, Y, X):
        return self.rhom_data(Y, X)[0]

    def rhom_mor(self, g: Morphism, f: Morphism) -> Morphism:
        h = self.base_cat.rhom_mor(self.under(g), self.under(f))
        return Morphism(self.rhom(g.source, f.target), self.rhom(g.target, f.source), h.data)

    def rev(self, X, Y) -> Morphism:
        return self._wrap(self.tensor(self.rhom(Y, X), X), Y, self.base_cat.rev(X.module, Y.module))

    def rcoev(self, X, W) -> Morphism:
        return self._wrap(W, self.rhom(self.tensor(W, X), X), self.base_cat.rcoev(X.module, W.module))

    def closed_transpose(self, X, W, h: Morphism) -> Morphism:
        g = transpose(self.base_cat, X.module, W.module, self.under(h))
        return self._wrap(W, self.lhom(X, h.target), g)

    def closed_rtranspose(self, X, W, h: Morphism) -> Morphism:
        g = rtranspose(self.base_cat, X.module, W.module, self.under(h))
        return self._wrap(W, self.rhom(h.target, X), g)

    # -- distinguished objects --------------------------------------------------
    @property
    def base_gv(self) -> GVData:
        """GV data on R-modules with dualizing object R* = D'(R)."""
        if "base_gv" not in self._cache:
            self._cache["base_gv"] = bimodule_gv(gv_structure(self.base), self.base_cat)
        return self._cache["base_gv"]

    def dualizing_module(self) -> AlgebroidModule:
        """R* with (b▶f)(r) = f(S(b)▷r)."""
        self._need_antipode()
        K = self.base_gv.K
        B = self.B
        for v in self.R.names:
            want = B.act_on_base(B.apply_antipode(word(v))).T
            got = self.generator_matrices(AlgebroidModule(K, tuple(Matrix.zeros(K.dim, K.dim, self.p)
                                                                  for _ in B.extra)))[v]
            if want != got:
                raise RelationViolated(f"the R-action on R* disagrees with S({v})▷ transposed")
        acts = tuple(B.act_on_base(B.apply_antipode(word(b))).T for b in B.extra)
        return self._checked(K, acts, "R*")

    def regular_base(self) -> AlgebroidModule:
        return self.unit


def module_category_of(B: AlgebroidStructure, validate: bool = True) -> AlgebroidModuleCategory:
    return AlgebroidModuleCategory(B, validate)


def algebroid_gv(cat: AlgebroidModuleCategory, K: AlgebroidModule | None = None) -> GVData:
    return GVData(cat, cat.dualizing_module() if K is None else K)


def forgetful_to_base(gv: GVData) -> FunctorData:
    """The strict monoidal forgetful functor to R-modules, with identity Frobenius form."""
    cat: AlgebroidModuleCategory = gv.C
    gv_base = cat.base_gv
    Cb = cat.base_cat

    def ob(M):
        return M.module

    def mor(f):
        return Morphism(f.source.module, f.target.module, f.data)

    def phi2(M, N):
        return Cb.identity(Cb.tensor(M.module, N.module))

    u0 = Cb.identity(gv_base.K) if gv.K.module == gv_base.K else None
    return FunctorData(gv, gv_base, ob, mor, phi2, Cb.identity(Cb.unit), u0, True, "U")


# ---------------------------------------------------------------------------
# spot checks


def _on_tensor(cat: AlgebroidModuleCategory, M, N, terms, descend: bool = True) -> Matrix:
    """The operator Σ c w1⊠w2 on M⊗_R N (descent asserted), or with
    ``descend=False`` the map M⊗N → M⊗_R N it induces, which is defined for
    every element of B⊗_R B."""
    _, p, s = cat.tensor_data(M, N)
    mM, mN = cat.generator_matrices(M), cat.generator_matrices(N)
    op = Matrix.zeros(M.dim * N.dim, M.dim * N.dim, cat.p)
    for c, w1, w2 in terms:
        op = op + kronecker(evaluate({w1: 1}, mM, M.dim, cat.p), evaluate({w2: 1}, mN, N.dim, cat.p)).scale(c)
    return cat._descend_op(op, p, s) if descend else p.data @ op


def _sample_words(B: AlgebroidStructure, degree: int) -> list[tuple]:
    gens = B.presentation.generators
    out = []
    for k in range(1, degree + 1):
        out.extend(itertools.product(gens, repeat=k))
    return out


def takeuchi_check(cat: AlgebroidModuleCategory, modules: Sequence[AlgebroidModule], degree: int = 2) -> CheckReport:
    """Δ descends to every M⊗_R N, on generators and all words up to ``degree``."""
    reps = []
    for M, N in itertools.product(modules, repeat=2):
        for w in _sample_words(cat.B, degree):
            try:
                _on_tensor(cat, M, N, cat.B.coproduct(w))
                ok, msg = True, ""
            except DescentFailed as exc:
                ok, msg = False, str(exc)
            reps.append(CheckReport("takeuchi", (repr(M), repr(N), "".join(w)), ok, msg))
    return combine("takeuchi", reps)


def antipode_check(cat: AlgebroidModuleCategory, modules: Sequence[AlgebroidModule], degree: int = 1) -> CheckReport:
    """Antipode axioms as operator identities on the given modules.

    On each M: S∘t = s on base variables, S∘S⁻¹ = S⁻¹∘S = id on words.
    For each pair M, N: Σ S(b₁)₁b₂ ⊠ S(b₁)₂ = 1⊠S(b) and
    Σ S⁻¹(b₂)₁ ⊠ S⁻¹(b₂)₂b₁ = S⁻¹(b)⊠1 for sampled words b, compared as
    the maps M⊗N → M⊗_R N that elements of B⊗_R B induce.
    """
    B = cat.B
    cat._need_antipode()
    p = B.p
    reps = []
    words = _sample_words(B, degree)
    for M in modules:
        for v in B.base.names:
            ok = cat.poly_matrix(M, B.apply_antipode(word(v))) == cat.poly_matrix(M, word(v))
            reps.append(CheckReport("antipode:S_t=s", (repr(M), v), ok))
        for w in words:
            f = {w: 1}
            ok = (cat.poly_matrix(M, B.apply_antipode(B.apply_antipode(f), inverse=True)) == cat.poly_matrix(M, f)
                  and cat.poly_matrix(M, B.apply_antipode(B.apply_antipode(f, inverse=True))) == cat.poly_matrix(M, f))
            reps.append(CheckReport("antipode:invertible", (repr(M), "".join(w)), ok))
    for M, N in itertools.product(modules, repeat=2):
        for w in words:
            lhs1, lhs2 = [], []
            for c, u, v in B.coproduct(w):
                for d, a, b in B.coproduct_poly(B.apply_antipode({u: 1})):
                    lhs1.append((c * d % p, a + v, b))
                for d, a, b in B.coproduct_poly(B.apply_antipode({v: 1}, inverse=True)):
                    lhs2.append((c * d % p, a, b + u))
            rhs1 = [(c, (), a) for a, c in B.apply_antipode({w: 1}).items()]
            rhs2 = [(c, a, ()) for a, c in B.apply_antipode({w: 1}, inverse=True).items()]
            for name, lhs, rhs in (("antipode:first", lhs1, rhs1), ("antipode:second", lhs2, rhs2)):
                ok = (_on_tensor(cat, M, N, [x for x in lhs if x[0]], False)
                      == _on_tensor(cat, M, N, rhs, False))
                reps.append(CheckReport(name, (repr(M), repr(N), "".join(w)), ok))
    return combine("antipode", reps)


# ---------------------------------------------------------------------------
# skew group algebras


def _group_from_table(elements: Sequence[str], table) -> tuple[int, list[int]]:
    n = len(elements)
    tab = [[int(table[a][b]) for b in range(n)] for a in range(n)]
    ids = [e for e in range(n) if all(tab[e][a] == a and tab[a][e] == a for a in range(n))]
    if len(ids) != 1:
        raise PresentationError("group table has no identity")
    e = ids[0]
    for a, b, c in itertools.product(range(n), repeat=3):
        if tab[tab[a][b]][c] != tab[a][tab[b][c]]:
            raise PresentationError("group table is not associative")
    inv = []
    for a in range(n):
        cands = [b for b in range(n) if tab[a][b] == e]
        if len(cands) != 1:
            raise PresentationError(f"element {elements[a]} has no inverse")
        inv.append(cands[0])
    return e, inv


def skew_group_algebra(R: TruncatedPolynomialRing, elements: Sequence[str], table,
                       action: Mapping[str, object], name: str | None = None):
    """R#k[G] for G acting on R by algebra automorphisms.

    ``table[a][b]`` is the index of the product of elements a and b;
    ``action[g]`` is the matrix of g▷ on the monomial basis.  Generators are
    the base variables and the non-identity group elements.  Returns
    ``(presentation, structure)``.
    """
    p = R.p
    elements = tuple(elements)
    e, inverse = _group_from_table(elements, table)
    tab = [[int(table[a][b]) for b in range(len(elements))] for a in range(len(elements))]
    acts = {g: (a if isinstance(a, Matrix) else Matrix(a, p)) for g, a in action.items()}
    if set(acts) != set(elements):
        raise PresentationError("one action matrix per group element expected")
    for g in elements:
        if not R.is_automorphism(acts[g]) or rank(acts[g]) != R.dim:
            raise PresentationError(f"{g} does not act by an algebra automorphism")
    if acts[elements[e]] != Matrix.identity(R.dim, p):
        raise PresentationError("the identity must act trivially")
    for a, b in itertools.product(range(len(elements)), repeat=2):
        if acts[elements[a]] @ acts[elements[b]] != acts[elements[tab[a][b]]]:
            raise PresentationError("action is not compatible with the group law")
    if set(elements) & set(R.names):
        raise PresentationError("group element names clash with variable names")

    def g_poly(k: int) -> dict:
        return {(): 1} if k == e else word(elements[k])

    extra = tuple(g for k, g in enumerate(elements) if k != e)
    rels = list(R.relations())
    for a, b in itertools.product(range(len(elements)), repeat=2):
        if a != e and b != e:
            rels.append(poly_add(word(elements[a], elements[b]), g_poly(tab[a][b]), p, -1))
    for a in range(len(elements)):
        if a == e:
            continue
        g = elements[a]
        for v in R.names:
            img = (acts[g].a @ R.var_vector(v)) % p
            rels.append(poly_add(word(g, v), poly_mul(R.to_poly(img), word(g), p), p, -1))
    label = name or f"{R.name}#k[G]"
    P = PresentedAlgebra.build(p, R.names + extra, rels, name=label)
    S = {v: word(v) for v in R.names}
    S.update({elements[a]: g_poly(inverse[a]) for a in range(len(elements)) if a != e})
    B = AlgebroidStructure(
        presentation=P, base=R, extra=extra,
        delta={g: [(1, (g,), (g,))] for g in extra},
        counit={g: R.one() for g in extra},
        base_action={g: acts[g] for g in extra},
        antipode=S, antipode_inv=dict(S), name=label,
        info={"elements": elements, "table": tab, "identity": e, "inverse": inverse, "action": acts},
    )
    return P, B


def skew_element(B: AlgebroidStructure, r: Sequence[int], g: str) -> dict:
    """The polynomial of r#g."""
    e = B.info["elements"][B.info["identity"]]
    return poly_mul(B.base.to_poly(r), {(): 1} if g == e else word(g), B.p)


def skew_antipode_formula(B: AlgebroidStructure, r: Sequence[int], g: str) -> dict:
    """(g⁻¹▷r)#g⁻¹, the closed form of S(r#g)."""
    info = B.info
    k = info["elements"].index(g)
    gi = info["elements"][info["inverse"][k]]
    img = (info["action"][gi].a @ np.asarray(r, dtype=np.int64)) % B.p
    return skew_element(B, img, gi)


def skew_dual_action(B: AlgebroidStructure, r: Sequence[int], g: str) -> Matrix:
    """Matrix of f ↦ f(g⁻¹▷(r·−)) on the dual basis of R."""
    info = B.info
    k = info["elements"].index(g)
    gi = info["elements"][info["inverse"][k]]
    return (info["action"][gi] @ B.base.mult_matrix(r)).T


def dualizing_module_skew(cat: AlgebroidModuleCategory) -> AlgebroidModule:
    """R* over a skew group algebra, checked against f ↦ f(g⁻¹▷(x·−))
    for every monomial x and group element g."""
    K = cat.dualizing_module()
    B = cat.B
    for m in B.base.monomials:
        r = B.base.monomial_vector(m)
        for g in B.info["elements"]:
            if cat.poly_matrix(K, skew_element(B, r, g)) != skew_dual_action(B, r, g):
                raise RelationViolated(f"R* action of {format_poly(skew_element(B, r, g))} disagrees with the closed form")
    return K


def skew_free_module(cat: AlgebroidModuleCategory) -> AlgebroidModule:
    """B = R#k[G] as a left module over itself, basis e_k#h at k·|G| + h."""
    B = cat.B
    info = B.info
    n = len(info["elements"])
    p = B.p
    mats = {}
    for v in B.base.names:
        mats[v] = kronecker(B.base.var_matrix(v), Matrix.identity(n, p))
    for k, g in enumerate(info["elements"]):
        if k == info["identity"]:
            continue
        P = np.zeros((n, n), dtype=np.int64)
        for h in range(n):
            P[info["table"][k][h], h] = 1
        mats[g] = kronecker(info["action"][g], Matrix(P, p))
    return cat.module(mats, "B")


# ---------------------------------------------------------------------------
# Lie–Rinehart enveloping algebras and truncated Weyl algebras


def lie_rinehart_enveloping(R: TruncatedPolynomialRing, basis: Sequence[str],
                            bracket: Mapping[tuple[str, str], Mapping[str, Sequence[int]]],
                            anchor: Mapping[str, Mapping[str, Sequence[int]]], name: str | None = None):
    """𝒰_R(L) for L free over R on ``basis``.

    ``bracket[(a, b)][c]`` is the R-coefficient of c in [a, b] (missing pairs
    are zero, antisymmetry is imposed); ``anchor[a][x]`` is ω(a)(x).  The
    Jacobi identity, the anchor being a Lie map and each ω(a) being a
    derivation are checked.  An antipode S(a) = −a is attached exactly when
    it respects the relations, i.e. Σ_k ω(k)(c_ab^k) = 0 for all a, b.
    Returns ``(presentation, structure)``.
    """
    p, N = R.p, R.dim
    basis = tuple(basis)
    if set(basis) & set(R.names):
        raise PresentationError("basis names clash with variable names")
    zero = np.zeros(N, dtype=np.int64)

    def c(a, b) -> dict[str, np.ndarray]:
        if (a, b) in bracket:
            src, sign = bracket[(a, b)], 1
        elif (b, a) in bracket:
            src, sign = bracket[(b, a)], -1
        else:
            return {}
        return {k: sign * np.asarray(v, dtype=np.int64) % p for k, v in src.items()}

    for (a, b), val in bracket.items():
        if (b, a) in bracket and a != b:
            other = {k: np.asarray(v) % p for k, v in bracket[(b, a)].items()}
            for k in set(val) | set(other):
                if np.any((np.asarray(val.get(k, zero)) + other.get(k, zero)) % p):
                    raise PresentationError(f"bracket is not antisymmetric on ({a}, {b})")
        if a == b and any(np.any(np.asarray(v) % p) for v in val.values()):
            raise PresentationError(f"[{a}, {a}] must vanish")
    D = {a: R.derivation_matrix(anchor.get(a, {})) for a in basis}
    for a in basis:
        if not R.is_derivation(D[a]):
            raise PresentationError(f"ω({a}) is not a derivation of R")
        for v in R.names:
            img = (D[a].a @ R.var_vector(v)) % p
            if not np.array_equal(img, np.asarray(anchor.get(a, {}).get(v, zero)) % p):
                raise PresentationError(f"ω({a}) does not respect the relations of R")

    def br(u: Mapping[str, np.ndarray], w: Mapping[str, np.ndarray]) -> dict[str, np.ndarray]:
        """[Σ u_a a, Σ w_b b] by bilinearity plus the Leibniz rule."""
        out = {k: zero.copy() for k in basis}
        for a, ua in u.items():
            for b, wb in w.items():
                uw = R.mult_matrix(ua).a @ wb
                for k, ck in c(a, b).items():
                    out[k] = out[k] + R.mult_matrix(uw).a @ ck
                out[b] = out[b] + R.mult_matrix(ua).a @ (D[a].a @ wb)
                out[a] = out[a] - R.mult_matrix(wb).a @ (D[b].a @ ua)
        return {k: v % p for k, v in out.items()}

    def e(a):
        return {a: R.one()}

    for a, b, cc in itertools.product(basis, repeat=3):
        tot = {k: zero.copy() for k in basis}
        for x, y, z in ((a, b, cc), (b, cc, a), (cc, a, b)):
            for k, v in br(e(x), br(e(y), e(z))).items():
                tot[k] = (tot[k] + v) % p
        if any(v.any() for v in tot.values()):
            raise PresentationError(f"Jacobi identity fails on ({a}, {b}, {cc})")
    for a, b in itertools.product(basis, repeat=2):
        lhs = sum((R.mult_matrix(v).a @ D[k].a for k, v in c(a, b).items()), np.zeros((N, N), dtype=np.int64))
        if not np.array_equal(lhs % p, (D[a].a @ D[b].a - D[b].a @ D[a].a) % p):
            raise PresentationError(f"anchor is not a Lie map on ({a}, {b})")

    rels = list(R.relations())
    for a in basis:
        for v in R.names:
            img = (D[a].a @ R.var_vector(v)) % p
            rel = poly_add(word(a, v), word(v, a), p, -1)
            rels.append(poly_add(rel, R.to_poly(img), p, -1))
    for a, b in itertools.combinations(basis, 2):
        rel = poly_add(word(a, b), word(b, a), p, -1)
        for k, ck in c(a, b).items():
            rel = poly_add(rel, poly_mul(R.to_poly(ck), word(k), p), p, -1)
        rels.append(rel)
    label = name or f"U_R(L)"
    P = PresentedAlgebra.build(p, R.names + basis, rels, name=label)
    antipode = None
    if all(not (sum((D[k].a @ ck for k, ck in c(a, b).items()), zero) % p).any()
           for a, b in itertools.combinations(basis, 2)):
        antipode = {v: word(v) for v in R.names}
        antipode.update({a: poly_scale(word(a), -1, p) for a in basis})
    B = AlgebroidStructure(
        presentation=P, base=R, extra=basis,
        delta={a: [(1, (), (a,)), (1, (a,), ())] for a in basis},
        counit={a: zero.copy() for a in basis},
        base_action=D,
        antipode=antipode, antipode_inv=None if antipode is None else dict(antipode),
        name=label,
    )
    return P, B


def truncated_weyl(n: int, p: int, max_dim: int = 4096):
    """A_n^{(p)}: x_i^p = 0, commuting x's and ∂'s, ∂_i x_j − x_j ∂_i = δ_ij.

    Generators are x, d for n = 1 and x1.., d1.. otherwise.  Returns
    ``(presentation, structure)``.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if p ** n > max_dim:
        raise ValueError(f"base dimension {p}^{n} exceeds {max_dim}")
    names = ("x",) if n == 1 else tuple(f"x{i + 1}" for i in range(n))
    ders = ("d",) if n == 1 else tuple(f"d{i + 1}" for i in range(n))
    R = TruncatedPolynomialRing(p, [p] * n, names)
    N = R.dim
    p_, B = lie_rinehart_enveloping(
        R, ders, {}, {d: {v: (R.one() if i == j else np.zeros(N, dtype=np.int64)) for j, v in enumerate(names)}
                      for i, d in enumerate(ders)},
        name=f"A_{n}^({p})")
    return p_, B


def standard_module(cat: AlgebroidModuleCategory) -> AlgebroidModule:
    """R with base variables acting by multiplication and derivations by differentiation."""
    return cat.unit


def frobenius_iso(cat: AlgebroidModuleCategory, lam: Sequence[int], K: AlgebroidModule | None = None) -> Morphism:
    """a ↦ λ(a·−), as a base map R → R*."""
    R = cat.R
    K = cat.dualizing_module() if K is None else K
    mu = R.alg.mu.data.a
    N = R.dim
    lam = np.asarray(lam, dtype=np.int64)
    M = np.zeros((N, N), dtype=np.int64)
    for a in range(N):
        for r in range(N):
            M[r, a] = lam @ mu[:, a * N + r]
    return Morphism(cat.unit, K, Matrix(M, cat.p))


def frobenius_forms(cat: AlgebroidModuleCategory) -> list[tuple[int, ...]]:
    """All λ: R → k for which a ↦ λ(a·−) is an isomorphism of modules R → R*."""
    out = []
    K = cat.dualizing_module()
    for lam in itertools.product(range(cat.p), repeat=cat.R.dim):
        f = frobenius_iso(cat, lam, K)
        if cat.inverse(f) is not None and cat.is_morphism(f):
            out.append(tuple(lam))
    return out


def scan_modules(cat: AlgebroidModuleCategory, dim: int) -> list[AlgebroidModule]:
    """Every generator assignment of the given dimension that passes validation."""
    gens = cat.B.presentation.generators
    p = cat.p
    out = []
    for entries in itertools.product(range(p), repeat=dim * dim * len(gens)):
        arr = np.asarray(entries, dtype=np.int64).reshape(len(gens), dim, dim)
        mats = {g: Matrix(arr[k], p) for k, g in enumerate(gens)}
        try:
            out.append(cat.module(mats))
        except (RelationViolated, ValueError):
            continue
    return out
