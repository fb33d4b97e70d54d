"""Scenario files: loading, validation and resolution into runnable contexts.

A scenario is a TOML document.  Top-level keys: ``name``, ``description``,
``seed`` and either the keys of a single part or a list ``[[part]]`` of
parts.  Each part selects a backend, its data, the objects to test and a
``[[battery]]`` of check specs.  The README documents the schema.
"""
from __future__ import annotations

import hashlib
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

from .coherence import MutatedModel
from .duality import FunctorData, GVData, LDData
from .graded import GradedVec, gv_structure, svec, vec
from .linalg import Matrix
from .modules import (
    Bimodule,
    BimoduleCategory,
    LeftModuleCategory,
    LocalModuleCategory,
    bimodule_gv,
    enumerate_bimodules,
    enumerate_left_modules,
    exterior_algebra,
    forgetful,
)

SCHEMA_VERSION = 1

BACKENDS = ("vec", "svec", "bimodules", "left-modules", "local-modules", "algebroid", "suplat",
            "quantale-bimodules")


class ScenarioError(ValueError):
    """The file does not parse or does not match the schema."""


class ResolutionError(ValueError):
    """A name in the scenario does not resolve to an object, algebra or check."""


@dataclass
class Scenario:
    name: str
    description: str
    seed: int
    parts: list[dict]
    digest: str
    path: str = ""


def _require(d: dict, key: str, kind, where: str):
    if key not in d:
        raise ScenarioError(f"{where}: missing key {key!r}")
    val = d[key]
    if not isinstance(val, kind):
        raise ScenarioError(f"{where}: {key!r} has the wrong type")
    return val


_PART_KEYS = {"name", "backend", "field", "algebra", "algebroid", "quantale", "dualizing", "objects",
              "battery", "mutate", "max_size"}


def _validate_part(part: dict, where: str) -> dict:
    unknown = set(part) - _PART_KEYS
    if unknown:
        raise ScenarioError(f"{where}: unknown keys {sorted(unknown)}")
    backend = _require(part, "backend", str, where)
    if backend not in BACKENDS:
        raise ScenarioError(f"{where}: unknown backend {backend!r}")
    if backend != "suplat" and backend != "quantale-bimodules":
        fld = _require(part, "field", dict, where)
        p = _require(fld, "p", int, where + ".field")
        if p < 2 or any(p % q == 0 for q in range(2, int(p ** 0.5) + 1)):
            raise ScenarioError(f"{where}: field characteristic {p} is not prime")
    battery = _require(part, "battery", list, where)
    for k, spec in enumerate(battery):
        if not isinstance(spec, dict) or not isinstance(spec.get("check"), str):
            raise ScenarioError(f"{where}.battery[{k}]: every entry needs a string 'check'")
    objs = part.get("objects", {})
    if not isinstance(objs, dict):
        raise ScenarioError(f"{where}: 'objects' must be a table")
    return part


def parse_scenario(text: str, name: str = "scenario") -> Scenario:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ScenarioError(f"{name}: {exc}") from None
    digest = hashlib.sha256(text.encode()).hexdigest()
    seed = doc.get("seed", 0)
    if not isinstance(seed, int) or seed < 0:
        raise ScenarioError(f"{name}: seed must be a nonnegative integer")
    if "part" in doc:
        parts = doc["part"]
        if not isinstance(parts, list) or not parts:
            raise ScenarioError(f"{name}: 'part' must be a nonempty array of tables")
        if set(doc) & (_PART_KEYS - {"name"}):
            raise ScenarioError(f"{name}: part keys found at top level next to [[part]]")
    else:
        parts = [{k: v for k, v in doc.items() if k not in ("description", "seed")}]
    out = []
    for k, part in enumerate(parts):
        where = f"{name}.part[{k}]"
        if not isinstance(part, dict):
            raise ScenarioError(f"{where}: must be a table")
        out.append(_validate_part(dict(part), where))
    sname = doc.get("name", name)
    return Scenario(str(sname), str(doc.get("description", "")), seed, out, digest)


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ScenarioError(f"cannot read {path}: {exc}") from None
    sc = parse_scenario(text, path.stem)
    sc.path = str(path)
    return sc


def shipped_scenarios() -> dict[str, Path]:
    d = Path(__file__).parent / "scenarios"
    return {p.stem: p for p in sorted(d.glob("*.toml"))}


def resolve_scenario_path(arg: str) -> Path:
    p = Path(arg)
    if p.exists():
        return p
    shipped = shipped_scenarios()
    if arg in shipped:
        return shipped[arg]
    raise ScenarioError(f"no scenario file {arg!r} (shipped: {', '.join(shipped)})")


# ---------------------------------------------------------------------------
# contexts


@dataclass
class Context:
    part: str
    backend: str
    C: Any
    gv: GVData | None
    named: dict[str, Any]
    enumerated: list
    functor: FunctorData | None = None
    extras: dict = field(default_factory=dict)
    _ld: LDData | None = None

    @property
    def ld(self) -> LDData:
        if self.gv is None:
            raise ResolutionError(f"{self.part}: no dualizing object declared")
        if self._ld is None:
            self._ld = LDData(self.gv)
        return self._ld

    def all_objects(self) -> list:
        out = list(self.named.values())
        for X in self.enumerated:
            if X not in out:
                out.append(X)
        return out

    def select(self, names) -> list:
        if names is None or names == "all":
            return self.all_objects()
        if names == "enumerated":
            return list(self.enumerated)
        out = []
        for n in names:
            if n not in self.named:
                raise ResolutionError(f"{self.part}: unknown object {n!r}")
            out.append(self.named[n])
        return out

    def describe(self, X) -> str:
        for k, v in self.named.items():
            if v == X:
                return k
        return self.gv.C.describe(X) if self.gv is not None else repr(X)


def size_of(X) -> int:
    for attr in ("dim", "n"):
        if hasattr(X, attr):
            return int(getattr(X, attr))
    if hasattr(X, "space"):
        return size_of(X.space)
    return 1


def _field(part: dict) -> int:
    return int(part["field"]["p"])


def _base_model(part: dict, kind: str | None = None) -> GradedVec:
    p = _field(part)
    kind = kind or part.get("field", {}).get("base", "vec")
    if kind == "vec":
        return vec(p)
    if kind == "svec":
        if p == 2:
            raise ResolutionError("super vector spaces need an odd characteristic")
        return svec(p)
    raise ResolutionError(f"unknown base {kind!r}")


def _matrix(rows, p: int, where: str) -> Matrix:
    try:
        a = np.asarray(rows, dtype=np.int64)
    except (TypeError, ValueError):
        raise ScenarioError(f"{where}: matrix entries must be integers") from None
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ScenarioError(f"{where}: expected a square matrix")
    return Matrix(a, p)


# -- algebras for module backends ------------------------------------------------


@dataclass
class _AlgebraInfo:
    alg: Any
    names: tuple
    basis_words: list   # exponent tuples per basis element (truncated) or None


def _algebra(part: dict, C) -> _AlgebraInfo:
    from .algebroids import TruncatedPolynomialRing

    spec = part.get("algebra")
    if not isinstance(spec, dict):
        raise ScenarioError(f"{part.get('name', 'part')}: module backends need an [algebra] table")
    kind = spec.get("kind")
    if kind == "truncated":
        exps = spec.get("exponents", [2])
        names = spec.get("names")
        R = TruncatedPolynomialRing(C.p, exps, names, C=C, name=spec.get("label"))
        return _AlgebraInfo(R.alg, R.names, list(R.monomials))
    if kind == "exterior":
        if not (isinstance(C, GradedVec) and C.group == (2,)):
            raise ResolutionError("the exterior algebra needs super vector spaces")
        return _AlgebraInfo(exterior_algebra(C), (spec.get("generator", "theta"),), [(0,), (1,)])
    raise ResolutionError(f"unknown algebra kind {kind!r}")


def _action_from_generators(info: _AlgebraInfo, n: int, mats: dict, p: int) -> Matrix:
    blocks = []
    for exps in info.basis_words:
        op = np.eye(n, dtype=np.int64)
        for g, e in zip(info.names, exps):
            for _ in range(e):
                op = (op @ mats[g].a) % p
        blocks.append(op)
    return Matrix(np.hstack(blocks), p)


def _explicit_module(cat, info: _AlgebraInfo, spec: dict, C, kind: str, where: str):
    p = C.p
    dim = _require(spec, "dim", int, where)
    degrees = spec.get("degrees", [0] * dim)
    space = C.space(degrees) if hasattr(C, "space") and spec.get("degrees") else C.vec(dim)

    def gens(key):
        table = spec.get(key, {})
        mats = {}
        for g in info.names:
            if g not in table:
                raise ScenarioError(f"{where}: {key} action of {g!r} missing")
            m = _matrix(table[g], p, f"{where}.{key}.{g}")
            if m.shape != (dim, dim):
                raise ScenarioError(f"{where}: {key} matrix of {g!r} must be {dim}x{dim}")
            mats[g] = m
        return mats

    l = _action_from_generators(info, dim, gens("left"), p)
    label = spec.get("name", "")
    try:
        if kind == "bimodules":
            r_src = gens("right")
            # right action columns are indexed m⊗a, so interleave the blocks
            blocks = _action_from_generators(info, dim, r_src, p).a
            nA = len(info.basis_words)
            r = np.zeros((dim, dim * nA), dtype=np.int64)
            for k in range(nA):
                for j in range(dim):
                    r[:, j * nA + k] = blocks[:, k * dim + j]
            return cat.bimodule(space, l, Matrix(r, p), label)
        return cat.module(space, l, label)
    except ValueError as exc:
        raise ResolutionError(f"{where}: {exc}") from None


# -- object expressions -----------------------------------------------------------

_EXPR = re.compile(r"^\s*([A-Za-z_]+)\s*\((.*)\)\s*$")


def _split_args(s: str) -> list[str]:
    out, depth, cur = [], 0, ""
    for ch in s:
        if ch == "," and depth == 0:
            out.append(cur.strip())
            cur = ""
            continue
        depth += ch == "("
        depth -= ch == ")"
        cur += ch
    if cur.strip():
        out.append(cur.strip())
    return out


def _eval_object(expr: str, ctx: Context, builders: dict[str, Callable[[], Any]]):
    expr = expr.strip()
    if expr in ctx.named:
        return ctx.named[expr]
    if expr in builders:
        return builders[expr]()
    m = _EXPR.match(expr)
    if not m:
        raise ResolutionError(f"{ctx.part}: cannot resolve object {expr!r}")
    op, args = m.group(1), [_eval_object(a, ctx, builders) for a in _split_args(m.group(2))]
    C = ctx.C
    ops = {
        "tensor": (2, lambda a, b: C.tensor(a, b)),
        "lhom": (2, lambda a, b: C.lhom(a, b)),
        "rhom": (2, lambda a, b: C.rhom(a, b)),
        "D": (1, lambda a: ctx.gv.D(a)),
        "Dp": (1, lambda a: ctx.gv.Dp(a)),
        "par": (2, lambda a, b: ctx.gv.par(a, b)),
    }
    if op not in ops:
        raise ResolutionError(f"{ctx.part}: unknown object constructor {op!r}")
    n, fn = ops[op]
    if len(args) != n:
        raise ResolutionError(f"{ctx.part}: {op} takes {n} arguments")
    if op in ("D", "Dp", "par") and ctx.gv is None:
        raise ResolutionError(f"{ctx.part}: {op} needs a dualizing object")
    return fn(*args)


def _finish(ctx: Context, part: dict, builders: dict, enumerate_fn: Callable[[int], list] | None,
            max_dim_cap: int | None):
    objs = part.get("objects", {})
    include = objs.get("include", ["unit"])
    if not isinstance(include, list):
        raise ScenarioError(f"{ctx.part}: objects.include must be a list")
    for item in include:
        if isinstance(item, dict):
            name, expr = item.get("name"), item.get("expr")
            if not isinstance(name, str) or not isinstance(expr, str):
                raise ScenarioError(f"{ctx.part}: include entries need 'name' and 'expr'")
        else:
            name = expr = str(item)
        ctx.named[name] = _eval_object(expr, ctx, builders)
    if objs.get("enumerate", False):
        if enumerate_fn is None:
            raise ResolutionError(f"{ctx.part}: backend {ctx.backend!r} cannot enumerate objects")
        md = int(objs.get("max_dim", objs.get("max_size", 2)))
        if max_dim_cap is not None:
            md = min(md, max_dim_cap)
        ctx.enumerated = enumerate_fn(md)
    return ctx


def _mutated(C, part: dict):
    mut = part.get("mutate")
    if not mut:
        return C
    if not isinstance(mut, dict) or not isinstance(mut.get("method"), str):
        raise ScenarioError("mutate needs a 'method' string")
    if not hasattr(C, mut["method"]):
        raise ResolutionError(f"model has no structure method {mut['method']!r}")
    return MutatedModel(C, mut["method"], int(mut.get("seed", 0)))


def build_context(part: dict, index: int = 0, max_dim_cap: int | None = None) -> Context:
    name = str(part.get("name", f"part{index}"))
    backend = part["backend"]
    dual = part.get("dualizing", {})
    if isinstance(dual, str):
        dual = {"kind": dual}
    dkind = dual.get("kind", "default")
    builders: dict[str, Callable[[], Any]] = {}

    if backend in ("vec", "svec"):
        C0 = _base_model(part, backend)
        C = _mutated(C0, part)
        if dkind in ("default", "unit"):
            K = C0.unit
        elif dkind == "zero":
            K = C0.vec(0)
        elif dkind == "space":
            K = C0.space(dual.get("degrees", [0])) if backend == "svec" else C0.vec(int(dual.get("dim", 1)))
        else:
            raise ResolutionError(f"{name}: unknown dualizing kind {dkind!r}")
        gv = GVData(C, K)
        ctx = Context(name, backend, C, gv, {}, [])
        builders.update({"unit": lambda: C0.unit, "K": lambda: K})
        if backend == "vec":
            enum = lambda md: [C0.vec(n) for n in range(md + 1)]
        else:
            enum = lambda md: C0.objects_up_to(md)
        return _finish(ctx, part, builders, enum, max_dim_cap)

    if backend in ("bimodules", "left-modules", "local-modules"):
        C0 = _base_model(part)
        info = _algebra(part, C0)
        if backend == "bimodules":
            cat = BimoduleCategory(info.alg)
        elif backend == "left-modules":
            cat = LeftModuleCategory(info.alg, int(part.get("algebra", {}).get("sign", 1)))
        else:
            cat = LocalModuleCategory(info.alg)
        gvb = gv_structure(C0)
        if dkind not in ("default", "dual-algebra", "unit"):
            raise ResolutionError(f"{name}: unknown dualizing kind {dkind!r}")
        gv0 = bimodule_gv(gvb, cat)
        K = cat.unit if dkind == "unit" else gv0.K
        Cm = _mutated(cat, part)
        gv = GVData(Cm, K)
        functor = forgetful(gv, gvb) if dkind != "unit" else None
        ctx = Context(name, backend, Cm, gv, {}, [], functor,
                      {"algebra": info.alg, "category": cat, "base_gv": gvb})
        builders.update({"unit": lambda: cat.unit, "K": lambda: K})
        if backend == "bimodules":
            builders["free"] = lambda: cat.free(C0.vec(1), "A⊗A")
        for k, spec in enumerate(part.get("objects", {}).get("modules", [])):
            if not isinstance(spec, dict) or "name" not in spec:
                raise ScenarioError(f"{name}: objects.modules[{k}] needs a name")
            M = _explicit_module(cat, info, spec, C0, backend, f"{name}.objects.modules[{k}]")
            builders[spec["name"]] = (lambda M=M: M)
        if backend == "bimodules":
            def enum(md):
                return enumerate_bimodules(cat, [C0.vec(n) for n in range(1, md + 1)])
        else:
            def enum(md):
                spaces = C0.objects_up_to(md, 1)
                return enumerate_left_modules(cat, spaces, local_only=backend == "local-modules")
        return _finish(ctx, part, builders, enum, max_dim_cap)

    if backend == "algebroid":
        from . import algebroids as ab

        p = _field(part)
        B = _algebroid(part, p)
        cat = ab.module_category_of(B)
        Cm = _mutated(cat, part)
        if dkind in ("default", "dual"):
            K = cat.dualizing_module()
            gv = GVData(Cm, K)
            functor = ab.forgetful_to_base(GVData(cat, K))
        elif dkind == "unit":
            K = cat.unit
            gv = GVData(Cm, K)
            functor = None
        else:
            raise ResolutionError(f"{name}: unknown dualizing kind {dkind!r}")
        ctx = Context(name, backend, Cm, gv, {}, [], functor, {"structure": B, "category": cat})
        builders.update({"unit": lambda: cat.unit, "K": lambda: K})
        if B.info.get("elements"):
            builders["free"] = lambda: ab.skew_free_module(cat)
        if B.has_antipode:
            builders["Rstar"] = cat.dualizing_module
        return _finish(ctx, part, builders, lambda md: ab.scan_modules(cat, md), max_dim_cap)

    if backend == "suplat":
        from . import suplat as sl

        C0 = sl.SupLat()
        C = _mutated(C0, part)
        gv = GVData(C, C0.unit)
        ctx = Context(name, backend, C, gv, {}, [])
        builders.update({"unit": lambda: C0.unit, "K": lambda: C0.unit})
        for k in range(1, 6):
            builders[f"chain{k}"] = (lambda k=k: sl.chain(k))
        for k in range(0, 3):
            builders[f"powerset{k}"] = (lambda k=k: sl.powerset(k))
        return _finish(ctx, part, builders, lambda md: sl.lattices_up_to(md), max_dim_cap)

    if backend == "quantale-bimodules":
        from . import suplat as sl

        C0 = sl.SupLat()
        Q = _quantale(part, C0)
        cat = sl.quantale_bimodule_category(Q)
        gvb = GVData(C0, C0.unit)
        gv0 = bimodule_gv(gvb, cat)
        Cm = _mutated(cat, part)
        gv = GVData(Cm, gv0.K)
        ctx = Context(name, backend, Cm, gv, {}, [], None, {"quantale": Q, "category": cat, "base": C0})
        builders.update({"unit": lambda: cat.unit, "K": lambda: gv0.K})
        return _finish(ctx, part, builders, lambda md: sl.enumerate_quantale_bimodules(cat, md), max_dim_cap)

    raise ResolutionError(f"unknown backend {backend!r}")  # pragma: no cover


def _quantale(part: dict, C):
    from . import suplat as sl

    spec = part.get("quantale", {})
    kind = spec.get("kind", "powerset-cyclic")
    if kind == "powerset-cyclic":
        n = int(spec.get("order", 2))
        if not 1 <= n <= 3:
            raise ResolutionError("powerset quantales of cyclic groups are supported up to order 3")
        return sl.powerset_quantale(C, list(range(n)), lambda a, b: (a + b) % n, 0, f"P(Z/{n})")
    if kind == "trivial":
        return sl.trivial_quantale(C)
    raise ResolutionError(f"unknown quantale kind {kind!r}")


def _algebroid(part: dict, p: int):
    from . import algebroids as ab

    spec = part.get("algebroid")
    if not isinstance(spec, dict):
        raise ScenarioError("the algebroid backend needs an [algebroid] table")
    kind = spec.get("kind")
    try:
        if kind == "weyl":
            _, B = ab.truncated_weyl(int(spec.get("n", 1)), p)
            return B
        base = spec.get("base", {})
        R = ab.TruncatedPolynomialRing(p, base.get("exponents", [2]), base.get("names"))
        if kind == "skew-group":
            els = spec.get("elements")
            table = spec.get("table")
            action = spec.get("action")
            if not (isinstance(els, list) and isinstance(table, list) and isinstance(action, dict)):
                raise ScenarioError("skew-group needs 'elements', 'table' and 'action'")
            mats = {g: _matrix(action[g], p, f"algebroid.action.{g}") if g in action else None for g in els}
            e = next((g for g, m in mats.items() if m is None), None)
            if e is not None:
                mats[e] = Matrix.identity(R.dim, p)
            _, B = ab.skew_group_algebra(R, els, table, mats)
            return B
        if kind == "lie-rinehart":
            basis = spec.get("basis", [])
            anchor = {a: {v: list(x) for v, x in d.items()} for a, d in spec.get("anchor", {}).items()}
            bracket = {}
            for item in spec.get("bracket", []):
                bracket[(item["a"], item["b"])] = {k: list(v) for k, v in item["value"].items()}
            _, B = ab.lie_rinehart_enveloping(R, basis, bracket, anchor)
            return B
    except (ab.PresentationError, KeyError, TypeError) as exc:
        raise ResolutionError(f"algebroid data: {exc}") from None
    raise ResolutionError(f"unknown algebroid kind {kind!r}")
