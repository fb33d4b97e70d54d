"""Exact dense linear algebra over prime fields F_p.

Every routine here is deterministic: kernel and cokernel bases are read off a
reduced row echelon form with pivots chosen in ascending column order, so the
same input always produces the same matrices downstream.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

_INT64_LIMIT = 2**62


class NotInvertible(ArithmeticError):
    """Raised by :func:`invert` when a matrix is rank deficient."""


class DimensionMismatch(ValueError):
    pass


@dataclass(frozen=True)
class PrimeField:
    p: int

    def __post_init__(self) -> None:
        if self.p < 2 or self.p > 2**31 or not _is_prime(self.p):
            raise ValueError(f"{self.p} is not a supported prime")

    def inv(self, a: int) -> int:
        return pow(int(a) % self.p, -1, self.p)

    def __contains__(self, a: int) -> bool:
        return 0 <= a < self.p


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            return False
        f += 1
    return True


_FLOAT_EXACT = 2 ** 52


def _dtype_for(p: int, inner: int):
    # Products of residues summed over `inner` terms must fit in int64.
    return np.int64 if (p - 1) ** 2 * max(inner, 1) < _INT64_LIMIT else object


class Matrix:
    """Immutable dense matrix over F_p.

    Column j is the image of the j-th source basis vector, so composition of
    linear maps is plain matrix multiplication ``g @ f``.
    """

    __slots__ = ("a", "p", "_hash")

    def __init__(self, entries, p: int):
        a = np.array(entries, dtype=np.int64 if p < 2**31 else object)
        if a.ndim != 2:
            if a.size == 0:
                a = a.reshape(0, 0)
            else:
                raise ValueError("Matrix entries must be two dimensional")
        a %= p
        a.setflags(write=False)
        self.a = a
        self.p = p
        self._hash = None

    @classmethod
    def _wrap(cls, a: np.ndarray, p: int) -> "Matrix":
        m = cls.__new__(cls)
        a = a % p
        if a.dtype == object:
            a = a.astype(np.int64)
        a.setflags(write=False)
        m.a, m.p, m._hash = a, p, None
        return m

    @classmethod
    def identity(cls, n: int, p: int) -> "Matrix":
        return cls._wrap(np.eye(n, dtype=np.int64), p)

    @classmethod
    def zeros(cls, rows: int, cols: int, p: int) -> "Matrix":
        return cls._wrap(np.zeros((rows, cols), dtype=np.int64), p)

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence[int]], nrows: int, p: int) -> "Matrix":
        a = np.zeros((nrows, len(cols)), dtype=np.int64)
        for j, c in enumerate(cols):
            a[:, j] = np.asarray(c, dtype=np.int64)
        return cls._wrap(a, p)

    @property
    def rows(self) -> int:
        return self.a.shape[0]

    @property
    def cols(self) -> int:
        return self.a.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.a.shape

    @property
    def entries(self) -> tuple[int, ...]:
        return tuple(int(v) for v in self.a.ravel())

    def tolist(self) -> list[list[int]]:
        return self.a.tolist()

    def __getitem__(self, idx):
        return self.a[idx]

    def _check_field(self, other: "Matrix") -> None:
        if other.p != self.p:
            raise DimensionMismatch(f"field mismatch: F_{self.p} vs F_{other.p}")

    def __matmul__(self, other: "Matrix") -> "Matrix":
        return mat_mul(self, other)

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check_field(other)
        if self.shape != other.shape:
            raise DimensionMismatch(f"cannot add {self.shape} and {other.shape}")
        return Matrix._wrap(self.a + other.a, self.p)

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check_field(other)
        if self.shape != other.shape:
            raise DimensionMismatch(f"cannot subtract {self.shape} and {other.shape}")
        return Matrix._wrap(self.a - other.a, self.p)

    def __neg__(self) -> "Matrix":
        return Matrix._wrap(-self.a, self.p)

    def scale(self, c: int) -> "Matrix":
        return Matrix._wrap(self.a * (int(c) % self.p), self.p)

    @property
    def T(self) -> "Matrix":
        return Matrix._wrap(self.a.T.copy(), self.p)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.p == other.p and self.shape == other.shape and bool(np.array_equal(self.a, other.a))

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.p, self.shape, self.a.tobytes()))
        return self._hash

    def is_zero(self) -> bool:
        return not self.a.any()

    def is_identity(self) -> bool:
        return self.rows == self.cols and bool(np.array_equal(self.a, np.eye(self.rows, dtype=np.int64)))

    def __repr__(self) -> str:
        return f"Matrix(F_{self.p}, {self.rows}x{self.cols}, {self.a.tolist()})"


def mat_mul(A: Matrix, B: Matrix) -> Matrix:
    """Exact product A·B mod p."""
    if A.p != B.p:
        raise DimensionMismatch(f"field mismatch: F_{A.p} vs F_{B.p}")
    if A.cols != B.rows:
        raise DimensionMismatch(f"cannot multiply {A.shape} by {B.shape}")
    dt = _dtype_for(A.p, A.cols)
    if (A.p - 1) ** 2 * max(A.cols, 1) < _FLOAT_EXACT:
        # BLAS in double precision is exact while every partial sum stays below 2^53
        out = np.rint(A.a.astype(np.float64) @ B.a.astype(np.float64)).astype(np.int64)
    elif dt is np.int64:
        out = A.a @ B.a
    else:
        out = A.a.astype(object) @ B.a.astype(object)
    return Matrix._wrap(out, A.p)


def kronecker(A: Matrix, B: Matrix) -> Matrix:
    """(A⊗B)[(i,k),(j,l)] = A[i,j]·B[k,l], left factor major."""
    if A.p != B.p:
        raise DimensionMismatch("field mismatch")
    if (A.p - 1) ** 2 < _INT64_LIMIT:
        out = np.kron(A.a, B.a)
    else:
        out = np.kron(A.a.astype(object), B.a.astype(object))
    return Matrix._wrap(out.reshape(A.rows * B.rows, A.cols * B.cols), A.p)


def block_diag(blocks: Iterable[Matrix], p: int) -> Matrix:
    blocks = list(blocks)
    r = sum(b.rows for b in blocks)
    c = sum(b.cols for b in blocks)
    a = np.zeros((r, c), dtype=np.int64)
    i = j = 0
    for b in blocks:
        a[i:i + b.rows, j:j + b.cols] = b.a
        i += b.rows
        j += b.cols
    return Matrix._wrap(a, p)


def hstack(mats: Sequence[Matrix], p: int, rows: int | None = None) -> Matrix:
    if not mats:
        return Matrix.zeros(rows or 0, 0, p)
    return Matrix._wrap(np.hstack([m.a for m in mats]), p)


def vstack(mats: Sequence[Matrix], p: int, cols: int | None = None) -> Matrix:
    if not mats:
        return Matrix.zeros(0, cols or 0, p)
    return Matrix._wrap(np.vstack([m.a for m in mats]), p)


def rref(A: Matrix) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns (ascending)."""
    p = A.p
    R = A.a.astype(object if p >= 2**31 else np.int64).copy()
    rows, cols = R.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(R[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            R[[r, k]] = R[[k, r]]
        R[r] = (R[r] * pow(int(R[r, c]), -1, p)) % p
        col = R[:, c].copy()
        col[r] = 0
        if col.any():
            R = (R - np.outer(col, R[r])) % p
        pivots.append(c)
        r += 1
    return R, pivots


def rank(A: Matrix) -> int:
    return len(rref(A)[1])


def kernel_basis(A: Matrix) -> Matrix:
    """Columns form the echelon basis of {v : A v = 0}.

    One basis vector per free column (ascending); it has a 1 in that free
    position and zeros in every other free position.
    """
    p = A.p
    R, pivots = rref(A)
    n = A.cols
    free = [c for c in range(n) if c not in set(pivots)]
    K = np.zeros((n, len(free)), dtype=np.int64)
    for j, f in enumerate(free):
        K[f, j] = 1
        for i, pc in enumerate(pivots):
            K[pc, j] = (-int(R[i, f])) % p
    return Matrix._wrap(K, p)


@dataclass(frozen=True)
class Cokernel:
    proj: Matrix      # dim x n, surjective, kernel = image of A
    section: Matrix   # n x dim, proj @ section = I
    dim: int


def cokernel(A: Matrix) -> Cokernel:
    """Quotient of F_p^n by the column space of A (n = A.rows).

    The image is row-reduced as the row space of Aᵀ; the quotient basis is the
    set of non-pivot coordinates in ascending order.
    """
    p = A.p
    n = A.rows
    R, pivots = rref(A.T)
    piv = set(pivots)
    keep = [j for j in range(n) if j not in piv]
    P = np.zeros((len(keep), n), dtype=np.int64)
    pos = {j: k for k, j in enumerate(keep)}
    for j in keep:
        P[pos[j], j] = 1
    for i, pc in enumerate(pivots):
        for j in keep:
            P[pos[j], pc] = (-int(R[i, j])) % p
    S = np.zeros((n, len(keep)), dtype=np.int64)
    for j in keep:
        S[j, pos[j]] = 1
    return Cokernel(Matrix._wrap(P, p), Matrix._wrap(S, p), len(keep))


def try_invert(A: Matrix) -> Matrix | None:
    if A.rows != A.cols:
        return None
    n = A.rows
    p = A.p
    aug = Matrix._wrap(np.hstack([A.a, np.eye(n, dtype=np.int64)]), p)
    R, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        return None
    return Matrix._wrap(np.asarray(R[:, n:], dtype=np.int64), p)


def invert(A: Matrix) -> Matrix:
    """Exact inverse; raises :class:`NotInvertible` on rank deficiency."""
    if A.rows != A.cols:
        raise DimensionMismatch(f"cannot invert non-square {A.shape}")
    inv = try_invert(A)
    if inv is None:
        raise NotInvertible(f"rank {rank(A)} < {A.rows}")
    return inv


def solve(A: Matrix, B: Matrix) -> Matrix | None:
    """Some X with A·X = B (free variables set to zero), or None."""
    if A.rows != B.rows:
        raise DimensionMismatch(f"cannot solve {A.shape} against {B.shape}")
    p = A.p
    n = A.cols
    aug = Matrix._wrap(np.hstack([A.a, B.a]), p)
    R, pivots = rref(aug)
    X = np.zeros((n, B.cols), dtype=np.int64)
    for i, pc in enumerate(pivots):
        if pc >= n:
            return None
        X[pc] = R[i, n:]
    return Matrix._wrap(X, p)


def column_space_contains(A: Matrix, B: Matrix) -> bool:
    return solve(A, B) is not None
