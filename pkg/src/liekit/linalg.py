"""Exact rational linear algebra.

Matrices are tuples of rows of :class:`fractions.Fraction`.  Vectors are row
vectors and act on the left: a linear map ``M`` sends ``x`` to ``x M``, so
row ``i`` of ``M`` holds the image coordinates of basis vector ``i``.
"""
from __future__ import annotations

import os
import re
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

from . import _reduce_py

try:
    if os.environ.get("LIEKIT_PURE_PYTHON"):
        raise ImportError
    from . import _reduce as _reduce_ext
except ImportError:
    _reduce_ext = None

BACKEND = "compiled" if _reduce_ext is not None else "python"

Matrix = tuple  # tuple[tuple[Fraction, ...], ...]
Vector = tuple  # tuple[Fraction, ...]

ZERO = Fraction(0)
ONE = Fraction(1)

_SCALAR_RE = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*([+-]?\d+))?\s*$")


class DimensionError(ValueError):
    """Operands have incompatible shapes."""


class SingularMatrixError(ValueError):
    """A matrix that must be invertible is not."""


def parse_scalar(text) -> Fraction:
    """Parse ``"p/q"`` or ``"p"`` into a canonical Fraction.

    Decimal and exponent forms are rejected because they would imply an
    inexact value.  ``"2/4"`` is accepted and normalised to ``1/2``.
    """
    if isinstance(text, bool):
        raise ValueError(f"not a rational scalar: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, Fraction):
        return text
    if not isinstance(text, str):
        raise ValueError(f"not a rational scalar: {text!r}")
    m = _SCALAR_RE.match(text)
    if not m:
        raise ValueError(f"not a rational scalar: {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ValueError(f"zero denominator in scalar {text!r}")
    return Fraction(num, den)


def format_scalar(x) -> str:
    return str(Fraction(x))


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, str)):
        return parse_scalar(x)
    raise TypeError(f"cannot use {type(x).__name__} as an exact scalar")


def vector(values: Iterable) -> Vector:
    return tuple(to_fraction(v) for v in values)


def matrix(rows: Iterable[Iterable]) -> Matrix:
    out = tuple(vector(r) for r in rows)
    if out and len({len(r) for r in out}) != 1:
        raise DimensionError("ragged matrix")
    return out


def zeros(nrows: int, ncols: int | None = None) -> Matrix:
    ncols = nrows if ncols is None else ncols
    return tuple((ZERO,) * ncols for _ in range(nrows))


def identity(n: int) -> Matrix:
    return tuple(tuple(ONE if i == j else ZERO for j in range(n)) for i in range(n))


def unit_vector(n: int, i: int) -> Vector:
    return tuple(ONE if j == i else ZERO for j in range(n))


def diagonal_matrix(entries: Sequence) -> Matrix:
    n = len(entries)
    return tuple(
        tuple(to_fraction(entries[i]) if i == j else ZERO for j in range(n)) for i in range(n)
    )


def shape(M: Matrix) -> tuple[int, int]:
    return len(M), (len(M[0]) if M else 0)


def transpose(M: Matrix) -> Matrix:
    return tuple(zip(*M)) if M else ()


def add(A: Matrix, B: Matrix) -> Matrix:
    if shape(A) != shape(B):
        raise DimensionError(f"shapes {shape(A)} and {shape(B)} differ")
    return tuple(tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(A, B))


def sub(A: Matrix, B: Matrix) -> Matrix:
    if shape(A) != shape(B):
        raise DimensionError(f"shapes {shape(A)} and {shape(B)} differ")
    return tuple(tuple(a - b for a, b in zip(ra, rb)) for ra, rb in zip(A, B))


def scale(c, A: Matrix) -> Matrix:
    c = to_fraction(c)
    return tuple(tuple(c * a for a in r) for r in A)


def matmul(A: Matrix, B: Matrix) -> Matrix:
    if shape(A)[1] != len(B):
        raise DimensionError(f"cannot multiply {shape(A)} by {shape(B)}")
    Bt = transpose(B)
    return tuple(
        tuple(sum((a * b for a, b in zip(ra, cb) if a and b), ZERO) for cb in Bt) for ra in A
    )


def vecmat(x: Sequence, M: Matrix) -> Vector:
    """Image ``x M`` of the row vector ``x``."""
    if len(x) != len(M):
        raise DimensionError(f"vector of length {len(x)} against {len(M)} rows")
    ncols = shape(M)[1]
    out = [ZERO] * ncols
    for xi, row in zip(x, M):
        if xi:
            for j, v in enumerate(row):
                if v:
                    out[j] += xi * v
    return tuple(out)


def matpow(M: Matrix, k: int) -> Matrix:
    result = identity(len(M))
    for _ in range(k):
        result = matmul(result, M)
    return result


def is_zero(M) -> bool:
    if M and isinstance(M[0], tuple):
        return all(not v for r in M for v in r)
    return all(not v for v in M)


def flatten(M: Matrix) -> Vector:
    return tuple(v for r in M for v in r)


def unflatten(v: Sequence, n: int) -> Matrix:
    if len(v) != n * n:
        raise DimensionError(f"cannot reshape {len(v)} entries to {n}x{n}")
    return tuple(tuple(v[i * n:(i + 1) * n]) for i in range(n))


def compose(A: Matrix, B: Matrix) -> Matrix:
    """Matrix of the map ``A o B`` (apply ``B`` first) in row convention."""
    return matmul(B, A)


def commutator(A: Matrix, B: Matrix) -> Matrix:
    """Matrix of the operator commutator ``A o B - B o A``.

    With maps acting on row vectors this is ``B A - A B`` as a matrix
    product, which makes ``ad([x, y]) == commutator(ad(x), ad(y))``.
    """
    if shape(A) != shape(B) or shape(A)[0] != shape(A)[1]:
        raise DimensionError(f"commutator needs equal square shapes, got {shape(A)}, {shape(B)}")
    return sub(matmul(B, A), matmul(A, B))


def is_upper_triangular(M: Matrix) -> bool:
    return all(not M[i][j] for i in range(len(M)) for j in range(i))


def diag(M: Matrix) -> Vector:
    return tuple(M[i][i] for i in range(len(M)))


def trace(M: Matrix) -> Fraction:
    return sum(diag(M), ZERO)


# -- row reduction ---------------------------------------------------------

def _integer_rows(M: Sequence[Sequence[Fraction]]) -> list[list[int]]:
    rows = []
    for r in M:
        den = 1
        for v in r:
            if v.denominator != 1:
                den = lcm(den, v.denominator)
        rows.append([int(v * den) for v in r])
    return rows


def reduce_integer_rows(rows: list[list[int]], ncols: int):
    """Dispatch to the compiled kernel, falling back on int64 overflow."""
    if _reduce_ext is not None:
        try:
            return _reduce_ext.reduce_int_rows(rows, ncols)
        except OverflowError:
            pass
    return _reduce_py.reduce_int_rows(rows, ncols)


def rref(M: Sequence[Sequence]) -> tuple[Matrix, tuple[int, ...]]:
    """Reduced row echelon form (leading ones, zero rows dropped) and pivots."""
    M = matrix(M)
    nrows, ncols = shape(M)
    if nrows == 0 or ncols == 0:
        return (), ()
    pivots, reduced = reduce_integer_rows(_integer_rows(M), ncols)
    out = []
    for col, row in zip(pivots, reduced):
        p = row[col]
        out.append(tuple(Fraction(v, p) for v in row))
    return tuple(out), tuple(pivots)


def rank(M: Sequence[Sequence]) -> int:
    return len(rref(M)[1])


@dataclass(frozen=True)
class Subspace:
    """Coordinate subspace stored by its canonical reduced echelon basis.

    Two subspaces are equal exactly when their ``basis`` tuples are equal.
    """

    ambient_dim: int
    basis: Matrix = ()

    @classmethod
    def span(cls, vectors: Iterable[Sequence], ambient_dim: int) -> "Subspace":
        rows = [vector(v) for v in vectors]
        for r in rows:
            if len(r) != ambient_dim:
                raise DimensionError(f"vector of length {len(r)} in {ambient_dim}-space")
        if not rows:
            return cls(ambient_dim, ())
        return cls(ambient_dim, rref(rows)[0])

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(n, identity(n))

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n, ())

    @classmethod
    def coordinate(cls, n: int, indices: Iterable[int]) -> "Subspace":
        """Span of the 0-based coordinate axes in ``indices``."""
        return cls.span([unit_vector(n, i) for i in sorted(set(indices))], n)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def pivots(self) -> tuple[int, ...]:
        return tuple(next(j for j, v in enumerate(r) if v) for r in self.basis)

    def contains(self, v: Sequence) -> bool:
        v = list(vector(v))
        for row, p in zip(self.basis, self.pivots):
            c = v[p]
            if c:
                v = [a - c * b for a, b in zip(v, row)]
        return not any(v)

    def __le__(self, other: "Subspace") -> bool:
        if self.ambient_dim != other.ambient_dim:
            raise DimensionError("ambient dimensions differ")
        return all(other.contains(r) for r in self.basis)

    def __add__(self, other: "Subspace") -> "Subspace":
        if self.ambient_dim != other.ambient_dim:
            raise DimensionError("ambient dimensions differ")
        return Subspace.span(self.basis + other.basis, self.ambient_dim)

    def complement_axes(self) -> tuple[int, ...]:
        """0-based coordinate axes spanning a complement (the non-pivot columns)."""
        piv = set(self.pivots)
        return tuple(j for j in range(self.ambient_dim) if j not in piv)

    def to_json(self) -> list[list[str]]:
        return [[format_scalar(v) for v in r] for r in self.basis]


def nullspace(M: Sequence[Sequence]) -> Subspace:
    """Canonical basis of the left kernel ``{x : x M = 0}``."""
    M = matrix(M)
    nrows, ncols = shape(M)
    if nrows == 0:
        return Subspace.zero(0)
    if ncols == 0:
        return Subspace.full(nrows)
    R, pivots = rref(transpose(M))
    free = [j for j in range(nrows) if j not in set(pivots)]
    vecs = []
    for f in free:
        x = [ZERO] * nrows
        x[f] = ONE
        for row, p in zip(R, pivots):
            x[p] = -row[f]
        vecs.append(x)
    return Subspace.span(vecs, nrows)


def solve_right_kernel(rows: Sequence[Sequence], ncols: int) -> Subspace:
    """Canonical basis of ``{x : A x = 0}`` for the system with the given rows."""
    if not rows:
        return Subspace.full(ncols)
    R, pivots = rref(rows)
    pset = set(pivots)
    vecs = []
    for f in range(ncols):
        if f in pset:
            continue
        x = [ZERO] * ncols
        x[f] = ONE
        for row, p in zip(R, pivots):
            x[p] = -row[f]
        vecs.append(x)
    return Subspace.span(vecs, ncols)


def coordinates_in(basis: Sequence[Sequence], v: Sequence) -> Vector | None:
    """Coefficients ``c`` with ``sum c_i basis_i == v``, or None if ``v`` is outside the span."""
    k = len(basis)
    if k == 0:
        return () if not any(vector(v)) else None
    n = len(v)
    # columns: basis vectors; augmented with v
    rows = [[basis[i][j] for i in range(k)] + [to_fraction(v[j])] for j in range(n)]
    R, pivots = rref(rows)
    if k in pivots:
        return None
    c = [ZERO] * k
    for row, p in zip(R, pivots):
        c[p] = row[k]
    return tuple(c)


def inverse(M: Matrix) -> Matrix:
    M = matrix(M)
    n, m = shape(M)
    if n != m:
        raise DimensionError("inverse of a non-square matrix")
    aug = [list(r) + list(e) for r, e in zip(M, identity(n))]
    R, pivots = rref(aug)
    if tuple(pivots[:n]) != tuple(range(n)) or len(R) < n:
        raise SingularMatrixError("matrix is singular")
    return tuple(tuple(r[n:]) for r in R)


def is_invertible(M: Matrix) -> bool:
    return rank(M) == len(M)


def is_nilpotent_matrix(M: Matrix) -> bool:
    """True iff ``M**n == 0``."""
    n, m = shape(M)
    if n != m:
        raise DimensionError("nilpotency of a non-square matrix")
    P = M
    for _ in range(n - 1):
        if is_zero(P):
            return True
        P = matmul(P, M)
    return is_zero(P)


def charpoly(M: Matrix) -> Vector:
    """Coefficients ``(1, c_1, ..., c_n)`` of ``det(t I - M)`` by Faddeev-LeVerrier."""
    n = len(M)
    coeffs = [ONE]
    Mk = zeros(n)
    I = identity(n)
    c = ONE
    for k in range(1, n + 1):
        Mk = matmul(M, add(Mk, scale(c, I)))
        c = -trace(Mk) / k
        coeffs.append(c)
    return tuple(coeffs)
