"""Derivation algebras, the Q_{2m+1} derivation shape, nil-independence."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import lcm
from typing import Mapping, Sequence

from .algebra import LieAlgebra, ad, basis, bracket
from .linalg import (
    ZERO,
    DimensionError,
    Matrix,
    Subspace,
    add,
    diag,
    flatten,
    inverse,
    is_upper_triangular,
    matmul,
    nullspace,
    shape,
    solve_right_kernel,
    to_fraction,
    unflatten,
    vecmat,
)


class NotADerivationError(ValueError):
    def __init__(self, pair):
        self.pair = pair
        super().__init__(f"not a derivation: Leibniz rule fails on basis pair {pair}")


class NotTriangularError(ValueError):
    """Input matrices are not upper triangular in the given basis."""


class ShapeViolation(ValueError):
    """A derivation of Q_{2m+1} breaks one of the constraints of its normal shape."""

    def __init__(self, constraint, entry=None, expected=None, found=None):
        self.constraint = constraint
        self.entry = entry
        self.expected = expected
        self.found = found
        msg = constraint
        if entry is not None:
            msg += f" at entry {entry}: expected {expected}, found {found}"
        super().__init__(msg)


def derivation_violation(g: LieAlgebra, D: Matrix) -> tuple[int, int] | None:
    """First 1-based basis pair ``a < b`` where ``D[x, y] = [Dx, y] + [x, Dy]`` fails."""
    if shape(D) != (g.dim, g.dim):
        raise DimensionError(f"{shape(D)} map on a {g.dim}-dimensional algebra")
    n = g.dim
    for a in range(n):
        for b in range(a + 1, n):
            lhs = vecmat(g.basis_bracket(a, b), D)
            r1 = bracket(g, D[a], basis(g)[b])
            r2 = bracket(g, basis(g)[a], D[b])
            if any(l - p - q for l, p, q in zip(lhs, r1, r2)):
                return (a + 1, b + 1)
    return None


def is_derivation(g: LieAlgebra, D: Matrix) -> bool:
    return derivation_violation(g, D) is None


def leibniz_system(g: LieAlgebra) -> list[list[Fraction]]:
    """Linear equations on the flattened entries ``d_{rs}`` (index ``r*n + s``).

    One equation per pair ``a < b`` and output coordinate ``k``:
    ``sum_c C^c_ab d_ck - sum_j C^k_jb d_aj - sum_j C^k_aj d_bj = 0``.
    """
    n = g.dim
    C = [[g.basis_bracket(a, b) for b in range(n)] for a in range(n)]
    rows = []
    for a in range(n):
        for b in range(a + 1, n):
            cab = C[a][b]
            for k in range(n):
                row = {}
                for c in range(n):
                    if cab[c]:
                        row[c * n + k] = row.get(c * n + k, ZERO) + cab[c]
                for j in range(n):
                    v = C[j][b][k]
                    if v:
                        row[a * n + j] = row.get(a * n + j, ZERO) - v
                    v = C[a][j][k]
                    if v:
                        row[b * n + j] = row.get(b * n + j, ZERO) - v
                row = {i: v for i, v in row.items() if v}
                if row:
                    dense = [ZERO] * (n * n)
                    for i, v in row.items():
                        dense[i] = v
                    rows.append(dense)
    return rows


@dataclass(frozen=True)
class DerivationSpace:
    """Derivations of an algebra, with the inner ones identified.

    ``inner`` is spanned by those ``ad(x)`` that are derivations; for a Lie
    algebra this is every ``ad(x)``.
    """

    algebra_dim: int
    space: Subspace  # flattened n*n matrices
    inner: Subspace
    ad_span: Subspace = field(repr=False)

    @property
    def basis(self) -> list[Matrix]:
        return [unflatten(v, self.algebra_dim) for v in self.space.basis]

    @property
    def total_dim(self) -> int:
        return self.space.dim

    @property
    def inner_dim(self) -> int:
        return self.inner.dim

    @property
    def outer_dim(self) -> int:
        return self.space.dim - self.inner.dim

    def outer_representatives(self) -> list[Matrix]:
        """Basis elements of the space that are independent modulo ``inner``."""
        reps = []
        acc = self.inner
        for v in self.space.basis:
            if not acc.contains(v):
                reps.append(unflatten(v, self.algebra_dim))
                acc = acc + Subspace.span([v], acc.ambient_dim)
        return reps

    def to_json_obj(self) -> dict:
        from .linalg import format_scalar

        return {
            "total_dim": self.total_dim,
            "inner_dim": self.inner_dim,
            "outer_dim": self.outer_dim,
            "basis": [[[format_scalar(v) for v in row] for row in M] for M in self.basis],
        }


def intersect(U: Subspace, V: Subspace) -> Subspace:
    if U.ambient_dim != V.ambient_dim:
        raise DimensionError("ambient dimensions differ")
    if U.dim == 0 or V.dim == 0:
        return Subspace.zero(U.ambient_dim)
    # x U = y V  <=>  (x, -y) [U; V] = 0
    stacked = list(U.basis) + [tuple(-v for v in r) for r in V.basis]
    K = nullspace(stacked)
    vecs = []
    for coeffs in K.basis:
        x = coeffs[:U.dim]
        vecs.append(vecmat(x, U.basis))
    return Subspace.span(vecs, U.ambient_dim)


def derivation_space(g: LieAlgebra) -> DerivationSpace:
    n = g.dim
    space = solve_right_kernel(leibniz_system(g), n * n)
    ad_span = Subspace.span([flatten(ad(g, e)) for e in basis(g)], n * n)
    return DerivationSpace(n, space, intersect(ad_span, space), ad_span)


def inner_derivation_elements(g: LieAlgebra) -> Subspace:
    """``{x : ad(x) is a derivation}``; the whole algebra when Jacobi holds."""
    n = g.dim
    space = solve_right_kernel(leibniz_system(g), n * n)
    # ad(x) = sum_a x_a ad(e_a); impose that each flattened combination lies in space
    ads = [flatten(ad(g, e)) for e in basis(g)]
    # project onto the quotient by space: complement coordinates of canonical form
    K = nullspace([reduce_mod(space, v) for v in ads])
    return K


def reduce_mod(S: Subspace, v: Sequence) -> tuple:
    """Canonical remainder of ``v`` modulo the subspace ``S``."""
    v = list(v)
    for row, p in zip(S.basis, S.pivots):
        c = v[p]
        if c:
            v = [a - c * b for a, b in zip(v, row)]
    return tuple(v)


def conjugate(D: Matrix, A: Matrix) -> Matrix:
    """Matrix of ``D`` in the basis ``sigma(e_1), ..., sigma(e_n)``, i.e. ``A D A^-1``.

    Raises SingularMatrixError if ``A`` is not invertible.
    """
    return matmul(matmul(A, D), inverse(A))


def shift_by_inner(g: LieAlgebra, D: Matrix, coeffs: Sequence) -> Matrix:
    """``D + ad(sum coeffs_a e_a)``."""
    if len(coeffs) != g.dim:
        raise DimensionError(f"{len(coeffs)} coefficients in a {g.dim}-dimensional algebra")
    return add(D, ad(g, [to_fraction(c) for c in coeffs]))


# -- nil-independence ------------------------------------------------------

def _primitive_integer(v: Sequence[Fraction]) -> tuple[int, ...]:
    den = 1
    for x in v:
        den = lcm(den, x.denominator)
    ints = [int(x * den) for x in v]
    from math import gcd

    g = 0
    for x in ints:
        g = gcd(g, x)
    ints = [x // g for x in ints] if g else ints
    first = next((x for x in ints if x), 0)
    if first < 0:
        ints = [-x for x in ints]
    return tuple(ints)


def nil_dependence_witness(Ds: Sequence[Matrix], require_triangular: bool = True) -> tuple[int, ...] | None:
    """Nonzero integer coefficients making ``sum c_i D_i`` nilpotent, or None.

    Only simultaneously upper-triangular inputs are supported: such a
    combination is nilpotent exactly when its diagonal vanishes.
    """
    if not Ds:
        return None
    if not require_triangular:
        raise NotTriangularError("only simultaneously triangular inputs are supported")
    n = len(Ds[0])
    for i, D in enumerate(Ds):
        if shape(D) != (n, n):
            raise DimensionError("matrices of different sizes")
        if not is_upper_triangular(D):
            raise NotTriangularError(f"matrix {i} is not upper triangular in the given basis")
    K = nullspace([diag(D) for D in Ds])
    if K.dim == 0:
        return None
    return _primitive_integer(K.basis[0])


def nil_independent(Ds: Sequence[Matrix], require_triangular: bool = True) -> bool:
    return nil_dependence_witness(Ds, require_triangular) is None


def combine(coeffs: Sequence, Ds: Sequence[Matrix]) -> Matrix:
    n = len(Ds[0])
    out = [[ZERO] * n for _ in range(n)]
    for c, D in zip(coeffs, Ds):
        c = to_fraction(c)
        if c:
            for i in range(n):
                for j in range(n):
                    if D[i][j]:
                        out[i][j] += c * D[i][j]
    return tuple(tuple(r) for r in out)


# -- the normal shape of derivations of Q_{2m+1} ---------------------------

def free_row2_columns(m: int) -> tuple[int, ...]:
    """1-based columns ``k`` where ``d_{2,k}`` is a free parameter."""
    n = 2 * m + 1
    return tuple(k for k in range(m + 2, 2 * m + 1) if k % 2 == 0) + (n,)


def last_column_rule(m: int, j: int) -> tuple[int, int] | None:
    """For row ``j + 1`` of the last column: ``(sign, k)`` with ``d_{j+1,n} = d_{j,2m} + sign*d_{1,k}``.

    ``sign == 0`` means no first-row term.  Valid for ``2 <= j <= 2m - 1``.
    """
    if 2 <= j <= m:
        return (-(-1) ** j, 2 * m + 2 - j)
    if j == m + 1:
        return (0, 0)
    if m + 2 <= j <= 2 * m - 1:
        return ((-1) ** j, 2 * m + 2 - j)
    return None


@dataclass(frozen=True)
class DerivationShape:
    """Parameters of a derivation of Q_{2m+1} in its upper-triangular normal shape.

    ``row1`` maps columns ``3..2m+1`` to ``d_{1,k}``; ``row2`` maps the free
    columns of :func:`free_row2_columns` to ``d_{2,k}``.  Everything else is
    determined by ``alpha = d_11`` and ``beta = d_22``.
    """

    m: int
    alpha: Fraction
    beta: Fraction
    row1: Mapping[int, Fraction] = field(default_factory=dict)
    row2: Mapping[int, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        n = 2 * self.m + 1
        object.__setattr__(self, "alpha", to_fraction(self.alpha))
        object.__setattr__(self, "beta", to_fraction(self.beta))
        r1 = {k: to_fraction(v) for k, v in dict(self.row1).items()}
        r2 = {k: to_fraction(v) for k, v in dict(self.row2).items()}
        for k in r1:
            if not 3 <= k <= n:
                raise ValueError(f"d_(1,{k}) is not a free first-row entry")
        allowed = set(free_row2_columns(self.m))
        for k in r2:
            if k not in allowed:
                raise ValueError(f"d_(2,{k}) is not a free second-row entry for m={self.m}")
        object.__setattr__(self, "row1", {k: v for k, v in sorted(r1.items()) if v})
        object.__setattr__(self, "row2", {k: v for k, v in sorted(r2.items()) if v})

    @classmethod
    def from_labels(cls, m: int, alpha, beta, a=0, b=0, c=0, d: Mapping | None = None,
                    row1: Mapping | None = None) -> "DerivationShape":
        """Build from the named parameters ``a, b, c, d_k``.

        ``a = d_{1,m+1}``, ``b = d_{1,2m+1} - d_{2,2m+1}``, ``c`` is the
        ``(m+1, 2m+1)`` entry and ``d[k] = d_{2,k}``.  ``row1`` adds further
        explicit first-row entries; an explicit ``d_{1,m+2}`` fixes
        ``d_{2,m+2}`` through ``c`` when m is even.
        """
        n = 2 * m + 1
        r1 = {k: to_fraction(v) for k, v in dict(row1 or {}).items()}
        r2 = {k: to_fraction(v) for k, v in dict(d or {}).items()}
        a, b, c = to_fraction(a), to_fraction(b), to_fraction(c)
        for k, val in ((m + 1, a), (n, b + r2.get(n, ZERO))):
            if val:
                if r1.get(k, ZERO) not in (ZERO, val):
                    raise ValueError(f"conflicting values for d_(1,{k})")
                r1[k] = val
        # (m+1, n) entry = d_{2,m+2} - (-1)^m d_{1,m+2}
        s = (-1) ** m
        if m + 2 in r1:
            d2 = c + s * r1[m + 2]
            if m % 2 == 0:
                if r2.get(m + 2, d2) != d2:
                    raise ValueError("c is inconsistent with the given d_(1,m+2) and d_(2,m+2)")
                r2[m + 2] = d2
            elif d2:
                raise ValueError("for odd m, c must equal d_(1,m+2)")
        else:
            r1[m + 2] = (r2.get(m + 2, ZERO) - c) * s
        return cls(m, alpha, beta, r1, r2)

    @property
    def dim(self) -> int:
        return 2 * self.m + 1

    def labels(self) -> dict[str, Fraction]:
        """The named parameters ``a, b, c`` and ``d_k`` of the realized matrix."""
        D = self.realize()
        m, n = self.m, self.dim
        out = {
            "alpha": self.alpha,
            "beta": self.beta,
            "a": D[0][m],
            "b": D[0][n - 1] - D[1][n - 1],
            "c": D[m][n - 1],
        }
        for k in free_row2_columns(m)[:-1]:
            out[f"d{k}"] = D[1][k - 1]
        return out

    def realize(self) -> Matrix:
        m, n = self.m, self.dim
        al, be = self.alpha, self.beta
        D = [[ZERO] * (n + 1) for _ in range(n + 1)]  # 1-based scratch
        D[1][1] = al
        D[1][2] = be - al
        for k, v in self.row1.items():
            D[1][k] = v
        D[2][2] = be
        for k, v in self.row2.items():
            D[2][k] = v
        for j in range(3, 2 * m + 1):
            D[j][j] = (j - 2) * al + be
            for k in range(j + 1, 2 * m + 1):
                D[j][k] = D[2][k - j + 2]
        for j in range(2, 2 * m):
            sign, k = last_column_rule(m, j)
            D[j + 1][n] = D[j][2 * m] + (sign * D[1][k] if sign else ZERO)
        D[n][n] = (2 * m - 2) * al + 2 * be
        return tuple(tuple(D[i][1:]) for i in range(1, n + 1))


def shape_violation(m: int, D: Matrix) -> ShapeViolation | None:
    """First broken constraint of the normal shape, or None.

    Constraints, in order: lower-triangular zeros, ``d_12 = beta - alpha``,
    the diagonal law, the row-shift law ``d_{j,k} = d_{2,k-j+2}``, the forced
    zeros of row 2, and the last-column recursion.
    """
    n = 2 * m + 1
    if shape(D) != (n, n):
        raise DimensionError(f"expected a {n}x{n} matrix")
    d = lambda i, j: D[i - 1][j - 1]  # noqa: E731
    for i in range(1, n + 1):
        for j in range(1, i):
            if d(i, j):
                return ShapeViolation("upper triangular", (i, j), "0", str(d(i, j)))
    al, be = d(1, 1), d(2, 2)
    if d(1, 2) != be - al:
        return ShapeViolation("d_12 = beta - alpha", (1, 2), str(be - al), str(d(1, 2)))
    for k in range(3, 2 * m + 1):
        want = (k - 2) * al + be
        if d(k, k) != want:
            return ShapeViolation("d_kk = (k-2) alpha + beta", (k, k), str(want), str(d(k, k)))
    want = (2 * m - 2) * al + 2 * be
    if d(n, n) != want:
        return ShapeViolation("d_nn = (2m-2) alpha + 2 beta", (n, n), str(want), str(d(n, n)))
    for j in range(3, 2 * m + 1):
        for k in range(j + 1, 2 * m + 1):
            if d(j, k) != d(2, k - j + 2):
                return ShapeViolation("d_jk = d_2,k-j+2", (j, k), str(d(2, k - j + 2)), str(d(j, k)))
    free = set(free_row2_columns(m))
    for k in range(3, n + 1):
        if k not in free and d(2, k):
            return ShapeViolation("forced zero in row 2", (2, k), "0", str(d(2, k)))
    for j in range(2, 2 * m):
        sign, k = last_column_rule(m, j)
        want = d(j, 2 * m) + (sign * d(1, k) if sign else ZERO)
        if d(j + 1, n) != want:
            return ShapeViolation("last-column recursion", (j + 1, n), str(want), str(d(j + 1, n)))
    return None


def shape_of(m: int, D: Matrix) -> DerivationShape:
    """Read the shape parameters off ``D`` without checking the constraints."""
    n = 2 * m + 1
    row1 = {k: D[0][k - 1] for k in range(3, n + 1)}
    row2 = {k: D[1][k - 1] for k in free_row2_columns(m)}
    return DerivationShape(m, D[0][0], D[1][1], row1, row2)


def check_derivation_shape(m: int, D: Matrix, g: LieAlgebra | None = None) -> DerivationShape:
    """Decompose a derivation of Q_{2m+1} into its shape parameters.

    Raises NotADerivationError if ``D`` is not a derivation of ``g`` (built
    from ``m`` when omitted) and ShapeViolation for the first broken
    constraint.
    """
    if g is None:
        from .families import build_Q

        g = build_Q(m)
    bad = derivation_violation(g, D)
    if bad is not None:
        raise NotADerivationError(bad)
    v = shape_violation(m, D)
    if v is not None:
        raise v
    s = shape_of(m, D)
    if s.realize() != tuple(tuple(r) for r in D):
        raise ShapeViolation("realization mismatch")
    return s


def alpha_beta(D: Matrix) -> tuple[Fraction, Fraction]:
    return D[0][0], D[1][1]


def three_subset_witnesses(Ds: Sequence[Matrix]):
    """Yield ``(indices, witness)`` for every 3-subset of ``Ds``."""
    for idx in combinations(range(len(Ds)), 3):
        yield idx, nil_dependence_witness([Ds[i] for i in idx])
