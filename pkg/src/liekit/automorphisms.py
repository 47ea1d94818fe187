"""Automorphisms: the homomorphism check, the upper-triangular shape for Q_{2m+1}, exp(ad x)."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Mapping, Sequence

from .algebra import LieAlgebra, ad, bracket
from .derivations import free_row2_columns
from .linalg import (
    ZERO,
    DimensionError,
    Matrix,
    add,
    identity,
    is_invertible,
    is_nilpotent_matrix,
    matpow,
    matrix,
    scale,
    shape,
    to_fraction,
    vecmat,
)


class NotNilpotentError(ValueError):
    pass


def automorphism_violation(g: LieAlgebra, A: Matrix):
    """``"singular"``, the first 1-based pair ``(i, j)`` with ``[A e_i, A e_j] != A[e_i, e_j]``, or None."""
    A = matrix(A)
    if shape(A) != (g.dim, g.dim):
        raise DimensionError(f"expected a {g.dim}x{g.dim} matrix")
    if not is_invertible(A):
        return "singular"
    for i in range(g.dim):
        for j in range(i + 1, g.dim):
            if bracket(g, A[i], A[j]) != vecmat(g.basis_bracket(i, j), A):
                return (i + 1, j + 1)
    return None


def is_automorphism(g: LieAlgebra, A: Matrix) -> bool:
    return automorphism_violation(g, A) is None


@dataclass(frozen=True)
class AutomorphismShape:
    """Upper-triangular automorphism of Q_{2m+1} from its first two rows.

    ``row1`` maps columns ``3..2m+1`` to ``a_{1,k}``; ``row2`` maps the free
    columns (those of :func:`free_row2_columns`) to ``a_{2,k}``.  The other
    rows follow from ``sigma(e_{k+1}) = [sigma(e_1), sigma(e_k)]``.
    """

    m: int
    p: Fraction
    q: Fraction
    row1: Mapping[int, Fraction] = field(default_factory=dict)
    row2: Mapping[int, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "p", to_fraction(self.p))
        object.__setattr__(self, "q", to_fraction(self.q))
        if not self.p or not self.q:
            raise ValueError("p and q must be nonzero")
        n = 2 * self.m + 1
        r1 = {k: to_fraction(v) for k, v in dict(self.row1).items()}
        r2 = {k: to_fraction(v) for k, v in dict(self.row2).items()}
        for k in r1:
            if not 3 <= k <= n:
                raise ValueError(f"a_(1,{k}) is not a free first-row entry")
        allowed = set(free_row2_columns(self.m))
        for k in r2:
            if k not in allowed:
                raise ValueError(f"a_(2,{k}) is not a free second-row entry for m={self.m}")
        object.__setattr__(self, "row1", {k: v for k, v in sorted(r1.items()) if v})
        object.__setattr__(self, "row2", {k: v for k, v in sorted(r2.items()) if v})

    @classmethod
    def diagonal(cls, m: int, p) -> "AutomorphismShape":
        """``q = p``: the scaling ``diag(p, p, p^2, ..., p^{2m})``."""
        return cls(m, p, p)

    def realize(self) -> Matrix:
        from .families import build_Q

        m = self.m
        n = 2 * m + 1
        g = build_Q(m)
        r1 = [ZERO] * n
        r1[0], r1[1] = self.p, self.q - self.p
        for k, v in self.row1.items():
            r1[k - 1] = v
        r2 = [ZERO] * n
        r2[1] = self.q
        for k, v in self.row2.items():
            r2[k - 1] = v
        rows = [tuple(r1), tuple(r2)]
        for _ in range(2, n):
            rows.append(bracket(g, rows[0], rows[-1]))
        return tuple(rows)


def shape_law_violation(m: int, A: Matrix) -> str | None:
    """First closed-form law of the automorphism shape that ``A`` breaks."""
    n = 2 * m + 1
    a = lambda i, j: A[i - 1][j - 1]  # noqa: E731
    p, q = a(1, 1), a(2, 2)
    if any(a(i, j) for i in range(1, n + 1) for j in range(1, i)):
        return "upper triangular"
    if a(1, 2) != q - p:
        return "a_12 = q - p"
    for k in range(3, 2 * m + 1):
        if a(k, k) != p ** (k - 2) * q:
            return f"a_{k}{k} = p^{k - 2} q"
    if a(n, n) != p ** (2 * m - 2) * q * q:
        return "a_nn = p^(2m-2) q^2"
    for i in range(3, 2 * m + 1):
        for j in range(i + 1, 2 * m + 1):
            if a(i, j) != p ** (i - 2) * a(2, j - i + 2):
                return f"row shift at ({i},{j})"
    for i in range(m + 3, 2 * m + 1):
        if a(i, n) != (-1) ** (i + 1) * p ** (i - 3) * q * a(1, 2 * m + 3 - i):
            return f"last column at ({i},{n})"
    return None


def shape_from_matrix(m: int, A: Matrix) -> AutomorphismShape:
    n = 2 * m + 1
    return AutomorphismShape(
        m, A[0][0], A[1][1],
        {k: A[0][k - 1] for k in range(3, n + 1)},
        {k: A[1][k - 1] for k in free_row2_columns(m)},
    )


def exp_inner(g: LieAlgebra, x: Sequence) -> Matrix:
    """``exp(ad x)`` as the terminating sum of ``ad(x)^k / k!``.

    This is an automorphism whenever ``ad x`` is a derivation; otherwise it
    is just the exponential.  Raises NotNilpotentError if ``ad x`` is not
    nilpotent.
    """
    X = ad(g, x)
    if not is_nilpotent_matrix(X):
        raise NotNilpotentError("ad(x) is not nilpotent")
    out = identity(g.dim)
    for k in range(1, g.dim):
        P = matpow(X, k)
        if not any(any(r) for r in P):
            break
        out = add(out, scale(Fraction(1, factorial(k)), P))
    return out


def derive_automorphism_form(m: int) -> dict:
    """Solve the homomorphism equations for a generic upper-triangular matrix.

    Returns ``{"solutions": [sympy Matrix, ...], "params": [...],
    "row2_zero": [...], "row2_free": [...]}``; ``row2_zero`` lists the
    columns ``k >= 3`` where ``a_{2,k}`` vanishes on every solution branch
    with ``a_11 a_22 != 0``.
    """
    import sympy as sp

    from .families import build_Q

    g = build_Q(m)
    n = g.dim
    A = sp.Matrix(n, n, lambda i, j: sp.Symbol(f"a{i + 1}_{j + 1}") if j >= i else 0)
    C = {}
    for (a, b), terms in g.structure.items():
        C[(a, b)] = dict(terms)

    def br(u, v):
        out = [sp.Integer(0)] * n
        for (a, b), terms in C.items():
            coef = u[a] * v[b] - u[b] * v[a]
            if coef != 0:
                for c, val in terms.items():
                    out[c] += coef * sp.Rational(val.numerator, val.denominator)
        return out

    rows = [list(A.row(i)) for i in range(n)]
    eqs = []
    for i in range(n):
        for j in range(i + 1, n):
            img = [sp.Integer(0)] * n
            for c, val in C.get((i, j), {}).items():
                for k in range(n):
                    img[k] += sp.Rational(val.numerator, val.denominator) * A[c, k]
            eqs += [e for e in (sp.expand(x - y) for x, y in zip(br(rows[i], rows[j]), img)) if e != 0]
    p, q = sp.Symbol("a1_1"), sp.Symbol("a2_2")
    unknowns = sorted((s for s in A.free_symbols if s not in (p, q)), key=str)
    sols = sp.solve(eqs, unknowns, dict=True)
    solutions = [A.subs(s) for s in sols if sp.simplify(A.subs(s)[0, 0] * A.subs(s)[1, 1]) != 0]
    row2_zero = [k + 1 for k in range(2, n) if all(M[1, k] == 0 for M in solutions)]
    row2_free = [k + 1 for k in range(2, n) if k + 1 not in row2_zero]
    params = sorted(set().union(*(M.free_symbols for M in solutions)), key=str)
    return {"solutions": solutions, "params": params, "row2_zero": row2_zero, "row2_free": row2_free}

